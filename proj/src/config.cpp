#include "msde/config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "msde/common.hpp"

namespace msde {

namespace {

using nlohmann::json;

double need_number(const json& j, const std::string& block, const std::string& field) {
  if (!j.contains(field))
    throw config_error("config: missing field " + block + "." + field);
  if (!j.at(field).is_number())
    throw config_error("config: field " + block + "." + field + " must be a number");
  return j.at(field).get<double>();
}

LikelihoodKind parse_kind(const std::string& s) {
  if (s == "exact") return LikelihoodKind::exact;
  if (s == "pseudo") return LikelihoodKind::pseudo;
  throw config_error("config: run.kind must be \"exact\" or \"pseudo\"");
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw config_error(std::string("config: JSON parse failed: ") + e.what());
  }

  ExperimentConfig cfg;

  if (!j.contains("model")) throw config_error("config: missing field model");
  const auto& jm = j.at("model");
  if (!jm.contains("name")) throw config_error("config: missing field model.name");
  cfg.model_name = jm.at("name").get<std::string>();
  if (jm.contains("options")) {
    for (const auto& [k, v] : jm.at("options").items()) {
      if (!v.is_number())
        throw config_error("config: model.options." + k + " must be a number");
      cfg.model_options[k] = v.get<double>();
    }
  }

  if (!j.contains("scale")) throw config_error("config: missing field scale");
  const auto& js = j.at("scale");
  cfg.epsilon = need_number(js, "scale", "epsilon");
  cfg.delta = need_number(js, "scale", "delta");
  if (!js.contains("regime")) throw config_error("config: missing field scale.regime");
  cfg.regime = regime_from_int(js.at("regime").get<int>());
  if (js.contains("gamma")) cfg.gamma = js.at("gamma").get<double>();

  if (j.contains("run")) {
    const auto& jr = j.at("run");
    if (jr.contains("theta_true")) cfg.theta_true = jr.at("theta_true").get<double>();
    if (jr.contains("theta_domain")) {
      const auto& d = jr.at("theta_domain");
      if (!d.is_array() || d.size() != 2)
        throw config_error("config: run.theta_domain must be [lo, hi]");
      cfg.theta_lo = d.at(0).get<double>();
      cfg.theta_hi = d.at(1).get<double>();
    }
    if (jr.contains("T")) cfg.horizon = jr.at("T").get<double>();
    if (jr.contains("step")) cfg.step = jr.at("step").get<double>();
    if (jr.contains("target_error")) cfg.target_error = jr.at("target_error").get<double>();
    if (jr.contains("seed")) cfg.seed = jr.at("seed").get<std::uint64_t>();
    if (jr.contains("M")) cfg.replications = jr.at("M").get<int>();
    if (jr.contains("x0")) cfg.x0 = jr.at("x0").get<double>();
    if (jr.contains("allow_coarse_step"))
      cfg.allow_coarse_step = jr.at("allow_coarse_step").get<bool>();
    if (jr.contains("kind")) cfg.kind = parse_kind(jr.at("kind").get<std::string>());
  }

  if (j.contains("output")) {
    const auto& jo = j.at("output");
    if (jo.contains("directory")) cfg.out_dir = jo.at("directory").get<std::string>();
    if (jo.contains("stride")) cfg.store_stride = jo.at("stride").get<int>();
    if (jo.contains("bins")) cfg.bins = jo.at("bins").get<int>();
  }

  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

ModelSpec ExperimentConfig::make_model() const {
  ModelSpec m = builtin_model(model_name, model_options);
  if (theta_lo) m.theta_lo = *theta_lo;
  if (theta_hi) m.theta_hi = *theta_hi;
  if (!(m.theta_lo < m.theta_hi)) throw config_error("config: run.theta_domain is empty");
  return m;
}

ScaleParams ExperimentConfig::make_scale() const {
  ScaleParams s;
  s.epsilon = epsilon;
  s.delta = delta;
  s.regime = regime;
  s.gamma = gamma;
  s.validate();
  return s;
}

double ExperimentConfig::effective_step() const {
  if (step) return *step;
  return step_bound(make_scale(), target_error);
}

SimConfig ExperimentConfig::make_sim_config() const {
  SimConfig c;
  c.x0 = x0;
  c.horizon = horizon;
  c.step = effective_step();
  c.seed = seed;
  c.store_stride = store_stride;
  c.allow_coarse_step = allow_coarse_step;
  return c;
}

void ExperimentConfig::validate() const {
  make_model();
  const auto s = make_scale();
  if (!(horizon > 0.0)) throw config_error("config: run.T must be > 0");
  if (step && !(*step > 0.0)) throw config_error("config: run.step must be > 0");
  if (!(target_error > 0.0)) throw config_error("config: run.target_error must be > 0");
  if (store_stride < 1) throw config_error("config: output.stride must be >= 1");
  if (bins < 1) throw config_error("config: output.bins must be >= 1");
  if (step && !allow_coarse_step) {
    const double bound = step_bound(s, target_error);
    if (*step > bound * (1.0 + 1e-12))
      throw config_error("config: run.step exceeds the step bound " + std::to_string(bound) +
                         "; set run.allow_coarse_step to force");
  }
}

}  // namespace msde
