#include "msde/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "msde/common.hpp"

namespace msde {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(std::string_view s, const std::string& where) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw config_error("CSV parse error in " + where + ": bad number '" + std::string(s) + "'");
  return v;
}

std::ofstream open_out(const std::string& file) {
  std::ofstream out(file);
  if (!out) throw config_error("cannot open for writing: " + file);
  return out;
}

}  // namespace

void write_path_csv(const Path& path, const std::string& file) {
  auto out = open_out(file);
  out << "t,x\n";
  for (std::size_t k = 0; k < path.values.size(); ++k) {
    out << format_double(static_cast<double>(k) * path.step) << ','
        << format_double(path.values[k]) << '\n';
  }
  if (!out) throw config_error("write failed: " + file);
}

Path read_path_csv(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw config_error("cannot open path CSV: " + file);
  std::string line;
  if (!std::getline(in, line) || line != "t,x")
    throw config_error("path CSV " + file + ": expected header 't,x'");
  Path p;
  std::vector<double> ts;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw config_error("path CSV " + file + ": malformed row '" + line + "'");
    ts.push_back(parse_double(std::string_view(line).substr(0, comma), file));
    p.values.push_back(parse_double(std::string_view(line).substr(comma + 1), file));
  }
  if (p.values.size() < 2) throw config_error("path CSV " + file + ": needs at least 2 rows");
  p.step = ts[1] - ts[0];
  if (!(p.step > 0.0)) throw config_error("path CSV " + file + ": non-increasing time column");
  for (std::size_t k = 1; k < ts.size(); ++k) {
    const double expected = static_cast<double>(k) * p.step;
    if (std::abs(ts[k] - expected) > 1e-9 * std::max(1.0, std::abs(expected)))
      throw config_error("path CSV " + file + ": time column is not uniformly spaced");
  }
  p.horizon = p.step * static_cast<double>(p.values.size() - 1);
  p.validate();
  return p;
}

void write_grid_csv(const std::vector<double>& y, const std::vector<double>& v,
                    const std::string& file) {
  auto out = open_out(file);
  out << "y,value\n";
  for (std::size_t j = 0; j < y.size(); ++j)
    out << format_double(y[j]) << ',' << format_double(v[j]) << '\n';
}

void write_profile_csv(const std::vector<ProfilePoint>& points, const std::string& file) {
  auto out = open_out(file);
  out << "theta,value,kind\n";
  for (const auto& p : points)
    out << format_double(p.theta) << ',' << format_double(p.value) << ','
        << likelihood_kind_name(p.kind) << '\n';
}

std::string summary_csv_text(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  out << "theta0,epsilon,delta,M,mean,sd,ci68_lo,ci68_hi,ci95_lo,ci95_hi,failures\n";
  for (const auto& r : rows) {
    out << format_double(r.theta0) << ',' << format_double(r.epsilon) << ','
        << format_double(r.delta) << ',' << r.M << ',' << format_double(r.mean) << ','
        << format_double(r.sd) << ',' << format_double(r.ci68_lo) << ','
        << format_double(r.ci68_hi) << ',' << format_double(r.ci95_lo) << ','
        << format_double(r.ci95_hi) << ',' << r.failures << '\n';
  }
  return out.str();
}

void write_summary_csv(const std::vector<SummaryRow>& rows, const std::string& file) {
  auto out = open_out(file);
  out << summary_csv_text(rows);
}

void write_hist_csv(const Histogram& h, const std::string& file) {
  auto out = open_out(file);
  out << "bin_lo,bin_hi,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    out << format_double(h.edges[i]) << ',' << format_double(h.edges[i + 1]) << ','
        << h.counts[i] << '\n';
}

void write_theory_csv(const TheoryCurve& c, const std::string& file) {
  auto out = open_out(file);
  out << "x,density\n";
  for (std::size_t i = 0; i < c.x.size(); ++i)
    out << format_double(c.x[i]) << ',' << format_double(c.density[i]) << '\n';
}

}  // namespace msde
