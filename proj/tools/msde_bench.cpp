// Benchmark: serial reference vs OpenMP kernels (replication loop and the
// blocked path-functional accumulation).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include "msde/config.hpp"
#include "msde/mc.hpp"
#include "msde/numerics.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

const char* kConfig = R"json({
  "model": {"name": "langevin-cos-sin", "options": {"D": 0.5}},
  "scale": {"epsilon": 0.1, "delta": 0.01, "regime": 1},
  "run": {"theta_true": 1.0, "T": 1.0, "step": 2e-5, "seed": 7,
          "allow_coarse_step": true, "x0": 1.0}
})json";

}  // namespace

int main(int argc, char** argv) {
  int M = 32;
  int workers =
#ifdef _OPENMP
      omp_get_max_threads();
#else
      1;
#endif
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--M" && i + 1 < argc) M = std::atoi(argv[++i]);
    else if (a == "--workers" && i + 1 < argc) workers = std::atoi(argv[++i]);
  }

  auto cfg = msde::ExperimentConfig::from_json_text(kConfig);

  std::printf("replication kernel: M=%d, n=%lld steps each\n", M,
              static_cast<long long>(cfg.horizon / cfg.effective_step()));
  double t0 = now_ms();
  auto serial = msde::run_replications(cfg, M, 42, 1);
  double t1 = now_ms();
  auto parallel = msde::run_replications(cfg, M, 42, workers);
  double t2 = now_ms();
  const bool identical = serial.estimates == parallel.estimates;
  std::printf("  serial   (1 worker)   %8.1f ms\n", t1 - t0);
  std::printf("  parallel (%d workers) %8.1f ms   speedup %.2fx   bit-identical: %s\n",
              workers, t2 - t1, (t1 - t0) / (t2 - t1), identical ? "yes" : "NO");

  constexpr std::size_t n = 10'000'000;
  auto term = [](std::size_t i) {
    const double x = 1e-7 * static_cast<double>(i);
    return std::sin(x) * 1e-3 + 1.0 / (1.0 + x);
  };
  t0 = now_ms();
  const double s1 = msde::serial_sum(n, term);
  t1 = now_ms();
  const double s2 = msde::blocked_sum(n, term);
  t2 = now_ms();
  std::printf("accumulation kernel: n=%zu terms\n", n);
  std::printf("  serial_sum  %8.1f ms   value %.17g\n", t1 - t0, s1);
  std::printf("  blocked_sum %8.1f ms   value %.17g   match: %s\n", t2 - t1, s2,
              s1 == s2 ? "yes" : "differs (expected: block order changes rounding)");
  return 0;
}
