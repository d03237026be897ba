#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace msde {

// Kahan-Babuska (Neumaier) compensated accumulator. With n = 10^6 terms a
// naive double sum loses ~3 digits; this keeps path functionals near 1 ulp.
class KahanSum {
 public:
  void add(double x) {
    const double t = s_ + x;
    if (std::abs(s_) >= std::abs(x)) {
      c_ += (s_ - t) + x;
    } else {
      c_ += (x - t) + s_;
    }
    s_ = t;
  }
  void merge(const KahanSum& o) {
    add(o.s_);
    add(o.c_);
  }
  double value() const { return s_ + c_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

// Serial reference accumulation. Kept alongside the blocked kernel so tests
// and the benchmark can compare the two.
template <class Term>
double serial_sum(std::size_t n, Term&& term) {
  KahanSum acc;
  for (std::size_t i = 0; i < n; ++i) acc.add(term(i));
  return acc.value();
}

// Blocked accumulation: fixed-width blocks, per-block compensated sums,
// merged in block order. Block boundaries do not depend on the thread count,
// so the result is bit-identical for any number of OpenMP workers.
template <class Term>
double blocked_sum(std::size_t n, Term&& term) {
  constexpr std::size_t kBlock = 8192;
  if (n <= kBlock) return serial_sum(n, term);
  const std::size_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<KahanSum> partial(nblocks);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (long long b = 0; b < static_cast<long long>(nblocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = lo + kBlock < n ? lo + kBlock : n;
    KahanSum local;
    for (std::size_t i = lo; i < hi; ++i) local.add(term(i));
    partial[static_cast<std::size_t>(b)] = local;
  }
  KahanSum total;
  for (const auto& p : partial) total.merge(p);
  return total.value();
}

// Trapezoid rule over uniformly spaced samples f_0..f_{n-1} with spacing h.
inline double trapezoid_uniform(const std::vector<double>& f, double h) {
  if (f.size() < 2) return 0.0;
  KahanSum acc;
  acc.add(0.5 * f.front());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) acc.add(f[i]);
  acc.add(0.5 * f.back());
  return acc.value() * h;
}

// Golden-section search for the maximum of a unimodal function on [lo, hi].
// Tolerance is on the argument.
template <class F>
double golden_section_maximize(F&& f, double lo, double hi, double tol) {
  constexpr double invphi = 0.6180339887498948482;
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace msde
