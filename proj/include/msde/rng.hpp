#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace msde::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for substream `stream` of a master seed. Streams are decorrelated by
// double splitmix mixing, so replication r always sees the same draws no
// matter which worker runs it.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(splitmix64(master) ^
                    splitmix64(stream * 0x9e3779b97f4a7c15ULL + 0xda3e39cb94b95bdbULL));
}

// mt19937_64 substream with explicit Marsaglia-polar normals. The transform is
// spelled out (no std::normal_distribution) so a (master, stream) pair pins the
// byte-exact sequence independent of standard-library internals.
class NormalStream {
 public:
  NormalStream(std::uint64_t master_seed, std::uint64_t stream)
      : eng_(substream_seed(master_seed, stream)) {}

  // uniform in [0, 1), 53-bit mantissa
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace msde::rng
