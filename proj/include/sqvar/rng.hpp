#pragma once

#include <cstdint>

namespace sqvar {

// Counter-based stream derivation: mixing (seed, stream) through splitmix64
// gives independent generators whose output does not depend on scheduling.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// xoshiro256** seeded from (seed, stream). Self-contained so that draws are
// bit-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::uint64_t x = splitmix64(seed ^ (0x632be59bd9b4e019ULL * (stream + 1)));
    for (auto& si : s_) {
      x = splitmix64(x);
      si = x;
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on (0,1), never exactly 0 or 1.
  double uniform() {
    const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return u > 0.0 ? u : 0x1.0p-53;
  }

  // Standard normal via inverse-CDF transform.
  double normal();

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

// Standard normal quantile (Wichura's AS241, double precision).
double norm_quantile(double p);
// Standard normal CDF.
double norm_cdf(double z);

inline double Rng::normal() { return norm_quantile(uniform()); }

}  // namespace sqvar
