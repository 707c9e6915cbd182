#pragma once

// Counter-free deterministic RNG utilities.
//
// Every random draw in this library flows through Splitmix64 streams whose
// seeds are derived by hashing a master seed together with structural ids
// (replicate index, block index, purpose tags).  Two runs with the same
// master seed therefore produce identical results regardless of thread
// scheduling, because each logical unit of work owns an independent stream.

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace swb {

// Finalizer from the splitmix64 generator; a strong 64-bit avalanche.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Hash a base seed with a list of structural ids into a new stream seed.
// Order-sensitive: derive_seed(s, {1, 2}) != derive_seed(s, {2, 1}).
inline std::uint64_t derive_seed(std::uint64_t base,
                                 std::initializer_list<std::uint64_t> ids) {
  std::uint64_t h = mix64(base);
  for (std::uint64_t id : ids) {
    h = mix64(h ^ mix64(id + 0x2545f4914f6cdd1dULL));
  }
  return h;
}

// Small self-contained generator: splitmix64 core with helpers for
// uniforms, Gaussians (Box-Muller, cached spare) and categorical draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1) with 53 random bits.
  double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; generates two values per transform and
  // caches the spare, so draw order stays deterministic.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = u01();
    if (u1 <= 0.0) u1 = 0x1.0p-53;  // avoid log(0)
    double u2 = u01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  bool bernoulli(double p) { return u01() < p; }

  // Sample an index from a cumulative distribution row cdf[0..n-1],
  // cdf[n-1] == 1.  Linear scan is fine for the state counts used here,
  // but binary search keeps large custom specs cheap too.
  int categorical(const double* cdf, int n) {
    double u = u01();
    int lo = 0, hi = n - 1;
    while (lo < hi) {
      int mid = (lo + hi) / 2;
      if (cdf[mid] <= u)
        lo = mid + 1;
      else
        hi = mid;
    }
    return lo;
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Purpose tags used when deriving per-task streams.  Keeping them in one
// place avoids accidental collisions between modules.
namespace seed_tag {
constexpr std::uint64_t assignment = 0x5101;
constexpr std::uint64_t trajectory = 0x5102;
constexpr std::uint64_t counterfactual = 0x5103;
constexpr std::uint64_t mc_oracle = 0x5104;
constexpr std::uint64_t clt = 0x5105;
constexpr std::uint64_t spec_draw = 0x5106;
}  // namespace seed_tag

}  // namespace swb
