#pragma once

// Finite-state, binary-action controlled Markov chains: representation,
// simulation, and contraction (mixing) diagnostics.
//
// Conventions used throughout the library:
//   * Time is 1-based: a trajectory covers t = 1..T.
//   * States are 0-based indices into the kernel matrices.
//   * Actions (treatments) are w in {0, 1}.
//   * The state entering period 1 is drawn by propagating initial_dist one
//     step under the kernel of the first period's treatment, so that S_1
//     already reflects one application of the dynamics ("W_0 = W_1").

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "swb/rng.hpp"

namespace swb {

class FiniteMdpSpec {
 public:
  // kernels: row-stochastic n x n; outcome_mean: n x 2 (column w);
  // initial_dist: length n.  Validates invariants, throws
  // std::invalid_argument on violation.
  FiniteMdpSpec(Eigen::MatrixXd kernel0, Eigen::MatrixXd kernel1,
                Eigen::MatrixXd outcome_mean, double noise_sd,
                Eigen::VectorXd initial_dist);

  int state_count() const { return n_; }
  const Eigen::MatrixXd& kernel(int w) const { return w ? kernel1_ : kernel0_; }
  const Eigen::MatrixXd& outcome_mean() const { return outcome_mean_; }
  double mu(int s, int w) const { return outcome_mean_(s, w); }
  double noise_sd() const { return noise_sd_; }
  const Eigen::VectorXd& initial_dist() const { return initial_dist_; }

  // max_{s,w} |mu(s,w)|: the almost-sure bound on the conditional outcome
  // mean used by the theory bounds.
  double outcome_mean_bound() const { return lambda_; }

  // Row-wise cumulative distribution for fast sampling; cdf_row(w, s)
  // points at n doubles with last entry 1.
  const double* cdf_row(int w, int s) const {
    return (w ? cdf1_ : cdf0_).data() + static_cast<std::size_t>(s) * n_;
  }
  const double* initial_cdf() const { return cdf_init_.data(); }

 private:
  int n_;
  Eigen::MatrixXd kernel0_, kernel1_;
  Eigen::MatrixXd outcome_mean_;
  double noise_sd_;
  Eigen::VectorXd initial_dist_;
  double lambda_;
  std::vector<double> cdf0_, cdf1_, cdf_init_;
};

// Three-market-condition / capped-inventory benchmark system.  The joint
// state is (M, H) with M in {1..markets}, H in {0..hidden_cap}, flattened
// as index (M-1)*(hidden_cap+1) + H.
//
// Dynamics per period, given treatment w:
//   M' ~ stay at M with probability stay_prob, else uniform over the other
//        market conditions;
//   H' = min(H + M, hidden_cap) with probability up_prob (treated or
//        control), else max(H - M, 0);
//   Y  = H + effect_multiplier * w * H + noise.
struct BenchmarkParams {
  int market_states = 3;
  int hidden_cap = 10;
  double stay_prob = 0.6;  // set to 2.0/3.0 for the uniform-redraw variant
  double up_prob_treated = 0.7;
  double up_prob_control = 0.3;
  double effect_multiplier = 0.5;
  double noise_sd = 3.0;
  int initial_hidden = 0;  // M_0 uniform, H_0 fixed at this level
};

FiniteMdpSpec build_benchmark(const BenchmarkParams& params = {});

// Flattened-state helpers for the benchmark layout.
inline int benchmark_state_index(const BenchmarkParams& p, int m, int h) {
  return (m - 1) * (p.hidden_cap + 1) + h;
}

struct Trajectory {
  int horizon = 0;                   // T
  std::vector<int> treatments;       // W_1..W_T (values 0/1)
  std::vector<int> states;           // S_1..S_T (0-based indices)
  std::vector<double> outcomes;      // Y_1..Y_T
  std::uint64_t seed = 0;            // stream seed that generated the run
};

// Simulates one trajectory under the given treatment path.  Deterministic
// given (spec, treatments, seed).  Throws std::invalid_argument on an empty
// treatment path.
Trajectory simulate_trajectory(const FiniteMdpSpec& spec,
                               const std::vector<int>& treatments,
                               std::uint64_t seed);

// One-step push-forward dist * kernel.  Throws std::invalid_argument on a
// dimension mismatch.
Eigen::VectorXd step_distribution(const Eigen::VectorXd& dist,
                                  const Eigen::MatrixXd& kernel);

// Maximal total-variation distance between kernel rows; the one-step TV
// contraction factor of the push-forward map is at most this value.
double dobrushin_coefficient(const Eigen::MatrixXd& kernel);

// Dobrushin coefficients of kernel^j for j = 1..max_lag.  Nonincreasing in
// j by sub-multiplicativity.
std::vector<double> contraction_profile(const Eigen::MatrixXd& kernel,
                                        int max_lag);

// Lags at or above 1 - kContractionTol are treated as "no contraction yet";
// exact-arithmetic ties at 1 would otherwise wobble in floating point.
constexpr double kContractionTol = 1e-9;

struct MixingFit {
  double t_mix = 0.0;          // fitted geometric decay scale (worst action)
  int first_contracting_lag = 0;  // smallest j with delta(P^j) < 1, worst action
  std::vector<double> profile0, profile1;  // per-action contraction profiles
};

// Fits a mixing time from the contraction profiles of both action kernels:
// per action, t_w = min over lags j with delta(j) < 1 of -j / ln delta(j)
// (0 when delta(j) = 0, the instant-mixing convention); the reported t_mix
// is the worst (largest) action's value.  Throws NonMixingError when some
// action never contracts within max_lag.
MixingFit estimate_mixing_time(const FiniteMdpSpec& spec, int max_lag = 64);

// Piecewise-homogeneous schedule: segment j applies to periods
// t in [segment_starts[j], segment_starts[j+1]).  All segments share a
// state space; segment 0 must start at t = 1.
struct PiecewiseSpec {
  std::vector<int> segment_starts;
  std::vector<FiniteMdpSpec> segments;

  // Infinite-history laws are realized either exactly (stationary law of
  // the first segment, when pre_steps is empty) or by propagating the first
  // segment's initial distribution pre_steps times before period 1.
  std::optional<int> pre_steps;

  const FiniteMdpSpec& segment_at(int t) const;
  void validate() const;  // throws std::invalid_argument
};

Trajectory simulate_trajectory(const PiecewiseSpec& pw,
                               const std::vector<int>& treatments,
                               std::uint64_t seed);

}  // namespace swb
