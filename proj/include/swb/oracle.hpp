#pragma once

// Ground-truth estimands for finite-state specs: stable per-period effects,
// their horizon averages (GATE) and filtered averages (FATE), computed
// exactly via stationary solves / forward propagation, plus Monte Carlo
// cross-checks and per-block counterfactual means.

#include <array>
#include <cstdint>
#include <vector>

#include "swb/design.hpp"
#include "swb/mdp.hpp"

namespace swb {

// Unique stationary distribution of a row-stochastic kernel via a direct
// linear solve.  Throws NonErgodicError when the stationary distribution is
// not unique (rank deficiency beyond the expected single null direction)
// and std::runtime_error when the solve misses the residual tolerance
// ||pi * P - pi||_1 < tol.
Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& kernel,
                                        double tol = 1e-12);

// Mean outcome at period t under the infinite all-w treatment history.
// Homogeneous specs: the stationary mean of mu(., w) under kernel w
// (independent of t).  Piecewise schedules: the first segment's stationary
// law (or, when pw.pre_steps is set, the initial distribution propagated
// that many steps) pushed forward to t under the schedule's w-kernels.
double pure_outcome_mean(const FiniteMdpSpec& spec, int w, int t = 1);
double pure_outcome_mean(const PiecewiseSpec& pw, int w, int t);

// tau_t = pure_outcome_mean(spec, 1, t) - pure_outcome_mean(spec, 0, t).
double stable_effect(const FiniteMdpSpec& spec, int t = 1);
double stable_effect(const PiecewiseSpec& pw, int t);

// tau_1..tau_T in one pass (cheap for homogeneous specs, a single forward
// propagation per arm for piecewise ones).
std::vector<double> tau_trace(const FiniteMdpSpec& spec, int T);
std::vector<double> tau_trace(const PiecewiseSpec& pw, int T);

// Mean of tau_t over t = 1..T.
double gate(const FiniteMdpSpec& spec, int T);
double gate(const PiecewiseSpec& pw, int T);

// Mean of tau_t over a nonempty 1-based index set.
double fate(const FiniteMdpSpec& spec, const std::vector<int>& index_set);
double fate(const PiecewiseSpec& pw, const std::vector<int>& index_set);

struct EstimandReport {
  std::vector<double> tau_t_trace;  // tau_1..tau_T
  double tau_gate = 0.0;
  double tau_fate = 0.0;
  std::vector<int> filter_set;
  double psi_hat = 0.0;  // max_t tau_t - min_t tau_t over the trace
};

EstimandReport estimand_report(const FiniteMdpSpec& spec, int T,
                               const std::vector<int>& filter_set);
EstimandReport estimand_report(const PiecewiseSpec& pw, int T,
                               const std::vector<int>& filter_set);

struct McEstimate {
  double value = 0.0;
  double se = 0.0;  // NaN when reps < 2
};

// Independent Monte Carlo counterpart of pure_outcome_mean: simulates
// `reps` constant-w trajectories of length burn_steps + t and averages the
// outcome at the final target period.
McEstimate mc_pure_outcome_mean(const FiniteMdpSpec& spec, int w, int t,
                                int reps, int burn_steps, std::uint64_t seed);

struct BlockCounterfactuals {
  // Exact per-block averages, over the block's non-burn-in periods, of the
  // pure-arm outcome means (both arms per block).
  std::vector<std::array<double, 2>> bmu;
  // Monte Carlo realized block means when block i's assignment is forced
  // to w while every other block keeps the plan's draw.
  std::vector<std::array<McEstimate, 2>> bM;
};

BlockCounterfactuals block_counterfactuals(const FiniteMdpSpec& spec,
                                           const SwitchbackDesign& design,
                                           const AssignmentPlan& plan,
                                           int reps, std::uint64_t seed);

}  // namespace swb
