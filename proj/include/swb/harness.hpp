#pragma once

// Monte Carlo orchestration: replicated assign -> simulate -> estimate
// pipelines over (T, l, b) grids, envelope/rate summaries, and normality /
// coverage diagnostics for the block-mean difference.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "swb/bounds.hpp"
#include "swb/design.hpp"
#include "swb/estimator.hpp"
#include "swb/mdp.hpp"
#include "swb/oracle.hpp"

namespace swb {

enum class Target { gate, fate };

const char* target_name(Target t);

// Runs fn(i) for i in [0, n) across `threads` workers on contiguous index
// ranges.  Results must be written to per-index slots; aggregation order is
// then independent of the thread count.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

struct GridSpec {
  std::vector<int> T_values;
  // Exactly one pairing rule:
  //   l_values + fixed b   (block-length sweep)
  //   b_values + l_offset  (burn-in sweep with l = b + offset)
  //   pairs                (explicit (l, b) list)
  std::vector<int> l_values;
  int b_fixed = 0;
  std::vector<int> b_values;
  int l_offset = 0;
  std::vector<std::pair<int, int>> pairs;

  std::vector<std::pair<int, int>> design_pairs() const;  // validated (l, b)
};

struct ExperimentConfig {
  BenchmarkParams benchmark;              // used when spec_json is empty
  std::string spec_json;                  // inline spec JSON, optional
  Target target = Target::gate;
  GridSpec grid;
  int reps = 400;
  std::uint64_t master_seed = 20250817;
  int threads = 0;                        // 0 = hardware concurrency
  bool strict_blocks = false;             // lenient: truncate T to k*l

  void validate() const;  // throws std::invalid_argument
};

struct CellResult {
  int T = 0, l = 0, b = 0, reps = 0, k = 0;
  double truth = 0.0;
  double mean_estimate = 0.0;
  double bias = 0.0;
  double variance = 0.0;      // sample variance (n-1) of the estimates
  double mse = 0.0;           // mean of squared errors against truth
  double mc_se_of_mse = 0.0;  // sd of squared errors / sqrt(reps)
  int degenerate_count = 0;   // replicates with an empty arm
};

// Per-replicate seed: derive_seed(master_seed, {T, l, b, target, rep}).
std::uint64_t replicate_seed(std::uint64_t master_seed, int T, int l, int b,
                             Target target, int rep);

// Per-replicate estimates for one cell, in replicate order: the building
// block under run_cell, exposed so resampling-based uncertainty checks can
// reuse identical replicate streams.  degenerate_count, when non-null,
// receives the number of empty-arm replicates.
std::vector<double> cell_estimates(const FiniteMdpSpec& spec, Target target,
                                   const SwitchbackDesign& design, int reps,
                                   std::uint64_t master_seed, int threads = 0,
                                   int* degenerate_count = nullptr);

// Runs `reps` independent assign/simulate/estimate replicates for one cell
// and aggregates against the supplied truth.  Deterministic given
// master_seed at any thread count.  Simulated horizon is the design's
// covered horizon k*l.
CellResult run_cell(const FiniteMdpSpec& spec, Target target,
                    const SwitchbackDesign& design, double truth, int reps,
                    std::uint64_t master_seed, int threads = 0);

struct EnvelopePoint {
  int T = 0, l = 0, b = 0;
  double mse = 0.0;
  double mc_se = 0.0;
};

struct GridResult {
  Target target = Target::gate;
  std::vector<CellResult> cells;
  std::vector<EnvelopePoint> envelope;  // per-T minimum MSE cell
  std::optional<OlsFit> envelope_fit;   // present when >= 3 horizons
};

// Validates every cell, computes truths, then runs the grid.  Any invalid
// cell aborts before the first simulation.
GridResult run_grid(const ExperimentConfig& config);
GridResult run_grid(const ExperimentConfig& config, const FiniteMdpSpec& spec);

struct CltDiagnostics {
  int reps = 0;
  int k = 0;
  double truth = 0.0;
  double mean_estimate = 0.0;
  double sd_estimate = 0.0;            // replicate SD of tau_hat
  double coverage90 = 0.0;             // nominal-90% interval coverage
  double coverage95 = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double ks_distance = 0.0;            // standardized errors vs N(0,1)
  double v_hat = 0.0;                  // k * Var(tau_hat)
  std::optional<double> sigma_hat;     // k * Var(Delta term), when available
  std::vector<double> standardized_errors;
};

// Diagnostics from an externally supplied replicate set (also the self-test
// path: inject i.i.d. Gaussians).  delta_terms, when given, must align with
// estimates and yields sigma_hat.  Throws on reps < 100.
CltDiagnostics clt_diagnostics_from_estimates(
    const std::vector<double>& estimates, double truth, int k,
    const std::vector<double>* delta_terms = nullptr);

// Full pipeline: replicates one cell (filtered-target truth), forms the
// centered block-mean contrast per replicate for the Sigma analog, and
// computes diagnostics.  Replicate streams match run_cell's fate target.
CltDiagnostics clt_check(const FiniteMdpSpec& spec,
                         const SwitchbackDesign& design, int reps,
                         std::uint64_t master_seed, int threads = 0);

// Burn-in choice (t_mix/2) ln T rounded, with span l - b fixed; the cell
// used by the normality diagnostics.
SwitchbackDesign clt_default_cell(int T, double t_mix, int span,
                                  bool strict = false);

}  // namespace swb
