#include "swb/harness.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "swb/errors.hpp"
#include "swb/io.hpp"
#include "swb/rng.hpp"
#include "swb/stats.hpp"

namespace swb {

const char* target_name(Target t) {
  return t == Target::gate ? "gate" : "fate";
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0) {
    unsigned hw = std::thread::hardware_concurrency();
    threads = hw > 0 ? static_cast<int>(hw) : 1;
  }
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  std::exception_ptr first_error = nullptr;
  std::mutex error_mu;
  for (int c = 0; c < threads; ++c) {
    const int lo = static_cast<int>(static_cast<long long>(n) * c / threads);
    const int hi =
        static_cast<int>(static_cast<long long>(n) * (c + 1) / threads);
    pool.emplace_back([&, lo, hi] {
      try {
        for (int i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<std::pair<int, int>> GridSpec::design_pairs() const {
  int rules = (!l_values.empty() ? 1 : 0) + (!b_values.empty() ? 1 : 0) +
              (!pairs.empty() ? 1 : 0);
  if (rules != 1)
    throw std::invalid_argument(
        "grid: exactly one of l_values, b_values, pairs must be given");
  std::vector<std::pair<int, int>> out;
  if (!l_values.empty())
    for (int l : l_values) out.emplace_back(l, b_fixed);
  else if (!b_values.empty())
    for (int b : b_values) out.emplace_back(b + l_offset, b);
  else
    out = pairs;
  if (out.empty()) throw std::invalid_argument("grid: no designs");
  return out;
}

void ExperimentConfig::validate() const {
  if (reps < 1) throw std::invalid_argument("config: reps must be >= 1");
  if (grid.T_values.empty())
    throw std::invalid_argument("config: no horizons given");
  // Materializing every design validates all cells up front.
  auto pairs = grid.design_pairs();
  for (int T : grid.T_values)
    for (auto [l, b] : pairs) SwitchbackDesign(T, l, b, strict_blocks);
}

std::uint64_t replicate_seed(std::uint64_t master_seed, int T, int l, int b,
                             Target target, int rep) {
  return derive_seed(master_seed,
                     {static_cast<std::uint64_t>(T), static_cast<std::uint64_t>(l),
                      static_cast<std::uint64_t>(b),
                      static_cast<std::uint64_t>(target == Target::fate ? 2 : 1),
                      static_cast<std::uint64_t>(rep)});
}

namespace {

struct Replicate {
  double tau_hat = 0.0;
  bool degenerate = false;
};

// One assign -> simulate -> estimate pipeline.
Replicate run_replicate(const FiniteMdpSpec& spec,
                        const SwitchbackDesign& design, std::uint64_t rep_seed) {
  AssignmentPlan plan =
      assign(design, derive_seed(rep_seed, {seed_tag::assignment}));
  Trajectory traj = simulate_trajectory(
      spec, plan.treatments, derive_seed(rep_seed, {seed_tag::trajectory}));
  EstimateReport report = dm_estimate(traj, plan, design);
  return {report.tau_hat, report.degenerate};
}

}  // namespace

std::vector<double> cell_estimates(const FiniteMdpSpec& spec, Target target,
                                   const SwitchbackDesign& design, int reps,
                                   std::uint64_t master_seed, int threads,
                                   int* degenerate_count) {
  if (reps < 1)
    throw std::invalid_argument("cell_estimates: reps must be >= 1");

  std::vector<Replicate> results(reps);
  parallel_for(reps, threads, [&](int r) {
    std::uint64_t seed =
        replicate_seed(master_seed, design.horizon(), design.block_length(),
                       design.burn_in(), target, r);
    results[r] = run_replicate(spec, design, seed);
  });

  std::vector<double> taus(reps);
  int degenerate = 0;
  for (int r = 0; r < reps; ++r) {
    taus[r] = results[r].tau_hat;
    if (results[r].degenerate) ++degenerate;
  }
  if (degenerate_count) *degenerate_count = degenerate;
  return taus;
}

CellResult run_cell(const FiniteMdpSpec& spec, Target target,
                    const SwitchbackDesign& design, double truth, int reps,
                    std::uint64_t master_seed, int threads) {
  CellResult cell;
  cell.T = design.horizon();
  cell.l = design.block_length();
  cell.b = design.burn_in();
  cell.k = design.block_count();
  cell.reps = reps;
  cell.truth = truth;

  std::vector<double> taus = cell_estimates(spec, target, design, reps,
                                            master_seed, threads,
                                            &cell.degenerate_count);
  std::vector<double> sq_errors(reps);
  for (int r = 0; r < reps; ++r) {
    double e = taus[r] - truth;
    sq_errors[r] = e * e;
  }
  cell.mean_estimate = mean(taus);
  cell.bias = cell.mean_estimate - truth;
  cell.variance = reps >= 2 ? sample_variance(taus) : 0.0;
  cell.mse = mean(sq_errors);
  cell.mc_se_of_mse =
      reps >= 2 ? sample_sd(sq_errors) / std::sqrt(static_cast<double>(reps))
                : 0.0;
  return cell;
}

GridResult run_grid(const ExperimentConfig& config) {
  FiniteMdpSpec spec = config.spec_json.empty()
                           ? build_benchmark(config.benchmark)
                           : load_spec_json(config.spec_json);
  return run_grid(config, spec);
}

GridResult run_grid(const ExperimentConfig& config, const FiniteMdpSpec& spec) {
  config.validate();

  // Materialize all cells and truths before simulating anything.
  struct PendingCell {
    SwitchbackDesign design;
    double truth;
  };
  std::vector<PendingCell> pending;
  auto pairs = config.grid.design_pairs();
  for (int T : config.grid.T_values) {
    for (auto [l, b] : pairs) {
      SwitchbackDesign design(T, l, b, config.strict_blocks);
      double truth = config.target == Target::gate
                         ? gate(spec, design.covered_horizon())
                         : fate(spec, filtered_index_set(design));
      pending.push_back({design, truth});
    }
  }

  GridResult grid;
  grid.target = config.target;
  grid.cells.reserve(pending.size());
  for (const auto& pc : pending)
    grid.cells.push_back(run_cell(spec, config.target, pc.design, pc.truth,
                                  config.reps, config.master_seed,
                                  config.threads));

  for (int T : config.grid.T_values) {
    const CellResult* best = nullptr;
    for (const auto& c : grid.cells)
      if (c.T == T && (!best || c.mse < best->mse)) best = &c;
    if (best)
      grid.envelope.push_back({best->T, best->l, best->b, best->mse,
                               best->mc_se_of_mse});
  }
  if (grid.envelope.size() >= 3) {
    std::vector<RatePoint> pts;
    for (const auto& e : grid.envelope)
      pts.push_back({static_cast<double>(e.T), e.mse});
    grid.envelope_fit = fit_rate(pts);
  }
  return grid;
}

CltDiagnostics clt_diagnostics_from_estimates(
    const std::vector<double>& estimates, double truth, int k,
    const std::vector<double>* delta_terms) {
  const int reps = static_cast<int>(estimates.size());
  if (reps < 100)
    throw std::invalid_argument(
        "clt diagnostics: need at least 100 replicates");
  if (k < 1) throw std::invalid_argument("clt diagnostics: k must be >= 1");
  if (delta_terms && delta_terms->size() != estimates.size())
    throw std::invalid_argument("clt diagnostics: delta/estimate mismatch");

  CltDiagnostics d;
  d.reps = reps;
  d.k = k;
  d.truth = truth;
  d.mean_estimate = mean(estimates);
  d.sd_estimate = sample_sd(estimates);
  if (!(d.sd_estimate > 0.0))
    throw std::invalid_argument("clt diagnostics: zero replicate variance");

  const double z90 = 1.6448536269514722;
  const double z95 = 1.9599639845400545;
  int in90 = 0, in95 = 0;
  d.standardized_errors.resize(reps);
  for (int r = 0; r < reps; ++r) {
    double err = estimates[r] - truth;
    d.standardized_errors[r] = err / d.sd_estimate;
    if (std::abs(err) <= z90 * d.sd_estimate) ++in90;
    if (std::abs(err) <= z95 * d.sd_estimate) ++in95;
  }
  d.coverage90 = static_cast<double>(in90) / reps;
  d.coverage95 = static_cast<double>(in95) / reps;
  d.skewness = skewness(estimates);
  d.excess_kurtosis = excess_kurtosis(estimates);
  d.ks_distance = ks_distance_to_normal(d.standardized_errors);
  d.v_hat = k * sample_variance(estimates);
  if (delta_terms) d.sigma_hat = k * sample_variance(*delta_terms);
  return d;
}

CltDiagnostics clt_check(const FiniteMdpSpec& spec,
                         const SwitchbackDesign& design, int reps,
                         std::uint64_t master_seed, int threads) {
  if (reps < 100)
    throw std::invalid_argument("clt_check: need at least 100 replicates");
  const int k = design.block_count();
  const double truth = fate(spec, filtered_index_set(design));
  const double pure0 = pure_outcome_mean(spec, 0);
  const double pure1 = pure_outcome_mean(spec, 1);

  std::vector<double> taus(reps), deltas(reps);
  parallel_for(reps, threads, [&](int r) {
    std::uint64_t seed =
        replicate_seed(master_seed, design.horizon(), design.block_length(),
                       design.burn_in(), Target::fate, r);
    AssignmentPlan plan =
        assign(design, derive_seed(seed, {seed_tag::assignment}));
    Trajectory traj = simulate_trajectory(
        spec, plan.treatments, derive_seed(seed, {seed_tag::trajectory}));
    EstimateReport report = dm_estimate(traj, plan, design);
    taus[r] = report.tau_hat;
    // Centered block-mean contrast with fixed 2/k weights: the linear term
    // whose k-scaled variance plays the role of Sigma in the normal limit.
    KahanSum acc;
    for (const auto& bm : report.block_means) {
      if (bm.treatment == 1)
        acc.add(bm.mean - pure1);
      else
        acc.add(-(bm.mean - pure0));
    }
    deltas[r] = 2.0 * acc.value() / static_cast<double>(k);
  });

  return clt_diagnostics_from_estimates(taus, truth, k, &deltas);
}

SwitchbackDesign clt_default_cell(int T, double t_mix, int span, bool strict) {
  if (span < 1) throw std::invalid_argument("clt_default_cell: span >= 1");
  int b = static_cast<int>(
      std::lround(t_mix / 2.0 * std::log(static_cast<double>(T))));
  b = std::max(0, b);
  return SwitchbackDesign(T, b + span, b, strict);
}

}  // namespace swb
