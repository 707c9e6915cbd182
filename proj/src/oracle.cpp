#include "swb/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "swb/errors.hpp"
#include "swb/stats.hpp"

namespace swb {

Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& kernel,
                                        double tol) {
  const int n = static_cast<int>(kernel.rows());
  if (n <= 0 || kernel.cols() != n)
    throw std::invalid_argument("stationary_distribution: kernel not square");

  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) - kernel.transpose();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
  qr.setThreshold(1e-9);
  if (qr.rank() < n - 1)
    throw NonErgodicError(
        "stationary_distribution: multiple stationary distributions");

  // Solve the consistent overdetermined system [I - P'; 1'] pi = [0; 1].
  Eigen::MatrixXd a(n + 1, n);
  a.topRows(n) = m;
  a.bottomRows(1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs(n) = 1.0;
  Eigen::VectorXd pi = a.colPivHouseholderQr().solve(rhs);

  for (int s = 0; s < n; ++s) {
    if (pi(s) < -1e-9)
      throw NonErgodicError(
          "stationary_distribution: solution has negative mass");
    if (pi(s) < 0.0) pi(s) = 0.0;
  }
  pi /= pi.sum();

  double residual = (kernel.transpose() * pi - pi).cwiseAbs().sum();
  if (!(residual < tol))
    throw std::runtime_error(
        "stationary_distribution: residual " + std::to_string(residual) +
        " exceeds tolerance");
  return pi;
}

double pure_outcome_mean(const FiniteMdpSpec& spec, int w, int /*t*/) {
  if (w != 0 && w != 1)
    throw std::invalid_argument("pure_outcome_mean: w must be 0 or 1");
  Eigen::VectorXd pi;
  try {
    pi = stationary_distribution(spec.kernel(w));
  } catch (const NonErgodicError& e) {
    throw NonMixingError(e.what());
  }
  return pi.dot(spec.outcome_mean().col(w));
}

namespace {

// Laws of S_1..S_T under the constant-w infinite history, as rows of a
// forward propagation; returns E[Y_t | all-w] for t = 1..T.
std::vector<double> pure_mean_trace(const PiecewiseSpec& pw, int w, int T) {
  pw.validate();
  if (w != 0 && w != 1)
    throw std::invalid_argument("pure_outcome_mean: w must be 0 or 1");
  if (T < 1) throw std::invalid_argument("pure_outcome_mean: t must be >= 1");

  const FiniteMdpSpec& first = pw.segments.front();
  Eigen::VectorXd law;
  if (pw.pre_steps) {
    law = first.initial_dist();
    for (int i = 0; i < *pw.pre_steps; ++i)
      law = step_distribution(law, first.kernel(w));
  } else {
    try {
      law = stationary_distribution(first.kernel(w));
    } catch (const NonErgodicError& e) {
      throw NonMixingError(e.what());
    }
  }

  std::vector<double> out(T);
  for (int t = 1; t <= T; ++t) {
    const FiniteMdpSpec& seg = pw.segment_at(t);
    out[t - 1] = law.dot(seg.outcome_mean().col(w));
    if (t < T) law = step_distribution(law, seg.kernel(w));
  }
  return out;
}

double trace_mean(const std::vector<double>& trace,
                  const std::vector<int>& index_set) {
  if (index_set.empty())
    throw std::invalid_argument("fate: empty index set");
  KahanSum s;
  for (int t : index_set) {
    if (t < 1 || t > static_cast<int>(trace.size()))
      throw std::invalid_argument("fate: index outside the computed trace");
    s.add(trace[t - 1]);
  }
  return s.value() / static_cast<double>(index_set.size());
}

}  // namespace

double pure_outcome_mean(const PiecewiseSpec& pw, int w, int t) {
  return pure_mean_trace(pw, w, t).back();
}

double stable_effect(const FiniteMdpSpec& spec, int t) {
  return pure_outcome_mean(spec, 1, t) - pure_outcome_mean(spec, 0, t);
}

double stable_effect(const PiecewiseSpec& pw, int t) {
  return pure_outcome_mean(pw, 1, t) - pure_outcome_mean(pw, 0, t);
}

std::vector<double> tau_trace(const FiniteMdpSpec& spec, int T) {
  if (T < 1) throw std::invalid_argument("tau_trace: T must be >= 1");
  return std::vector<double>(T, stable_effect(spec));
}

std::vector<double> tau_trace(const PiecewiseSpec& pw, int T) {
  if (T < 1) throw std::invalid_argument("tau_trace: T must be >= 1");
  std::vector<double> t1 = pure_mean_trace(pw, 1, T);
  std::vector<double> t0 = pure_mean_trace(pw, 0, T);
  std::vector<double> out(T);
  for (int t = 0; t < T; ++t) out[t] = t1[t] - t0[t];
  return out;
}

double gate(const FiniteMdpSpec& spec, int T) {
  if (T < 1) throw std::invalid_argument("gate: T must be >= 1");
  return stable_effect(spec);
}

double gate(const PiecewiseSpec& pw, int T) {
  std::vector<double> trace = tau_trace(pw, T);
  KahanSum s;
  for (double v : trace) s.add(v);
  return s.value() / static_cast<double>(T);
}

double fate(const FiniteMdpSpec& spec, const std::vector<int>& index_set) {
  if (index_set.empty()) throw std::invalid_argument("fate: empty index set");
  for (int t : index_set)
    if (t < 1) throw std::invalid_argument("fate: indices must be >= 1");
  return stable_effect(spec);
}

double fate(const PiecewiseSpec& pw, const std::vector<int>& index_set) {
  if (index_set.empty()) throw std::invalid_argument("fate: empty index set");
  int T = *std::max_element(index_set.begin(), index_set.end());
  return trace_mean(tau_trace(pw, T), index_set);
}

namespace {

EstimandReport report_from_trace(std::vector<double> trace,
                                 const std::vector<int>& filter_set) {
  EstimandReport rep;
  KahanSum g;
  for (double v : trace) g.add(v);
  rep.tau_gate = g.value() / static_cast<double>(trace.size());
  rep.tau_fate = trace_mean(trace, filter_set);
  auto [lo, hi] = std::minmax_element(trace.begin(), trace.end());
  rep.psi_hat = *hi - *lo;
  rep.filter_set = filter_set;
  rep.tau_t_trace = std::move(trace);
  return rep;
}

}  // namespace

EstimandReport estimand_report(const FiniteMdpSpec& spec, int T,
                               const std::vector<int>& filter_set) {
  return report_from_trace(tau_trace(spec, T), filter_set);
}

EstimandReport estimand_report(const PiecewiseSpec& pw, int T,
                               const std::vector<int>& filter_set) {
  return report_from_trace(tau_trace(pw, T), filter_set);
}

McEstimate mc_pure_outcome_mean(const FiniteMdpSpec& spec, int w, int t,
                                int reps, int burn_steps, std::uint64_t seed) {
  if (reps < 1) throw std::invalid_argument("mc_pure_outcome_mean: reps >= 1");
  if (t < 1) throw std::invalid_argument("mc_pure_outcome_mean: t >= 1");
  if (burn_steps < 0)
    throw std::invalid_argument("mc_pure_outcome_mean: burn_steps >= 0");

  std::vector<int> treatments(static_cast<std::size_t>(burn_steps) + t, w);
  std::vector<double> draws(reps);
  for (int r = 0; r < reps; ++r) {
    Trajectory traj = simulate_trajectory(
        spec, treatments,
        derive_seed(seed, {seed_tag::mc_oracle, static_cast<std::uint64_t>(r)}));
    draws[r] = traj.outcomes.back();
  }
  McEstimate est;
  est.value = mean(draws);
  est.se = reps >= 2 ? sample_sd(draws) / std::sqrt(static_cast<double>(reps))
                     : std::numeric_limits<double>::quiet_NaN();
  return est;
}

BlockCounterfactuals block_counterfactuals(const FiniteMdpSpec& spec,
                                           const SwitchbackDesign& design,
                                           const AssignmentPlan& plan,
                                           int reps, std::uint64_t seed) {
  if (reps < 1) throw std::invalid_argument("block_counterfactuals: reps >= 1");
  const int k = design.block_count();
  const int l = design.block_length();
  const int b = design.burn_in();
  if (static_cast<int>(plan.block_treatments.size()) != k)
    throw std::invalid_argument("block_counterfactuals: plan/design mismatch");

  BlockCounterfactuals out;
  out.bmu.resize(k);
  out.bM.resize(k);

  // Homogeneous spec: each arm's pure mean is block-independent.
  const double pure[2] = {pure_outcome_mean(spec, 0), pure_outcome_mean(spec, 1)};
  for (int i = 0; i < k; ++i) out.bmu[i] = {pure[0], pure[1]};

  std::vector<int> treatments(static_cast<std::size_t>(k) * l);
  std::vector<double> draws(reps);
  for (int i = 0; i < k; ++i) {
    for (int w = 0; w < 2; ++w) {
      // Force block i to w, keep all other blocks per plan.
      for (int j = 0; j < k; ++j) {
        int z = (j == i) ? w : plan.block_treatments[j];
        for (int s = 0; s < l; ++s)
          treatments[static_cast<std::size_t>(j) * l + s] = z;
      }
      for (int r = 0; r < reps; ++r) {
        Trajectory traj = simulate_trajectory(
            spec, treatments,
            derive_seed(seed, {seed_tag::counterfactual,
                               static_cast<std::uint64_t>(i),
                               static_cast<std::uint64_t>(w),
                               static_cast<std::uint64_t>(r)}));
        double sum = 0.0;
        for (int s = b + 1; s <= l; ++s) sum += traj.outcomes[i * l + s - 1];
        draws[r] = sum / static_cast<double>(l - b);
      }
      out.bM[i][w].value = mean(draws);
      out.bM[i][w].se =
          reps >= 2 ? sample_sd(draws) / std::sqrt(static_cast<double>(reps))
                    : std::numeric_limits<double>::quiet_NaN();
    }
  }
  return out;
}

}  // namespace swb
