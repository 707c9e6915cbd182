#include "swb/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "swb/errors.hpp"

namespace swb {

namespace {

constexpr double kRowSumTol = 1e-12;

void build_cdf(const Eigen::MatrixXd& kernel, std::vector<double>& out) {
  const int n = static_cast<int>(kernel.rows());
  out.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int s = 0; s < n; ++s) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      acc += kernel(s, j);
      out[static_cast<std::size_t>(s) * n + j] = acc;
    }
    // Pin the final entry so sampling can never fall off the row.
    out[static_cast<std::size_t>(s) * n + (n - 1)] = 1.0;
  }
}

void check_stochastic(const Eigen::MatrixXd& kernel, const char* name) {
  if (kernel.rows() != kernel.cols())
    throw std::invalid_argument(std::string(name) + ": kernel must be square");
  for (int s = 0; s < kernel.rows(); ++s) {
    double row_sum = 0.0;
    for (int j = 0; j < kernel.cols(); ++j) {
      double p = kernel(s, j);
      if (!(p >= -kRowSumTol && p <= 1.0 + kRowSumTol))
        throw std::invalid_argument(std::string(name) +
                                    ": kernel entry outside [0, 1]");
      row_sum += p;
    }
    if (std::abs(row_sum - 1.0) > kRowSumTol)
      throw std::invalid_argument(std::string(name) +
                                  ": kernel row does not sum to 1");
  }
}

}  // namespace

FiniteMdpSpec::FiniteMdpSpec(Eigen::MatrixXd kernel0, Eigen::MatrixXd kernel1,
                             Eigen::MatrixXd outcome_mean, double noise_sd,
                             Eigen::VectorXd initial_dist)
    : n_(static_cast<int>(kernel0.rows())),
      kernel0_(std::move(kernel0)),
      kernel1_(std::move(kernel1)),
      outcome_mean_(std::move(outcome_mean)),
      noise_sd_(noise_sd),
      initial_dist_(std::move(initial_dist)) {
  if (n_ <= 0) throw std::invalid_argument("spec: empty state space");
  check_stochastic(kernel0_, "kernel0");
  check_stochastic(kernel1_, "kernel1");
  if (kernel1_.rows() != n_)
    throw std::invalid_argument("spec: kernel dimension mismatch");
  if (outcome_mean_.rows() != n_ || outcome_mean_.cols() != 2)
    throw std::invalid_argument("spec: outcome_mean must be n x 2");
  if (!outcome_mean_.allFinite())
    throw std::invalid_argument("spec: outcome_mean has non-finite entries");
  if (!(noise_sd_ >= 0.0))
    throw std::invalid_argument("spec: noise_sd must be nonnegative");
  if (initial_dist_.size() != n_)
    throw std::invalid_argument("spec: initial_dist dimension mismatch");
  double init_sum = 0.0;
  for (int s = 0; s < n_; ++s) {
    if (initial_dist_(s) < -kRowSumTol)
      throw std::invalid_argument("spec: initial_dist has negative entries");
    init_sum += initial_dist_(s);
  }
  if (std::abs(init_sum - 1.0) > kRowSumTol)
    throw std::invalid_argument("spec: initial_dist does not sum to 1");

  lambda_ = outcome_mean_.cwiseAbs().maxCoeff();
  build_cdf(kernel0_, cdf0_);
  build_cdf(kernel1_, cdf1_);
  cdf_init_.resize(n_);
  double acc = 0.0;
  for (int s = 0; s < n_; ++s) {
    acc += initial_dist_(s);
    cdf_init_[s] = acc;
  }
  cdf_init_[n_ - 1] = 1.0;
}

FiniteMdpSpec build_benchmark(const BenchmarkParams& p) {
  if (p.market_states < 1 || p.hidden_cap < 0)
    throw std::invalid_argument("benchmark: empty state space");
  if (!(p.stay_prob >= 0.0 && p.stay_prob <= 1.0))
    throw std::invalid_argument("benchmark: stay_prob outside [0, 1]");
  for (double q : {p.up_prob_treated, p.up_prob_control})
    if (!(q >= 0.0 && q <= 1.0))
      throw std::invalid_argument("benchmark: up-probability outside [0, 1]");
  if (p.initial_hidden < 0 || p.initial_hidden > p.hidden_cap)
    throw std::invalid_argument("benchmark: initial_hidden outside range");

  const int nm = p.market_states;
  const int nh = p.hidden_cap + 1;
  const int n = nm * nh;
  const double off_prob =
      nm > 1 ? (1.0 - p.stay_prob) / static_cast<double>(nm - 1) : 0.0;

  Eigen::MatrixXd market(nm, nm);
  for (int a = 0; a < nm; ++a)
    for (int b = 0; b < nm; ++b)
      market(a, b) = (a == b) ? (nm > 1 ? p.stay_prob : 1.0) : off_prob;

  auto idx = [nh](int m, int h) { return m * nh + h; };  // m, h 0-based here

  Eigen::MatrixXd kernels[2] = {Eigen::MatrixXd::Zero(n, n),
                                Eigen::MatrixXd::Zero(n, n)};
  for (int w = 0; w < 2; ++w) {
    const double up = w ? p.up_prob_treated : p.up_prob_control;
    for (int m = 0; m < nm; ++m) {
      const int move = m + 1;  // market conditions are 1-based magnitudes
      for (int h = 0; h < nh; ++h) {
        const int h_up = std::min(h + move, p.hidden_cap);
        const int h_dn = std::max(h - move, 0);
        for (int m2 = 0; m2 < nm; ++m2) {
          kernels[w](idx(m, h), idx(m2, h_up)) += market(m, m2) * up;
          kernels[w](idx(m, h), idx(m2, h_dn)) += market(m, m2) * (1.0 - up);
        }
      }
    }
  }

  Eigen::MatrixXd outcome(n, 2);
  for (int m = 0; m < nm; ++m)
    for (int h = 0; h < nh; ++h) {
      outcome(idx(m, h), 0) = h;
      outcome(idx(m, h), 1) = h * (1.0 + p.effect_multiplier);
    }

  Eigen::VectorXd init = Eigen::VectorXd::Zero(n);
  for (int m = 0; m < nm; ++m)
    init(idx(m, p.initial_hidden)) = 1.0 / static_cast<double>(nm);

  return FiniteMdpSpec(std::move(kernels[0]), std::move(kernels[1]),
                       std::move(outcome), p.noise_sd, std::move(init));
}

namespace {

// Shared simulation loop; spec_at(t) resolves the kernel set for period t
// (constant for homogeneous specs).
template <typename SpecAt>
Trajectory simulate_impl(SpecAt&& spec_at, const std::vector<int>& treatments,
                         std::uint64_t seed) {
  const int T = static_cast<int>(treatments.size());
  if (T == 0)
    throw std::invalid_argument("simulate_trajectory: empty treatment path");
  for (int w : treatments)
    if (w != 0 && w != 1)
      throw std::invalid_argument("simulate_trajectory: treatments must be 0/1");

  Trajectory traj;
  traj.horizon = T;
  traj.treatments = treatments;
  traj.states.resize(T);
  traj.outcomes.resize(T);
  traj.seed = seed;

  Rng rng(seed);
  const FiniteMdpSpec& first = spec_at(1);
  const int n = first.state_count();

  // Entry state: initial_dist pushed one step under period 1's kernel.
  int s = rng.categorical(first.initial_cdf(), n);
  s = rng.categorical(first.cdf_row(treatments[0], s), n);

  for (int t = 1; t <= T; ++t) {
    const FiniteMdpSpec& sp = spec_at(t);
    const int w = treatments[t - 1];
    traj.states[t - 1] = s;
    double y = sp.mu(s, w);
    if (sp.noise_sd() > 0.0) y += sp.noise_sd() * rng.normal();
    traj.outcomes[t - 1] = y;
    if (t < T) s = rng.categorical(sp.cdf_row(w, s), n);
  }
  return traj;
}

}  // namespace

Trajectory simulate_trajectory(const FiniteMdpSpec& spec,
                               const std::vector<int>& treatments,
                               std::uint64_t seed) {
  return simulate_impl([&spec](int) -> const FiniteMdpSpec& { return spec; },
                       treatments, seed);
}

Trajectory simulate_trajectory(const PiecewiseSpec& pw,
                               const std::vector<int>& treatments,
                               std::uint64_t seed) {
  pw.validate();
  return simulate_impl(
      [&pw](int t) -> const FiniteMdpSpec& { return pw.segment_at(t); },
      treatments, seed);
}

Eigen::VectorXd step_distribution(const Eigen::VectorXd& dist,
                                  const Eigen::MatrixXd& kernel) {
  if (dist.size() != kernel.rows())
    throw std::invalid_argument("step_distribution: dimension mismatch");
  return kernel.transpose() * dist;
}

double dobrushin_coefficient(const Eigen::MatrixXd& kernel) {
  const int n = static_cast<int>(kernel.rows());
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double tv = 0.5 * (kernel.row(i) - kernel.row(j)).cwiseAbs().sum();
      if (tv > worst) worst = tv;
    }
  return worst;
}

std::vector<double> contraction_profile(const Eigen::MatrixXd& kernel,
                                        int max_lag) {
  if (max_lag < 1)
    throw std::invalid_argument("contraction_profile: max_lag must be >= 1");
  std::vector<double> deltas;
  deltas.reserve(max_lag);
  Eigen::MatrixXd power = kernel;
  deltas.push_back(dobrushin_coefficient(power));
  for (int j = 2; j <= max_lag; ++j) {
    power = power * kernel;
    deltas.push_back(dobrushin_coefficient(power));
  }
  return deltas;
}

MixingFit estimate_mixing_time(const FiniteMdpSpec& spec, int max_lag) {
  MixingFit fit;
  fit.profile0 = contraction_profile(spec.kernel(0), max_lag);
  fit.profile1 = contraction_profile(spec.kernel(1), max_lag);

  double t_mix = 0.0;
  int worst_first_lag = 0;
  for (const auto* profile : {&fit.profile0, &fit.profile1}) {
    double best = -1.0;  // min over contracting lags of -j / ln delta
    int first_lag = 0;
    for (int j = 1; j <= max_lag; ++j) {
      double d = (*profile)[j - 1];
      if (d >= 1.0 - kContractionTol) continue;
      if (first_lag == 0) first_lag = j;
      double t = d <= 0.0 ? 0.0 : -static_cast<double>(j) / std::log(d);
      if (best < 0.0 || t < best) best = t;
    }
    if (best < 0.0)
      throw NonMixingError("estimate_mixing_time: no contraction within lag " +
                           std::to_string(max_lag));
    if (best > t_mix) {
      t_mix = best;
      worst_first_lag = first_lag;
    }
    if (worst_first_lag == 0) worst_first_lag = first_lag;
  }
  fit.t_mix = t_mix;
  fit.first_contracting_lag = worst_first_lag;
  return fit;
}

const FiniteMdpSpec& PiecewiseSpec::segment_at(int t) const {
  if (t < 1 || segments.empty())
    throw std::invalid_argument("PiecewiseSpec: time outside schedule");
  std::size_t j = 0;
  while (j + 1 < segment_starts.size() && t >= segment_starts[j + 1]) ++j;
  return segments[j];
}

void PiecewiseSpec::validate() const {
  if (segments.empty() || segment_starts.size() != segments.size())
    throw std::invalid_argument("PiecewiseSpec: segments/starts mismatch");
  if (segment_starts.front() != 1)
    throw std::invalid_argument("PiecewiseSpec: first segment must start at 1");
  for (std::size_t j = 1; j < segment_starts.size(); ++j)
    if (segment_starts[j] <= segment_starts[j - 1])
      throw std::invalid_argument("PiecewiseSpec: starts must increase");
  const int n = segments.front().state_count();
  for (const auto& s : segments)
    if (s.state_count() != n)
      throw std::invalid_argument("PiecewiseSpec: state spaces differ");
  if (pre_steps && *pre_steps < 0)
    throw std::invalid_argument("PiecewiseSpec: pre_steps must be >= 0");
}

}  // namespace swb
