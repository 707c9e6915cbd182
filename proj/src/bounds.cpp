#include "swb/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace swb {

void ModelBounds::validate() const {
  if (!(Lambda >= 0.0)) throw std::invalid_argument("ModelBounds: Lambda < 0");
  if (!(Psi >= 0.0)) throw std::invalid_argument("ModelBounds: Psi < 0");
  if (!(sigma_sq >= 0.0))
    throw std::invalid_argument("ModelBounds: sigma_sq < 0");
  if (!(t_mix >= 0.0)) throw std::invalid_argument("ModelBounds: t_mix < 0");
  if (!(sigma0_sq >= 0.0))
    throw std::invalid_argument("ModelBounds: sigma0_sq < 0");
  if (!(Gamma0 >= 0.0)) throw std::invalid_argument("ModelBounds: Gamma0 < 0");
}

ModelBounds model_bounds_from_spec(const FiniteMdpSpec& spec, int max_lag) {
  ModelBounds mb;
  mb.Lambda = spec.outcome_mean_bound();
  mb.Psi = 0.0;  // time-homogeneous: constant effect trace
  mb.sigma_sq = spec.noise_sd() * spec.noise_sd();
  mb.sigma0_sq = mb.sigma_sq;
  mb.Gamma0 = mb.Lambda + 6.0 * spec.noise_sd();
  mb.t_mix = estimate_mixing_time(spec, max_lag).t_mix;
  return mb;
}

double mixing_bias_bound(const ModelBounds& mb, double l, double b) {
  mb.validate();
  if (!(l > b && b >= 0.0))
    throw std::invalid_argument("mixing_bias_bound: need l > b >= 0");
  if (mb.t_mix == 0.0) return 0.0;  // one-step exact mixing
  const double contraction = std::exp(-1.0 / mb.t_mix);
  return 4.0 * mb.Lambda / (1.0 - contraction) * std::exp(-b / mb.t_mix) /
         (l - b);
}

double burnin_bias_bound(const ModelBounds& mb, double l, double b) {
  mb.validate();
  if (!(l > b && b >= 0.0))
    throw std::invalid_argument("burnin_bias_bound: need l > b >= 0");
  return mb.Psi * b / l;
}

VarianceBound variance_bound(const ModelBounds& mb, double k, double l,
                             double b) {
  mb.validate();
  if (!(k >= 1.0)) throw std::invalid_argument("variance_bound: need k >= 1");
  if (!(l > b && b >= 0.0))
    throw std::invalid_argument("variance_bound: need l > b >= 0");
  const double dk = k;
  const double span = l - b;
  VarianceBound v;
  v.clustering = 12.0 * mb.Lambda * mb.Lambda / dk;
  v.noise = 4.0 * mb.sigma_sq / (dk * span);
  if (mb.t_mix > 0.0) {
    const double contraction = std::exp(-1.0 / mb.t_mix);
    v.carryover = 16.0 * mb.Lambda * mb.Lambda * std::exp(-b / mb.t_mix) /
                  ((1.0 - contraction) * (1.0 - contraction) * dk * span * span);
  }
  v.total = v.clustering + v.noise + v.carryover;
  return v;
}

BoundsReport mse_bound(const ModelBounds& mb, const SwitchbackDesign& design) {
  BoundsReport rep;
  const int l = design.block_length();
  const int b = design.burn_in();
  rep.mixing_bias = mixing_bias_bound(mb, l, b);
  rep.burnin_bias = burnin_bias_bound(mb, l, b);
  VarianceBound v = variance_bound(mb, design.block_count(), l, b);
  rep.var_clustering = v.clustering;
  rep.var_noise = v.noise;
  rep.var_carryover = v.carryover;
  rep.var_total = v.total;
  const double bias_gate = rep.mixing_bias + rep.burnin_bias;
  rep.mse_bound_gate = bias_gate * bias_gate + rep.var_total;
  rep.mse_bound_fate = rep.mixing_bias * rep.mixing_bias + rep.var_total;
  return rep;
}

namespace {

// Round half-down to an integer ("ties round down").
int round_half_down(double x) {
  return static_cast<int>(std::ceil(x - 0.5));
}

// Nearest divisor of T to x among divisors >= 2, ties to the smaller; 0
// when T has no divisor within a factor of 2 of x.
int nearest_divisor(int T, double x) {
  int best = 0;
  double best_gap = 0.0;
  for (int d = 2; d <= T; ++d) {
    if (T % d != 0) continue;
    if (d < x / 2.0 || d > 2.0 * x) continue;
    double gap = std::abs(d - x);
    if (best == 0 || gap < best_gap - 1e-12 ||
        (std::abs(gap - best_gap) <= 1e-12 && d < best)) {
      best = d;
      best_gap = gap;
    }
  }
  return best;
}

}  // namespace

DesignChoice optimal_design_gate(int T, double t_mix) {
  if (T < 2) throw std::invalid_argument("optimal_design_gate: need T >= 2");
  if (!(t_mix >= 0.0))
    throw std::invalid_argument("optimal_design_gate: need t_mix >= 0");
  const double contraction = t_mix > 0.0 ? std::exp(-1.0 / t_mix) : 0.0;
  DesignChoice choice;
  choice.block_length_real = std::cbrt(4.0 / 3.0) *
                             std::pow(1.0 - contraction, -2.0 / 3.0) *
                             std::cbrt(static_cast<double>(T));
  choice.burn_in_real = 0.0;
  choice.burn_in = 0;
  int rounded = nearest_divisor(T, choice.block_length_real);
  if (rounded == 0) rounded = round_half_down(choice.block_length_real);
  choice.block_length = std::max(2, std::min(rounded, T));
  return choice;
}

DesignChoice optimal_design_fate(int T, const ModelBounds& mb) {
  mb.validate();
  if (T < 2) throw std::invalid_argument("optimal_design_fate: need T >= 2");
  if (!(mb.Lambda > 0.0))
    throw std::invalid_argument("optimal_design_fate: need Lambda > 0");
  DesignChoice choice;
  choice.burn_in_real =
      mb.t_mix / 2.0 * std::log(static_cast<double>(T)) + mb.C_star;
  choice.block_length_real =
      choice.burn_in_real + mb.sigma_sq / (3.0 * mb.Lambda * mb.Lambda);
  choice.burn_in = std::max(0, round_half_down(choice.burn_in_real));
  choice.block_length =
      std::max({2, choice.burn_in + 1,
                round_half_down(choice.block_length_real)});
  return choice;
}

OlsFit fit_rate(const std::vector<RatePoint>& points) {
  if (points.size() < 3)
    throw std::invalid_argument("fit_rate: need at least 3 points");
  std::vector<double> x, y;
  x.reserve(points.size());
  y.reserve(points.size());
  for (const auto& p : points) {
    if (!(p.T > 0.0) || !(p.mse > 0.0))
      throw std::invalid_argument("fit_rate: points must be positive");
    x.push_back(std::log(p.T));
    y.push_back(std::log(p.mse));
  }
  return ols(x, y);
}

}  // namespace swb
