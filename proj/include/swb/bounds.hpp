#pragma once

// Closed-form bias/variance bounds for the burn-in difference-in-means
// estimator under geometrically mixing dynamics, the matching rate-optimal
// design rules, and log-log rate fitting.

#include <string>
#include <vector>

#include "swb/design.hpp"
#include "swb/mdp.hpp"
#include "swb/stats.hpp"

namespace swb {

// Model-level constants the bounds are evaluated at.
struct ModelBounds {
  double Lambda = 0.0;     // a.s. bound on |mu(S_t, W_t)|
  double Psi = 0.0;        // bound on per-period effect heterogeneity
  double sigma_sq = 0.0;   // outcome noise variance bound
  double t_mix = 1.0;      // geometric mixing scale (0 = instant mixing)
  double sigma0_sq = 0.0;  // noise variance lower bound (CLT diagnostics)
  double Gamma0 = 0.0;     // |Y_t| bound (CLT diagnostics)
  double C_star = 0.0;     // additive constant in the burn-in design rule

  void validate() const;  // throws std::invalid_argument
};

// Derives ModelBounds from a spec: Lambda from the outcome-mean table,
// sigma_sq = noise_sd^2, t_mix from the contraction profiles, Psi = 0
// (homogeneous specs have a constant effect trace), sigma0_sq = sigma_sq,
// Gamma0 = Lambda + 6 * noise_sd (a practical envelope for the diagnostic
// field; Gaussian noise has no hard bound).
ModelBounds model_bounds_from_spec(const FiniteMdpSpec& spec, int max_lag = 64);

struct BoundsReport {
  double mixing_bias = 0.0;
  double burnin_bias = 0.0;
  double var_clustering = 0.0;
  double var_noise = 0.0;
  double var_carryover = 0.0;
  double var_total = 0.0;
  double mse_bound_gate = 0.0;  // (mixing + burnin)^2 + var_total
  double mse_bound_fate = 0.0;  // mixing^2 + var_total
  // Terms of order 1/k^2 and 2^-k are excluded from all values above.
  std::string excluded_terms = "O(1/k^2), O(2^-k)";
};

// Residual carryover bias after b burn-in periods:
//   4*Lambda / (1 - e^{-1/t_mix}) * e^{-b/t_mix} / (l - b);
// 0 when t_mix = 0 (instant mixing).  Requires l > b >= 0.  Real-valued
// arguments so the closed-form design rules can be evaluated before
// integer rounding.
double mixing_bias_bound(const ModelBounds& mb, double l, double b);

// Cost of discarding burn-in periods from the full-horizon target:
// Psi * b / l.  Requires 0 <= b < l.
double burnin_bias_bound(const ModelBounds& mb, double l, double b);

struct VarianceBound {
  double clustering = 0.0;  // 12*Lambda^2 / k
  double noise = 0.0;       // 4*sigma^2 / (k*(l-b))
  double carryover = 0.0;   // 16*Lambda^2*e^{-b/t_mix} / ((1-e^{-1/t_mix})^2*k*(l-b)^2)
  double total = 0.0;
};

VarianceBound variance_bound(const ModelBounds& mb, double k, double l,
                             double b);

BoundsReport mse_bound(const ModelBounds& mb, const SwitchbackDesign& design);

// Full-horizon-target design rule: burn-in 0 and block length
//   l* = (4/3)^{1/3} * (1 - e^{-1/t_mix})^{-2/3} * T^{1/3}.
// block_length is l* rounded to a divisor-friendly integer >= 2: the
// divisor of T nearest to l* when one lies within a factor of 2 of l*,
// otherwise plain nearest-integer rounding; ties round down.
struct DesignChoice {
  int block_length = 0;
  int burn_in = 0;
  double block_length_real = 0.0;
  double burn_in_real = 0.0;
};

DesignChoice optimal_design_gate(int T, double t_mix);

// Filtered-target design rule: b* = (t_mix/2) ln T + C_star and
// l* = b* + sigma_sq / (3 Lambda^2), rounded with l - b >= 1 enforced.
DesignChoice optimal_design_fate(int T, const ModelBounds& mb);

struct RatePoint {
  double T = 0.0;
  double mse = 0.0;
};

// OLS of ln(mse) on ln(T).  Requires >= 3 points, all positive.
OlsFit fit_rate(const std::vector<RatePoint>& points);

}  // namespace swb
