#pragma once

// Small numeric helpers shared by the bounds, harness and test code.
// All accumulations use Neumaier-compensated summation so that aggregate
// identities (e.g. mse = bias^2 + (1-1/n)*variance) hold to ~1e-12 even
// over tens of thousands of replicates.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "swb/rng.hpp"

namespace swb {

// Compensated accumulator (Neumaier variant of Kahan summation).
class KahanSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double mean(const std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("mean: empty input");
  KahanSum s;
  for (double x : xs) s.add(x);
  return s.value() / static_cast<double>(xs.size());
}

// Unbiased sample variance (n-1 denominator); two-pass for accuracy.
inline double sample_variance(const std::vector<double>& xs) {
  if (xs.size() < 2) throw std::invalid_argument("sample_variance: need n >= 2");
  double m = mean(xs);
  KahanSum s;
  for (double x : xs) s.add((x - m) * (x - m));
  return s.value() / static_cast<double>(xs.size() - 1);
}

inline double sample_sd(const std::vector<double>& xs) {
  return std::sqrt(sample_variance(xs));
}

// Central moment of order p about the sample mean (1/n normalization).
inline double central_moment(const std::vector<double>& xs, int p) {
  if (xs.empty()) throw std::invalid_argument("central_moment: empty input");
  double m = mean(xs);
  KahanSum s;
  for (double x : xs) s.add(std::pow(x - m, p));
  return s.value() / static_cast<double>(xs.size());
}

inline double skewness(const std::vector<double>& xs) {
  double m2 = central_moment(xs, 2);
  double m3 = central_moment(xs, 3);
  if (m2 <= 0.0) throw std::invalid_argument("skewness: zero variance");
  return m3 / std::pow(m2, 1.5);
}

inline double excess_kurtosis(const std::vector<double>& xs) {
  double m2 = central_moment(xs, 2);
  double m4 = central_moment(xs, 4);
  if (m2 <= 0.0) throw std::invalid_argument("excess_kurtosis: zero variance");
  return m4 / (m2 * m2) - 3.0;
}

inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

// Kolmogorov-Smirnov distance between the empirical distribution of xs and
// the standard normal.
inline double ks_distance_to_normal(std::vector<double> xs) {
  if (xs.empty()) throw std::invalid_argument("ks_distance: empty input");
  std::sort(xs.begin(), xs.end());
  double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double phi = normal_cdf(xs[i]);
    double hi = (static_cast<double>(i) + 1.0) / n - phi;
    double lo = phi - static_cast<double>(i) / n;
    if (hi > d) d = hi;
    if (lo > d) d = lo;
  }
  return d;
}

// Bootstrap standard error of the sample variance: draws `resamples`
// with-replacement resamples of xs, scores each with sample_variance, and
// returns the standard deviation of those statistics.
inline double bootstrap_se_of_variance(const std::vector<double>& xs,
                                       int resamples, std::uint64_t seed) {
  if (xs.size() < 2)
    throw std::invalid_argument("bootstrap_se_of_variance: need n >= 2");
  if (resamples < 2)
    throw std::invalid_argument("bootstrap_se_of_variance: need >= 2 resamples");
  Rng rng(seed);
  const std::size_t n = xs.size();
  std::vector<double> buffer(n);
  std::vector<double> stats(static_cast<std::size_t>(resamples));
  for (int r = 0; r < resamples; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t j = static_cast<std::size_t>(rng.u01() * static_cast<double>(n));
      buffer[i] = xs[j];
    }
    stats[static_cast<std::size_t>(r)] = sample_variance(buffer);
  }
  return sample_sd(stats);
}

struct OlsFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 1.0;
};

// Simple least squares of y on x.  r_squared is defined as 1 when the
// residuals vanish identically (including the degenerate zero-variance-y
// case), so exact linear data always reports a perfect fit.
inline OlsFit ols(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("ols: need >= 2 paired points");
  double mx = mean(x), my = mean(y);
  KahanSum sxx, sxy, syy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx.add((x[i] - mx) * (x[i] - mx));
    sxy.add((x[i] - mx) * (y[i] - my));
    syy.add((y[i] - my) * (y[i] - my));
  }
  if (sxx.value() <= 0.0) throw std::invalid_argument("ols: x has zero variance");
  OlsFit fit;
  fit.slope = sxy.value() / sxx.value();
  fit.intercept = my - fit.slope * mx;
  KahanSum ssr;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ssr.add(r * r);
  }
  double tss = syy.value();
  fit.r_squared = tss > 0.0 ? 1.0 - ssr.value() / tss : 1.0;
  return fit;
}

}  // namespace swb
