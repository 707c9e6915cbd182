#pragma once

// Shared fixtures for the unit tests: the cached benchmark spec, small
// hand-built chains, and random-instance generators.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "swb/mdp.hpp"
#include "swb/rng.hpp"

namespace swb::test {

inline const FiniteMdpSpec& benchmark_spec() {
  static const FiniteMdpSpec spec = build_benchmark();
  return spec;
}

// 2x2 row-stochastic matrix from the two first-column probabilities.
inline Eigen::MatrixXd two_state_kernel(double p00, double p10) {
  Eigen::MatrixXd P(2, 2);
  P << p00, 1.0 - p00, p10, 1.0 - p10;
  return P;
}

inline Eigen::VectorXd uniform_dist(int n) {
  return Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
}

// Two-state spec with explicit kernels and outcome means mu(s, w).
inline FiniteMdpSpec two_state_spec(const Eigen::MatrixXd& P0,
                                    const Eigen::MatrixXd& P1, double mu00,
                                    double mu01, double mu10, double mu11,
                                    double noise_sd = 0.0) {
  Eigen::MatrixXd mu(2, 2);
  mu << mu00, mu01, mu10, mu11;
  return FiniteMdpSpec(P0, P1, mu, noise_sd, uniform_dist(2));
}

// Random probability vector (flat Dirichlet via normalized exponentials).
inline Eigen::VectorXd random_simplex(int n, Rng& rng) {
  Eigen::VectorXd v(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    v(i) = -std::log(1.0 - rng.u01());
    total += v(i);
  }
  return v / total;
}

inline Eigen::MatrixXd random_kernel(int n, Rng& rng) {
  Eigen::MatrixXd P(n, n);
  for (int i = 0; i < n; ++i) P.row(i) = random_simplex(n, rng).transpose();
  return P;
}

// Fully supported random spec: flat-Dirichlet kernel rows and initial law,
// outcome means uniform on [-5, 5], noise sd uniform on [0.5, 1.5].
inline FiniteMdpSpec random_spec(int n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd P0 = random_kernel(n, rng);
  Eigen::MatrixXd P1 = random_kernel(n, rng);
  Eigen::MatrixXd mu(n, 2);
  for (int s = 0; s < n; ++s)
    for (int w = 0; w < 2; ++w) mu(s, w) = 10.0 * rng.u01() - 5.0;
  double sd = 0.5 + rng.u01();
  Eigen::VectorXd init = random_simplex(n, rng);
  return FiniteMdpSpec(std::move(P0), std::move(P1), std::move(mu), sd,
                       std::move(init));
}

}  // namespace swb::test
