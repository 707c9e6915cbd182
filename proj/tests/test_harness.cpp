#include <atomic>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "swb/bounds.hpp"
#include "swb/harness.hpp"
#include "swb/oracle.hpp"
#include "swb/stats.hpp"

using namespace swb;
using test::benchmark_spec;
using test::two_state_kernel;
using test::two_state_spec;

namespace {

FiniteMdpSpec silent_one_state() {
  Eigen::MatrixXd P = Eigen::MatrixXd::Ones(1, 1);
  Eigen::MatrixXd mu = Eigen::MatrixXd::Zero(1, 2);
  return FiniteMdpSpec(P, P, mu, 0.0, Eigen::VectorXd::Ones(1));
}

ExperimentConfig small_benchmark_config(std::vector<int> T_values) {
  ExperimentConfig cfg;
  cfg.target = Target::fate;
  cfg.grid.T_values = std::move(T_values);
  cfg.grid.l_values = {40};
  cfg.grid.b_fixed = 10;
  cfg.reps = 60;
  cfg.master_seed = 424242;
  cfg.threads = 2;
  return cfg;
}

}  // namespace

TEST_CASE("parallel maps cover every index exactly once at any width") {
  for (int threads : {0, 1, 3, 8}) {
    std::vector<int> counts(57, 0);
    parallel_for(57, threads, [&](int i) { counts[i] += 1; });
    for (int c : counts) CHECK(c == 1);
  }

  parallel_for(0, 4, [&](int) { FAIL("must not run for an empty range"); });

  auto boom = [](int i) {
    if (i == 5) throw std::runtime_error("boom");
  };
  CHECK_THROWS_AS(parallel_for(10, 4, boom), std::runtime_error);
}

TEST_CASE("grid pairing rules expand to design lists") {
  GridSpec sweep_l;
  sweep_l.T_values = {400};
  sweep_l.l_values = {40, 80};
  sweep_l.b_fixed = 5;
  CHECK(sweep_l.design_pairs() ==
        std::vector<std::pair<int, int>>{{40, 5}, {80, 5}});

  GridSpec sweep_b;
  sweep_b.T_values = {400};
  sweep_b.b_values = {10, 20};
  sweep_b.l_offset = 30;
  CHECK(sweep_b.design_pairs() ==
        std::vector<std::pair<int, int>>{{40, 10}, {50, 20}});

  GridSpec explicit_pairs;
  explicit_pairs.pairs = {{96, 48}, {40, 0}};
  CHECK(explicit_pairs.design_pairs() ==
        std::vector<std::pair<int, int>>{{96, 48}, {40, 0}});

  GridSpec both = sweep_l;
  both.b_values = {10};
  both.l_offset = 30;
  CHECK_THROWS_AS(both.design_pairs(), std::invalid_argument);
  GridSpec none;
  CHECK_THROWS_AS(none.design_pairs(), std::invalid_argument);
}

TEST_CASE("replicate seeds separate every cell coordinate") {
  std::uint64_t base = replicate_seed(1, 400, 40, 10, Target::gate, 0);
  CHECK(replicate_seed(1, 400, 40, 10, Target::gate, 0) == base);
  CHECK(replicate_seed(2, 400, 40, 10, Target::gate, 0) != base);
  CHECK(replicate_seed(1, 800, 40, 10, Target::gate, 0) != base);
  CHECK(replicate_seed(1, 400, 80, 10, Target::gate, 0) != base);
  CHECK(replicate_seed(1, 400, 40, 20, Target::gate, 0) != base);
  CHECK(replicate_seed(1, 400, 40, 10, Target::fate, 0) != base);
  CHECK(replicate_seed(1, 400, 40, 10, Target::gate, 1) != base);
}

TEST_CASE("a noise-free constant-effect cell recovers the truth exactly") {
  FiniteMdpSpec spec = two_state_spec(two_state_kernel(0.2, 0.7),
                                      two_state_kernel(0.9, 0.4), 2.0, 3.0,
                                      2.0, 3.0, /*noise_sd=*/0.0);
  double truth = stable_effect(spec);
  CHECK(truth == doctest::Approx(1.0).epsilon(1e-12));

  SwitchbackDesign d(120, 6, 1);
  CellResult cell = run_cell(spec, Target::fate, d, truth, 50, 31337, 2);
  CHECK(cell.degenerate_count == 0);
  CHECK(std::abs(cell.bias) < 1e-12);
  CHECK(cell.mse < 1e-20);
  CHECK(cell.variance < 1e-20);
  CHECK(cell.k == 20);
  CHECK(cell.reps == 50);
}

TEST_CASE("cell aggregates match a direct recomputation") {
  const FiniteMdpSpec& spec = benchmark_spec();
  SwitchbackDesign d(240, 40, 10);
  double truth = fate(spec, filtered_index_set(d));
  const int reps = 200;
  CellResult cell = run_cell(spec, Target::fate, d, truth, reps, 777, 3);

  int degenerate = 0;
  std::vector<double> taus =
      cell_estimates(spec, Target::fate, d, reps, 777, 3, &degenerate);
  REQUIRE(static_cast<int>(taus.size()) == reps);
  CHECK(degenerate == cell.degenerate_count);

  std::vector<double> sq(reps);
  for (int r = 0; r < reps; ++r) {
    double e = taus[r] - truth;
    sq[r] = e * e;
  }
  CHECK(cell.mean_estimate == doctest::Approx(mean(taus)).epsilon(1e-12));
  CHECK(cell.bias == doctest::Approx(mean(taus) - truth).epsilon(1e-12));
  CHECK(cell.variance == doctest::Approx(sample_variance(taus)).epsilon(1e-12));
  CHECK(cell.mse == doctest::Approx(mean(sq)).epsilon(1e-12));
  CHECK(cell.mc_se_of_mse ==
        doctest::Approx(sample_sd(sq) / std::sqrt(static_cast<double>(reps)))
            .epsilon(1e-12));

  // Squared error decomposes into squared bias plus the biased variance.
  double recomposed =
      cell.bias * cell.bias +
      cell.variance * static_cast<double>(reps - 1) / static_cast<double>(reps);
  CHECK(std::abs(cell.mse - recomposed) < 1e-10);
}

TEST_CASE("cells are deterministic across widths and sensitive to the seed") {
  const FiniteMdpSpec& spec = benchmark_spec();
  SwitchbackDesign d(480, 40, 10);
  double truth = fate(spec, filtered_index_set(d));

  CellResult serial = run_cell(spec, Target::fate, d, truth, 150, 9001, 1);
  CellResult pooled = run_cell(spec, Target::fate, d, truth, 150, 9001, 4);
  CHECK(serial.mean_estimate == pooled.mean_estimate);
  CHECK(serial.variance == pooled.variance);
  CHECK(serial.mse == pooled.mse);
  CHECK(serial.mc_se_of_mse == pooled.mc_se_of_mse);
  CHECK(serial.degenerate_count == pooled.degenerate_count);

  std::vector<double> a = cell_estimates(spec, Target::fate, d, 150, 9001, 1);
  std::vector<double> b = cell_estimates(spec, Target::fate, d, 150, 9001, 4);
  CHECK(a == b);

  CellResult reseeded = run_cell(spec, Target::fate, d, truth, 150, 9002, 4);
  CHECK(reseeded.mean_estimate != serial.mean_estimate);
  CHECK(std::abs(reseeded.mse - serial.mse) <=
        3.5 * (reseeded.mc_se_of_mse + serial.mc_se_of_mse));
}

TEST_CASE("empty-arm frequency matches the block-count geometry") {
  FiniteMdpSpec spec = silent_one_state();
  SwitchbackDesign d(25, 5, 0);
  const int reps = 4000;
  CellResult cell = run_cell(spec, Target::gate, d, 0.0, reps, 246, 2);
  double freq = static_cast<double>(cell.degenerate_count) / reps;
  double p = std::pow(2.0, 1.0 - 5.0);  // two single-arm draws out of 2^k
  CHECK(std::abs(freq - p) < 3.5 * std::sqrt(p * (1 - p) / reps));
}

TEST_CASE("measured cell errors stay inside the closed-form envelope") {
  const FiniteMdpSpec& spec = benchmark_spec();
  ModelBounds mb = model_bounds_from_spec(spec);
  const double truth = stable_effect(spec);
  const int reps = 2000;
  const std::pair<int, int> cells[4] = {{40, 0}, {64, 0}, {40, 20}, {64, 32}};
  for (auto [l, b] : cells) {
    SwitchbackDesign d(1920, l, b, false);
    int degenerate = 0;
    std::vector<double> taus = cell_estimates(spec, Target::fate, d, reps,
                                              20250817, 4, &degenerate);
    BoundsReport rep = mse_bound(mb, d);
    double mean_tau = mean(taus);
    double se_mean = sample_sd(taus) / std::sqrt(static_cast<double>(reps));
    CHECK(std::abs(mean_tau - truth) <= rep.mixing_bias + 3.0 * se_mean);
    double var = sample_variance(taus);
    double se_var = bootstrap_se_of_variance(taus, 200, 5150 + l + b);
    CHECK(var <= rep.var_total + 3.0 * se_var);
  }
}

TEST_CASE("grid runs produce envelopes, rate fits and exact truths") {
  ExperimentConfig cfg = small_benchmark_config({240, 480, 960});
  GridResult grid = run_grid(cfg);
  REQUIRE(grid.cells.size() == 3);
  REQUIRE(grid.envelope.size() == 3);
  CHECK(grid.envelope_fit.has_value());

  const FiniteMdpSpec& spec = benchmark_spec();
  double tau = stable_effect(spec);
  for (const CellResult& c : grid.cells) {
    CHECK(c.truth == doctest::Approx(tau).epsilon(1e-12));
    CHECK(c.reps == 60);
    CHECK(c.l == 40);
    CHECK(c.b == 10);
  }
  for (std::size_t i = 0; i < grid.envelope.size(); ++i) {
    CHECK(grid.envelope[i].T == cfg.grid.T_values[i]);
    CHECK(grid.envelope[i].mse == grid.cells[i].mse);
  }

  GridResult short_grid = run_grid(small_benchmark_config({240, 480}));
  CHECK_FALSE(short_grid.envelope_fit.has_value());
}

TEST_CASE("invalid cells abort a grid before any simulation") {
  ExperimentConfig cfg = small_benchmark_config({100, 30});  // 30 < block 40
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  CHECK_THROWS_AS(run_grid(cfg), std::invalid_argument);

  ExperimentConfig no_reps = small_benchmark_config({240});
  no_reps.reps = 0;
  CHECK_THROWS_AS(no_reps.validate(), std::invalid_argument);
}

TEST_CASE("normality diagnostics on injected gaussian estimates") {
  Rng rng(11111);
  const int n = 5000;
  const double truth = 3.0, sd = 0.7;
  const int k = 17;
  std::vector<double> estimates(n);
  for (int r = 0; r < n; ++r) estimates[r] = truth + sd * rng.normal();

  CltDiagnostics d = clt_diagnostics_from_estimates(estimates, truth, k);
  CHECK(d.reps == n);
  CHECK(d.coverage95 > 0.94);
  CHECK(d.coverage95 < 0.96);
  CHECK(d.coverage90 > 0.885);
  CHECK(d.coverage90 < 0.915);
  CHECK(d.ks_distance < 0.025);
  CHECK(std::abs(d.skewness) < 0.1);
  CHECK(std::abs(d.excess_kurtosis) < 0.2);
  CHECK(d.v_hat == doctest::Approx(k * sd * sd).epsilon(0.1));
  CHECK_FALSE(d.sigma_hat.has_value());
  REQUIRE(d.standardized_errors.size() == estimates.size());

  CltDiagnostics with_delta =
      clt_diagnostics_from_estimates(estimates, truth, k, &estimates);
  CHECK(with_delta.sigma_hat.has_value());
  CHECK(*with_delta.sigma_hat == doctest::Approx(d.v_hat).epsilon(1e-12));

  std::vector<double> few(50, 1.0);
  CHECK_THROWS_AS(clt_diagnostics_from_estimates(few, 0.0, 3),
                  std::invalid_argument);
  std::vector<double> flat(200, 1.0);
  CHECK_THROWS_AS(clt_diagnostics_from_estimates(flat, 1.0, 3),
                  std::invalid_argument);
  CHECK_THROWS_AS(clt_diagnostics_from_estimates(estimates, truth, 0),
                  std::invalid_argument);
  std::vector<double> misaligned(n - 1, 0.0);
  CHECK_THROWS_AS(
      clt_diagnostics_from_estimates(estimates, truth, k, &misaligned),
      std::invalid_argument);
}

TEST_CASE("replicate pipeline diagnostics on a mid-size benchmark cell") {
  const FiniteMdpSpec& spec = benchmark_spec();
  double t_mix = model_bounds_from_spec(spec).t_mix;
  SwitchbackDesign d = clt_default_cell(3200, t_mix, 24);
  CHECK(d.burn_in() == 19);
  CHECK(d.block_length() == 43);
  CHECK(d.block_count() == 74);

  CltDiagnostics diag = clt_check(spec, d, 400, 20250817, 4);
  CHECK(diag.reps == 400);
  CHECK(diag.k == 74);
  CHECK(diag.coverage95 > 0.90);
  CHECK(diag.coverage95 < 0.99);
  CHECK(diag.ks_distance < 0.1);
  CHECK(diag.v_hat > 0.0);
  REQUIRE(diag.sigma_hat.has_value());
  CHECK(*diag.sigma_hat > 0.0);
  CHECK(diag.truth == doctest::Approx(stable_effect(spec)).epsilon(1e-12));

  CHECK_THROWS_AS(clt_default_cell(3200, t_mix, 0), std::invalid_argument);
  CHECK_THROWS_AS(clt_check(spec, d, 50, 1, 1), std::invalid_argument);
}
