#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "swb/design.hpp"
#include "swb/errors.hpp"
#include "swb/estimator.hpp"
#include "swb/rng.hpp"
#include "swb/stats.hpp"

using namespace swb;

namespace {

// Hand-built trajectory with explicit treatments and outcomes; states are
// zero-filled (the estimator never reads them).
Trajectory make_traj(std::vector<int> treatments, std::vector<double> outcomes) {
  Trajectory traj;
  traj.horizon = static_cast<int>(treatments.size());
  traj.states.assign(treatments.size(), 0);
  traj.treatments = std::move(treatments);
  traj.outcomes = std::move(outcomes);
  return traj;
}

AssignmentPlan make_plan(const SwitchbackDesign& design, std::vector<int> z) {
  AssignmentPlan plan;
  plan.block_treatments = std::move(z);
  plan.treatments.reserve(design.covered_horizon());
  for (int t = 1; t <= design.covered_horizon(); ++t)
    plan.treatments.push_back(
        plan.block_treatments[(t - 1) / design.block_length()]);
  return plan;
}

}  // namespace

TEST_CASE("block means average only the retained outcomes") {
  SwitchbackDesign one_block(3, 3, 1);
  Trajectory traj = make_traj({1, 1, 1}, {9, 4, 6});
  std::vector<BlockMean> bm = block_means(traj, one_block);
  REQUIRE(bm.size() == 1);
  CHECK(bm[0].block == 1);
  CHECK(bm[0].treatment == 1);
  CHECK(bm[0].mean == doctest::Approx(5.0).epsilon(1e-15));

  SwitchbackDesign two_blocks(6, 3, 0);
  Trajectory traj2 = make_traj({0, 0, 0, 1, 1, 1}, {1, 2, 3, 4, 5, 6});
  std::vector<BlockMean> bm2 = block_means(traj2, two_blocks);
  REQUIRE(bm2.size() == 2);
  CHECK(bm2[0].mean == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(bm2[1].mean == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(bm2[0].treatment == 0);
  CHECK(bm2[1].treatment == 1);

  Trajectory short_traj = make_traj({1, 1, 1, 1, 1}, {1, 2, 3, 4, 5});
  CHECK_THROWS_AS(block_means(short_traj, two_blocks), std::invalid_argument);
}

TEST_CASE("difference in means on hand-built trajectories") {
  SwitchbackDesign d(4, 2, 0);
  AssignmentPlan plan = make_plan(d, {1, 0});
  Trajectory traj = make_traj({1, 1, 0, 0}, {3, 5, 1, 2});
  EstimateReport rep = dm_estimate(traj, plan, d);
  CHECK(rep.tau_hat == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(rep.k1 == 1);
  CHECK(rep.k0 == 1);
  CHECK_FALSE(rep.degenerate);
  REQUIRE(rep.block_means.size() == 2);

  // Constant outcomes cancel exactly.
  Trajectory flat = make_traj({1, 1, 0, 0}, {7, 7, 7, 7});
  CHECK(dm_estimate(flat, plan, d).tau_hat == 0.0);

  // Maximal burn-in keeps a single outcome per block.
  SwitchbackDesign heavy(4, 2, 1);
  EstimateReport rep_heavy = dm_estimate(traj, plan, heavy);
  CHECK(rep_heavy.tau_hat == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("an empty arm defaults to zero and flags the estimate") {
  SwitchbackDesign d(4, 2, 0);
  Trajectory traj = make_traj({1, 1, 1, 1}, {2, 4, 6, 8});
  AssignmentPlan all_treated = make_plan(d, {1, 1});
  EstimateReport rep = dm_estimate(traj, all_treated, d);
  CHECK(rep.degenerate);
  CHECK(rep.k0 == 0);
  CHECK(rep.k1 == 2);
  CHECK(rep.tau_hat == doctest::Approx(5.0).epsilon(1e-15));

  Trajectory traj0 = make_traj({0, 0, 0, 0}, {2, 4, 6, 8});
  AssignmentPlan all_control = make_plan(d, {0, 0});
  EstimateReport rep0 = dm_estimate(traj0, all_control, d);
  CHECK(rep0.degenerate);
  CHECK(rep0.tau_hat == doctest::Approx(-5.0).epsilon(1e-15));
}

TEST_CASE("plan consistency is enforced") {
  SwitchbackDesign d(4, 2, 0);
  AssignmentPlan plan = make_plan(d, {1, 0});

  Trajectory mismatched = make_traj({1, 0, 0, 0}, {1, 2, 3, 4});
  CHECK_THROWS_AS(dm_estimate(mismatched, plan, d), ConsistencyError);

  AssignmentPlan wrong_blocks = make_plan(SwitchbackDesign(6, 2, 0), {1, 0, 1});
  Trajectory traj = make_traj({1, 1, 0, 0}, {1, 2, 3, 4});
  CHECK_THROWS_AS(dm_estimate(traj, wrong_blocks, d), ConsistencyError);
}

TEST_CASE("plans can be recovered from block-constant trajectories") {
  const FiniteMdpSpec& spec = test::benchmark_spec();
  SwitchbackDesign d(40, 8, 2);
  AssignmentPlan plan = assign(d, 321);
  Trajectory traj = simulate_trajectory(spec, plan.treatments, 654);

  AssignmentPlan recovered = plan_from_trajectory(traj, d);
  CHECK(recovered.block_treatments == plan.block_treatments);
  CHECK(recovered.treatments == plan.treatments);
  CHECK(dm_estimate(traj, recovered, d).tau_hat ==
        dm_estimate(traj, plan, d).tau_hat);

  Trajectory broken = traj;
  broken.treatments[3] = 1 - broken.treatments[3];
  CHECK_THROWS_AS(plan_from_trajectory(broken, d), ConsistencyError);
}

TEST_CASE("translation, scale and sign behavior over random trajectories") {
  Rng rng(20250817);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    int l = 2 + static_cast<int>(rng.u01() * 6);
    int b = static_cast<int>(rng.u01() * l);
    if (b >= l) b = l - 1;
    int k = 8 + static_cast<int>(rng.u01() * 5);
    SwitchbackDesign d(k * l, l, b);

    AssignmentPlan plan = assign(d, derive_seed(5150, {static_cast<std::uint64_t>(trial)}));
    bool has0 = false, has1 = false;
    for (int z : plan.block_treatments) (z ? has1 : has0) = true;
    if (!has0 || !has1) continue;  // invariances need both arms present

    std::vector<double> y(d.covered_horizon());
    for (double& v : y) v = 20.0 * rng.u01() - 10.0;
    Trajectory traj = make_traj(plan.treatments, y);
    EstimateReport base = dm_estimate(traj, plan, d);

    const double shift = 100.0 * rng.u01() - 50.0;
    const double scale = 0.1 + 5.0 * rng.u01();
    Trajectory shifted = traj, scaled = traj, flipped = traj;
    for (int t = 0; t < d.covered_horizon(); ++t) {
      shifted.outcomes[t] += shift;
      scaled.outcomes[t] *= scale;
      flipped.outcomes[t] = -flipped.outcomes[t];
    }
    CHECK(dm_estimate(shifted, plan, d).tau_hat ==
          doctest::Approx(base.tau_hat).epsilon(1e-9));
    CHECK(dm_estimate(scaled, plan, d).tau_hat ==
          doctest::Approx(scale * base.tau_hat).epsilon(1e-9));
    CHECK(dm_estimate(flipped, plan, d).tau_hat ==
          doctest::Approx(-base.tau_hat).epsilon(1e-9));

    // The reported estimate matches a direct recomputation from its own
    // block summaries.
    KahanSum treated, control;
    int k1 = 0, k0 = 0;
    for (const BlockMean& bm : base.block_means) {
      if (bm.treatment == 1) {
        treated.add(bm.mean);
        ++k1;
      } else {
        control.add(bm.mean);
        ++k0;
      }
    }
    CHECK(base.tau_hat == doctest::Approx(treated.value() / k1 -
                                          control.value() / k0)
                              .epsilon(1e-12));
    ++checked;
  }
  CHECK(checked > 950);  // degenerate draws at k >= 8 are rare
}

TEST_CASE("constant arm means are recovered exactly without noise") {
  // mu(s, 0) = 2, mu(s, 1) = 3 for every state: whatever trajectory the
  // chain takes, the difference in means is exactly 1.
  FiniteMdpSpec spec = test::two_state_spec(
      test::two_state_kernel(0.2, 0.7), test::two_state_kernel(0.9, 0.4), 2.0,
      3.0, 2.0, 3.0, /*noise_sd=*/0.0);
  for (int trial = 0; trial < 50; ++trial) {
    SwitchbackDesign d(60, 6, 1);
    AssignmentPlan plan = assign(d, derive_seed(8080, {static_cast<std::uint64_t>(trial)}));
    bool has0 = false, has1 = false;
    for (int z : plan.block_treatments) (z ? has1 : has0) = true;
    if (!has0 || !has1) continue;
    Trajectory traj = simulate_trajectory(spec, plan.treatments, trial);
    CHECK(dm_estimate(traj, plan, d).tau_hat ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}
