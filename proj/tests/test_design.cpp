#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "swb/design.hpp"
#include "swb/rng.hpp"

using namespace swb;

TEST_CASE("design parameters are validated") {
  CHECK_THROWS_AS(SwitchbackDesign(12, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(SwitchbackDesign(12, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(SwitchbackDesign(12, 4, -1), std::invalid_argument);
  CHECK_THROWS_AS(SwitchbackDesign(12, 4, 4), std::invalid_argument);
  CHECK_THROWS_AS(SwitchbackDesign(12, 4, 5), std::invalid_argument);
  CHECK_THROWS_AS(SwitchbackDesign(3, 4, 0), std::invalid_argument);

  SwitchbackDesign d(12, 4, 3);
  CHECK(d.horizon() == 12);
  CHECK(d.block_length() == 4);
  CHECK(d.burn_in() == 3);
  CHECK(d.block_count() == 3);
  CHECK(d.covered_horizon() == 12);
  CHECK(d.unused_periods() == 0);
}

TEST_CASE("strict mode demands an exact block partition") {
  CHECK_NOTHROW(SwitchbackDesign(10, 5, 0, true));
  CHECK_THROWS_AS(SwitchbackDesign(10, 4, 0, true), std::invalid_argument);

  SwitchbackDesign lenient(10, 4, 0, false);
  CHECK(lenient.block_count() == 2);
  CHECK(lenient.covered_horizon() == 8);
  CHECK(lenient.unused_periods() == 2);
}

TEST_CASE("assignments are fair coin flips expanded block-constant") {
  SwitchbackDesign d(12, 4, 0);
  AssignmentPlan plan = assign(d, 77);
  REQUIRE(plan.block_treatments.size() == 3);
  REQUIRE(plan.treatments.size() == 12);
  for (int t = 1; t <= 12; ++t) {
    int z = plan.block_treatments[(t - 1) / 4];
    CHECK(plan.treatments[t - 1] == z);
    CHECK((z == 0 || z == 1));
  }
  CHECK(plan.seed == 77);

  // Deterministic per seed; different seeds give different draws.
  AssignmentPlan again = assign(d, 77);
  CHECK(again.block_treatments == plan.block_treatments);
  bool any_diff = false;
  for (std::uint64_t s = 0; s < 32 && !any_diff; ++s)
    any_diff = assign(d, s).block_treatments != plan.block_treatments;
  CHECK(any_diff);

  // Block-level fairness: one long design.
  SwitchbackDesign big(20000, 2, 0);
  AssignmentPlan big_plan = assign(big, 5);
  double frac = 0.0;
  for (int z : big_plan.block_treatments) frac += z;
  frac /= static_cast<double>(big_plan.block_treatments.size());
  CHECK(std::abs(frac - 0.5) < 3.5 * 0.5 / std::sqrt(10000.0));

  // Per-period marginal is one half across independent draws.
  int hits = 0;
  const int draws = 1000;
  for (int s = 0; s < draws; ++s) hits += assign(d, 1000 + s).treatments[4];
  double marginal = static_cast<double>(hits) / draws;
  CHECK(std::abs(marginal - 0.5) < 3.5 * 0.5 / std::sqrt(1000.0));
}

TEST_CASE("filtered index set keeps post-burn-in positions of each block") {
  CHECK(filtered_index_set(SwitchbackDesign(6, 3, 1)) ==
        std::vector<int>{2, 3, 5, 6});
  CHECK(filtered_index_set(SwitchbackDesign(12, 4, 3)) ==
        std::vector<int>{4, 8, 12});

  // No burn-in keeps everything.
  std::vector<int> all(12);
  for (int t = 1; t <= 12; ++t) all[t - 1] = t;
  CHECK(filtered_index_set(SwitchbackDesign(12, 4, 0)) == all);

  // Size and positional invariants over random designs.
  Rng rng(606);
  for (int trial = 0; trial < 200; ++trial) {
    int l = 2 + static_cast<int>(rng.u01() * 12);
    int b = static_cast<int>(rng.u01() * l);
    if (b >= l) b = l - 1;
    int k = 1 + static_cast<int>(rng.u01() * 8);
    SwitchbackDesign d(k * l, l, b);
    std::vector<int> set = filtered_index_set(d);
    REQUIRE(static_cast<int>(set.size()) == k * (l - b));
    bool sorted = std::is_sorted(set.begin(), set.end());
    CHECK(sorted);
    for (int t : set) {
      int pos = (t - 1) % l + 1;
      CHECK(pos > b);
      CHECK(t >= 1);
      CHECK(t <= k * l);
    }
  }
}

TEST_CASE("block lookup maps periods to their blocks") {
  SwitchbackDesign d(12, 4, 0);
  int expected[12] = {1, 1, 1, 1, 2, 2, 2, 2, 3, 3, 3, 3};
  for (int t = 1; t <= 12; ++t) CHECK(block_of(t, d) == expected[t - 1]);
  CHECK_THROWS_AS(block_of(0, d), std::out_of_range);
  CHECK_THROWS_AS(block_of(13, d), std::out_of_range);

  CHECK(block_of(6, 5) == 2);
  CHECK(block_of(5, 5) == 1);
  CHECK(block_of(1, 1) == 1);
  CHECK(block_of(11, 5) == 3);
}

TEST_CASE("lenient designs ignore the trailing remainder") {
  SwitchbackDesign d(11, 3, 1, false);
  CHECK(d.block_count() == 3);
  CHECK(d.covered_horizon() == 9);
  CHECK(d.unused_periods() == 2);
  CHECK(filtered_index_set(d) == std::vector<int>{2, 3, 5, 6, 8, 9});
  CHECK(assign(d, 1).treatments.size() == 9);
  CHECK_THROWS_AS(block_of(10, d), std::out_of_range);
}
