#pragma once

// Regular Bernoulli switchback designs: the (T, l, b) triple, block-level
// randomized assignment, and the burn-in-filtered index set.

#include <cstdint>
#include <vector>

namespace swb {

class SwitchbackDesign {
 public:
  // horizon T, block length l, burn-in b.  In strict mode T must be an
  // exact multiple of l; in lenient mode the trailing T - k*l periods are
  // simply unused (the design covers periods 1..k*l).  Throws
  // std::invalid_argument on invalid parameters.
  SwitchbackDesign(int horizon, int block_length, int burn_in,
                   bool strict = true);

  int horizon() const { return horizon_; }
  int block_length() const { return block_length_; }
  int burn_in() const { return burn_in_; }
  int block_count() const { return block_count_; }       // k = floor(T/l)
  int covered_horizon() const { return block_count_ * block_length_; }
  int unused_periods() const { return horizon_ - covered_horizon(); }
  bool strict() const { return strict_; }

 private:
  int horizon_, block_length_, burn_in_, block_count_;
  bool strict_;
};

struct AssignmentPlan {
  std::vector<int> block_treatments;  // Z_1..Z_k
  std::vector<int> treatments;        // W_1..W_{k*l}, W_t = Z_{ceil(t/l)}
  std::uint64_t seed = 0;
};

// Draws Z_i i.i.d. Bernoulli(1/2) from the seeded stream and expands the
// block-constant treatment path.  Deterministic given seed.
AssignmentPlan assign(const SwitchbackDesign& design, std::uint64_t seed);

// The estimator's index set: within-block positions s = b+1..l of every
// complete block, i.e. 1-based times {(i-1)l + s : i = 1..k, s = b+1..l}.
// Size is exactly k*(l-b).
std::vector<int> filtered_index_set(const SwitchbackDesign& design);

// Block index i = ceil(t/l) for 1-based t within the covered horizon.
// Throws std::out_of_range outside [1, k*l].
int block_of(int t, const SwitchbackDesign& design);

// Plain ceil(t/l) without a horizon bound (t >= 1, l >= 1).
int block_of(int t, int block_length);

}  // namespace swb
