#pragma once

// Burn-in-discarding difference-in-means estimation on switchback
// trajectories, with block-level summaries.

#include <vector>

#include "swb/design.hpp"
#include "swb/mdp.hpp"

namespace swb {

struct BlockMean {
  int block = 0;        // i, 1-based
  int treatment = 0;    // Z_i
  double mean = 0.0;    // average of the block's non-burn-in outcomes
};

struct EstimateReport {
  double tau_hat = 0.0;
  int k1 = 0;  // treated blocks
  int k0 = 0;  // control blocks
  std::vector<BlockMean> block_means;
  // Set when one arm received no blocks; the empty arm's average is 0 by
  // convention and tau_hat reduces to (+/-) the nonempty arm's mean.
  bool degenerate = false;
};

// Per-block averages of the non-burn-in outcomes:
// Ybar_i = (1/(l-b)) * sum_{s=b+1..l} Y_{(i-1)l+s}.  Requires
// traj.horizon >= k*l.  Block treatments in the result are taken from the
// trajectory's own treatment path.
std::vector<BlockMean> block_means(const Trajectory& traj,
                                   const SwitchbackDesign& design);

// Difference of treated and control block-mean averages.  Verifies that
// traj.treatments matches the plan over the covered horizon (throws
// ConsistencyError otherwise).  Summation is block-major ascending for
// bit-reproducible results.
EstimateReport dm_estimate(const Trajectory& traj, const AssignmentPlan& plan,
                           const SwitchbackDesign& design);

// Reconstructs the plan implied by the trajectory's own treatment path
// (block starts define Z_i).  Throws ConsistencyError when treatments are
// not block-constant over the covered horizon.
AssignmentPlan plan_from_trajectory(const Trajectory& traj,
                                    const SwitchbackDesign& design);

}  // namespace swb
