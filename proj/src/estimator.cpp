#include "swb/estimator.hpp"

#include <stdexcept>

#include "swb/errors.hpp"

namespace swb {

std::vector<BlockMean> block_means(const Trajectory& traj,
                                   const SwitchbackDesign& design) {
  const int k = design.block_count();
  const int l = design.block_length();
  const int b = design.burn_in();
  if (traj.horizon < design.covered_horizon() || traj.horizon < l)
    throw std::invalid_argument("block_means: trajectory shorter than design");

  std::vector<BlockMean> out(k);
  for (int i = 1; i <= k; ++i) {
    double sum = 0.0;
    for (int s = b + 1; s <= l; ++s) sum += traj.outcomes[(i - 1) * l + s - 1];
    out[i - 1].block = i;
    out[i - 1].treatment = traj.treatments[(i - 1) * l];
    out[i - 1].mean = sum / static_cast<double>(l - b);
  }
  return out;
}

EstimateReport dm_estimate(const Trajectory& traj, const AssignmentPlan& plan,
                           const SwitchbackDesign& design) {
  const int k = design.block_count();
  const int l = design.block_length();
  if (static_cast<int>(plan.block_treatments.size()) != k)
    throw ConsistencyError("dm_estimate: plan block count mismatch");
  if (traj.horizon < design.covered_horizon())
    throw ConsistencyError("dm_estimate: trajectory shorter than design");
  for (int t = 0; t < design.covered_horizon(); ++t)
    if (traj.treatments[t] != plan.treatments[t])
      throw ConsistencyError("dm_estimate: trajectory treatments disagree "
                             "with the assignment plan");

  EstimateReport report;
  report.block_means = block_means(traj, design);
  double sum1 = 0.0, sum0 = 0.0;
  for (int i = 0; i < k; ++i) {
    report.block_means[i].treatment = plan.block_treatments[i];
    if (plan.block_treatments[i] == 1) {
      sum1 += report.block_means[i].mean;
      ++report.k1;
    } else {
      sum0 += report.block_means[i].mean;
      ++report.k0;
    }
  }
  // Empty-arm averages are 0 by convention.
  const double avg1 = report.k1 > 0 ? sum1 / report.k1 : 0.0;
  const double avg0 = report.k0 > 0 ? sum0 / report.k0 : 0.0;
  report.tau_hat = avg1 - avg0;
  report.degenerate = (report.k1 == 0 || report.k0 == 0);
  return report;
}

AssignmentPlan plan_from_trajectory(const Trajectory& traj,
                                    const SwitchbackDesign& design) {
  const int k = design.block_count();
  const int l = design.block_length();
  if (traj.horizon < design.covered_horizon())
    throw ConsistencyError("plan_from_trajectory: trajectory shorter than design");
  AssignmentPlan plan;
  plan.block_treatments.resize(k);
  plan.treatments.assign(traj.treatments.begin(),
                         traj.treatments.begin() + design.covered_horizon());
  for (int i = 0; i < k; ++i) {
    int z = traj.treatments[static_cast<std::size_t>(i) * l];
    for (int s = 0; s < l; ++s)
      if (traj.treatments[static_cast<std::size_t>(i) * l + s] != z)
        throw ConsistencyError(
            "plan_from_trajectory: treatments not block-constant");
    plan.block_treatments[i] = z;
  }
  return plan;
}

}  // namespace swb
