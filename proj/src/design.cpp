#include "swb/design.hpp"

#include <stdexcept>
#include <string>

#include "swb/rng.hpp"

namespace swb {

SwitchbackDesign::SwitchbackDesign(int horizon, int block_length, int burn_in,
                                   bool strict)
    : horizon_(horizon),
      block_length_(block_length),
      burn_in_(burn_in),
      strict_(strict) {
  if (block_length_ <= 1)
    throw std::invalid_argument("design: block length must exceed 1");
  if (burn_in_ < 0 || burn_in_ >= block_length_)
    throw std::invalid_argument("design: burn-in must satisfy 0 <= b < l");
  if (horizon_ < block_length_)
    throw std::invalid_argument("design: horizon shorter than one block");
  block_count_ = horizon_ / block_length_;
  if (strict_ && block_count_ * block_length_ != horizon_)
    throw std::invalid_argument(
        "design: horizon not divisible by block length (strict mode); "
        "T=" + std::to_string(horizon_) + " l=" + std::to_string(block_length_));
}

AssignmentPlan assign(const SwitchbackDesign& design, std::uint64_t seed) {
  AssignmentPlan plan;
  plan.seed = seed;
  const int k = design.block_count();
  const int l = design.block_length();
  plan.block_treatments.resize(k);
  plan.treatments.resize(static_cast<std::size_t>(k) * l);
  Rng rng(seed);
  for (int i = 0; i < k; ++i) {
    int z = rng.bernoulli(0.5) ? 1 : 0;
    plan.block_treatments[i] = z;
    for (int s = 0; s < l; ++s)
      plan.treatments[static_cast<std::size_t>(i) * l + s] = z;
  }
  return plan;
}

std::vector<int> filtered_index_set(const SwitchbackDesign& design) {
  const int k = design.block_count();
  const int l = design.block_length();
  const int b = design.burn_in();
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(k) * (l - b));
  for (int i = 1; i <= k; ++i)
    for (int s = b + 1; s <= l; ++s) out.push_back((i - 1) * l + s);
  return out;
}

int block_of(int t, const SwitchbackDesign& design) {
  if (t < 1 || t > design.covered_horizon())
    throw std::out_of_range("block_of: time outside complete blocks");
  return (t - 1) / design.block_length() + 1;
}

int block_of(int t, int block_length) {
  if (t < 1 || block_length < 1)
    throw std::out_of_range("block_of: require t >= 1 and l >= 1");
  return (t - 1) / block_length + 1;
}

}  // namespace swb
