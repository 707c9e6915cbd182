#pragma once

#include <stdexcept>
#include <string>

namespace swb {

// A transition kernel whose contraction profile never drops below 1 within
// the inspected lag range: no finite mixing time can be fitted.
class NonMixingError : public std::runtime_error {
 public:
  explicit NonMixingError(const std::string& what) : std::runtime_error(what) {}
};

// A kernel with more than one stationary distribution (rank deficiency of
// I - P' beyond the expected single null direction).
class NonErgodicError : public std::runtime_error {
 public:
  explicit NonErgodicError(const std::string& what) : std::runtime_error(what) {}
};

// Trajectory treatments disagree with the assignment plan they are claimed
// to follow.
class ConsistencyError : public std::runtime_error {
 public:
  explicit ConsistencyError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace swb
