#pragma once

#include <cstdint>

namespace smart {

/// Operation counts accumulated by the planning stages. The deterministic
/// replanning clock converts these into simulated seconds.
struct WorkCounter {
  std::uint64_t node_visits = 0;
  std::uint64_t edge_checks = 0;

  std::uint64_t total() const { return node_visits + edge_checks; }
};

}  // namespace smart
