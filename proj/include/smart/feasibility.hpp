#pragma once

#include <span>

#include "smart/geometry.hpp"
#include "smart/work.hpp"
#include "smart/world.hpp"

namespace smart {

/// Straight-edge feasibility against static occupancy and a set of forbidden
/// discs (the current critical pruning region).
class EdgeFeasibility {
 public:
  EdgeFeasibility(const StaticMap& map, std::span<const Disc> cpr, WorkCounter* counter = nullptr)
      : map_(&map), cpr_(cpr), counter_(counter) {}

  bool operator()(Point2 a, Point2 b) const {
    if (counter_ != nullptr) {
      counter_->edge_checks++;
    }
    const Segment2 s{a, b};
    for (const Disc& d : cpr_) {
      if (segment_intersects_disc(s, d)) {
        return false;
      }
    }
    return !map_->segment_blocked(s);
  }

  bool point_free(Point2 p) const {
    for (const Disc& d : cpr_) {
      if (point_in_disc(p, d)) {
        return false;
      }
    }
    return map_->free_at(p);
  }

  const StaticMap& map() const { return *map_; }
  std::span<const Disc> cpr() const { return cpr_; }

 private:
  const StaticMap* map_;
  std::span<const Disc> cpr_;
  WorkCounter* counter_;
};

}  // namespace smart
