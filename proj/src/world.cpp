#include "smart/world.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace smart {

namespace {

// Cells of a closed 1-D interval [a, b] (cell units) over n cells: a point on
// an integer boundary touches the cells on both sides.
void closed_range(double a, double b, int n, int& lo, int& hi) {
  const double fa = std::floor(a);
  lo = static_cast<int>(fa);
  if (fa == a) {
    --lo;
  }
  hi = static_cast<int>(std::floor(b));
  lo = std::max(lo, 0);
  hi = std::min(hi, n - 1);
}

}  // namespace

Tiling::Tiling(Point2 origin, double width, double height, double cell_size)
    : origin_(origin), width_(width), height_(height), cell_size_(cell_size) {
  if (!(cell_size > 0.0) || !(width > 0.0) || !(height > 0.0) || !std::isfinite(width) ||
      !std::isfinite(height)) {
    throw std::invalid_argument("tiling needs positive finite width, height and cell size");
  }
  cols_ = static_cast<int>(std::ceil(width / cell_size));
  rows_ = static_cast<int>(std::ceil(height / cell_size));
}

bool Tiling::contains(Point2 p) const {
  return p.x >= origin_.x && p.y >= origin_.y && p.x <= origin_.x + width_ && p.y <= origin_.y + height_;
}

CellIndex Tiling::cell_of(Point2 p) const {
  if (!contains(p)) {
    throw std::out_of_range("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                            ") is outside the workspace");
  }
  int col = static_cast<int>(std::floor((p.x - origin_.x) / cell_size_));
  int row = static_cast<int>(std::floor((p.y - origin_.y) / cell_size_));
  return {std::clamp(col, 0, cols_ - 1), std::clamp(row, 0, rows_ - 1)};
}

Point2 Tiling::cell_min(CellIndex c) const {
  return {origin_.x + c.col * cell_size_, origin_.y + c.row * cell_size_};
}

Point2 Tiling::centroid(CellIndex c) const {
  return {origin_.x + (c.col + 0.5) * cell_size_, origin_.y + (c.row + 0.5) * cell_size_};
}

std::vector<CellIndex> Tiling::neighborhood(CellIndex c, int l) const {
  if (l < 1 || l % 2 == 0) {
    throw std::invalid_argument("neighborhood size must be odd and >= 1, got " + std::to_string(l));
  }
  const int half = (l - 1) / 2;
  std::vector<CellIndex> out;
  const int r0 = std::max(c.row - half, 0);
  const int r1 = std::min(c.row + half, rows_ - 1);
  const int c0 = std::max(c.col - half, 0);
  const int c1 = std::min(c.col + half, cols_ - 1);
  if (r0 > r1 || c0 > c1) {
    return out;
  }
  out.reserve(static_cast<std::size_t>(r1 - r0 + 1) * (c1 - c0 + 1));
  for (int r = r0; r <= r1; ++r) {
    for (int k = c0; k <= c1; ++k) {
      out.push_back({k, r});
    }
  }
  return out;
}

void Tiling::cells_in_box(Point2 lo, Point2 hi, std::vector<CellIndex>& out) const {
  int c0, c1, r0, r1;
  closed_range((lo.x - origin_.x) / cell_size_, (hi.x - origin_.x) / cell_size_, cols_, c0, c1);
  closed_range((lo.y - origin_.y) / cell_size_, (hi.y - origin_.y) / cell_size_, rows_, r0, r1);
  for (int r = r0; r <= r1; ++r) {
    for (int k = c0; k <= c1; ++k) {
      out.push_back({k, r});
    }
  }
}

StaticMap::StaticMap(Tiling tiling) : tiling_(tiling), occupied_(tiling.cell_count(), 0) {}

StaticMap::StaticMap(Tiling tiling, std::vector<std::uint8_t> occupied)
    : tiling_(tiling), occupied_(std::move(occupied)) {
  if (occupied_.size() != tiling_.cell_count()) {
    throw std::invalid_argument("occupancy size does not match the tiling");
  }
  for (auto& v : occupied_) {
    v = v != 0 ? 1 : 0;
    occupied_count_ += v;
  }
}

void StaticMap::set_occupied(CellIndex c, bool value) {
  auto& slot = occupied_[tiling_.linear(c)];
  const std::uint8_t next = value ? 1 : 0;
  occupied_count_ = occupied_count_ - slot + next;
  slot = next;
}

bool StaticMap::free_at(Point2 p) const { return tiling_.contains(p) && !occupied(tiling_.cell_of(p)); }

namespace {

// Visits every cell touched by the closed segment; stops early when the
// visitor returns true. Returns whether it stopped early.
template <typename Visit>
bool sweep_supercover(const Tiling& t, const Segment2& s, Visit&& visit) {
  const Point2 o = t.origin();
  const double cs = t.cell_size();
  double ua = (s.a.x - o.x) / cs, va = (s.a.y - o.y) / cs;
  double ub = (s.b.x - o.x) / cs, vb = (s.b.y - o.y) / cs;
  if (ua > ub) {
    std::swap(ua, ub);
    std::swap(va, vb);
  }
  int c0, c1;
  closed_range(ua, ub, t.cols(), c0, c1);
  const bool vertical = ua == ub;
  const double slope = vertical ? 0.0 : (vb - va) / (ub - ua);
  for (int c = c0; c <= c1; ++c) {
    double vlo, vhi;
    if (vertical) {
      vlo = std::min(va, vb);
      vhi = std::max(va, vb);
    } else {
      const double xl = std::max(ua, static_cast<double>(c));
      const double xr = std::min(ub, static_cast<double>(c + 1));
      const double yl = xl == ua ? va : va + (xl - ua) * slope;
      const double yr = xr == ub ? vb : va + (xr - ua) * slope;
      vlo = std::min(yl, yr);
      vhi = std::max(yl, yr);
    }
    int r0, r1;
    closed_range(vlo, vhi, t.rows(), r0, r1);
    for (int r = r0; r <= r1; ++r) {
      if (visit(CellIndex{c, r})) {
        return true;
      }
    }
  }
  return false;
}

}  // namespace

void StaticMap::supercover(const Segment2& s, std::vector<CellIndex>& out) const {
  sweep_supercover(tiling_, s, [&](CellIndex c) {
    out.push_back(c);
    return false;
  });
}

bool StaticMap::segment_blocked(const Segment2& s) const {
  if (occupied_count_ == 0) {
    return false;
  }
  return sweep_supercover(tiling_, s, [&](CellIndex c) { return occupied_[tiling_.linear(c)] != 0; });
}

StaticMap StaticMap::dilated(int cells) const {
  if (cells <= 0) {
    return *this;
  }
  StaticMap out(tiling_);
  for (int r = 0; r < tiling_.rows(); ++r) {
    for (int c = 0; c < tiling_.cols(); ++c) {
      if (!occupied({c, r})) {
        continue;
      }
      for (const CellIndex n : tiling_.neighborhood({c, r}, 2 * cells + 1)) {
        out.set_occupied(n, true);
      }
    }
  }
  return out;
}

}  // namespace smart
