#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "smart/geometry.hpp"

namespace smart {

struct CellIndex {
  int col = 0;
  int row = 0;

  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// Uniform square tiling of an axis-aligned rectangle. Cells are half-open
/// [col, col + 1) x [row, row + 1) in cell units, except that points on the
/// far boundary belong to the last column/row.
class Tiling {
 public:
  Tiling() = default;
  Tiling(Point2 origin, double width, double height, double cell_size);

  Point2 origin() const { return origin_; }
  double width() const { return width_; }
  double height() const { return height_; }
  double cell_size() const { return cell_size_; }
  int cols() const { return cols_; }
  int rows() const { return rows_; }
  std::size_t cell_count() const { return static_cast<std::size_t>(cols_) * rows_; }

  bool contains(Point2 p) const;
  bool in_bounds(CellIndex c) const { return c.col >= 0 && c.row >= 0 && c.col < cols_ && c.row < rows_; }

  /// Throws std::out_of_range for points outside the closed workspace.
  CellIndex cell_of(Point2 p) const;

  /// Row-major linear index.
  std::size_t linear(CellIndex c) const { return static_cast<std::size_t>(c.row) * cols_ + c.col; }
  CellIndex from_linear(std::size_t i) const {
    return {static_cast<int>(i % cols_), static_cast<int>(i / cols_)};
  }

  Point2 centroid(CellIndex c) const;
  Point2 cell_min(CellIndex c) const;

  /// Cells of the l x l block centred on c, clipped to the tiling, in row-major
  /// order. Throws std::invalid_argument unless l is odd and >= 1.
  std::vector<CellIndex> neighborhood(CellIndex c, int l) const;

  /// Cells whose closed rectangles meet the axis-aligned box [lo, hi], clipped.
  void cells_in_box(Point2 lo, Point2 hi, std::vector<CellIndex>& out) const;

 private:
  Point2 origin_;
  double width_ = 0.0;
  double height_ = 0.0;
  double cell_size_ = 1.0;
  int cols_ = 0;
  int rows_ = 0;
};

/// Static occupancy over a tiling. Occupied cells already include the robot
/// radius, so free cells are configuration space for a point robot.
class StaticMap {
 public:
  StaticMap() = default;
  explicit StaticMap(Tiling tiling);
  StaticMap(Tiling tiling, std::vector<std::uint8_t> occupied);

  const Tiling& tiling() const { return tiling_; }
  bool occupied(CellIndex c) const { return occupied_[tiling_.linear(c)] != 0; }
  void set_occupied(CellIndex c, bool value);
  bool any_occupied() const { return occupied_count_ > 0; }
  std::size_t occupied_count() const { return occupied_count_; }

  /// True when p lies in the workspace and its cell is free.
  bool free_at(Point2 p) const;

  /// Supercover test: every cell the closed segment touches, corner contacts
  /// included, must be free.
  bool segment_blocked(const Segment2& s) const;

  /// Every cell touched by the closed segment (supercover), row-major within
  /// each column sweep.
  void supercover(const Segment2& s, std::vector<CellIndex>& out) const;

  /// Grows occupancy by `cells` in Chebyshev distance.
  StaticMap dilated(int cells) const;

 private:
  Tiling tiling_;
  std::vector<std::uint8_t> occupied_;
  std::size_t occupied_count_ = 0;
};

inline bool segment_blocked_static(const StaticMap& m, const Segment2& s) { return m.segment_blocked(s); }

}  // namespace smart
