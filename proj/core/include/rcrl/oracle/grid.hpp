#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rcrl/core/environment.hpp"

namespace rcrl::oracle {

struct Axis {
  double lower = 0.0;
  double upper = 1.0;
  int count = 2;

  double step() const { return (upper - lower) / (count - 1); }
  double point(int i) const { return i == count - 1 ? upper : lower + i * step(); }

  bool operator==(const Axis&) const = default;
};

/// Regular rectangular grid, row-major (last axis varies fastest).
class GridSpec {
 public:
  GridSpec() = default;
  explicit GridSpec(std::vector<Axis> axes);

  /// Square grid with `count` nodes per axis over [lower, upper]^dims.
  static GridSpec Uniform(int dims, double lower, double upper, int count);

  int dims() const { return static_cast<int>(axes_.size()); }
  std::size_t size() const { return size_; }
  const Axis& axis(int d) const { return axes_[d]; }
  const std::vector<Axis>& axes() const { return axes_; }
  std::size_t stride(int d) const { return strides_[d]; }

  std::size_t Flatten(const std::vector<int>& index) const;
  std::vector<int> Unflatten(std::size_t flat) const;
  StateVec Point(std::size_t flat) const;

  /// Same spacing, extended by `cells` nodes on both ends of every axis.
  GridSpec Padded(int cells) const;

  /// True if the requested grid's nodes coincide with nodes of this grid.
  bool operator==(const GridSpec& other) const { return axes_ == other.axes_; }

 private:
  std::vector<Axis> axes_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
};

/// Scalar field sampled on a GridSpec.
struct ValueGrid {
  GridSpec spec;
  std::vector<double> values;

  ValueGrid() = default;
  explicit ValueGrid(GridSpec s, double fill = 0.0) : spec(std::move(s)), values(spec.size(), fill) {}

  /// Multilinear interpolation. Coordinates outside the grid are clamped.
  double Interpolate(const StateVec& x) const;
  bool AllFinite() const;
};

/// Boolean membership aligned with a grid; true means feasible.
struct KernelMask {
  GridSpec spec;
  std::vector<std::uint8_t> feasible;

  /// feasible[i] = values[i] <= 0.
  static KernelMask FromValues(const ValueGrid& grid);

  std::size_t Count() const;
  /// Fraction of cells marked feasible.
  double Fraction() const;
  /// Feasible cells times cell area (grid units).
  double Area() const;
  /// Cells within `cells` (Chebyshev distance) of a feasible cell.
  KernelMask Dilated(int cells) const;
  /// Feasible cells whose whole `cells`-neighbourhood is feasible.
  KernelMask Eroded(int cells) const;
};

/// Fraction of cells on which the two masks agree.
double Agreement(const KernelMask& a, const KernelMask& b);
/// |a & b| / |a | b|; 1 if both are empty.
double IoU(const KernelMask& a, const KernelMask& b);
/// True if every feasible cell of `inner` is feasible in `outer`.
bool IsSubset(const KernelMask& inner, const KernelMask& outer);

}  // namespace rcrl::oracle
