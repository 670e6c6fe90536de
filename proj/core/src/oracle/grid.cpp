#include "rcrl/oracle/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rcrl/core/errors.hpp"

namespace rcrl::oracle {

GridSpec::GridSpec(std::vector<Axis> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw ConfigError("grid", "needs at least one axis");
  for (std::size_t d = 0; d < axes_.size(); ++d) {
    const Axis& ax = axes_[d];
    if (ax.count < 2) throw ConfigError("grid.axis" + std::to_string(d), "count must be >= 2");
    if (!(ax.lower < ax.upper)) {
      throw ConfigError("grid.axis" + std::to_string(d), "lower must be < upper");
    }
  }
  strides_.assign(axes_.size(), 1);
  for (int d = static_cast<int>(axes_.size()) - 2; d >= 0; --d) {
    strides_[d] = strides_[d + 1] * static_cast<std::size_t>(axes_[d + 1].count);
  }
  size_ = strides_[0] * static_cast<std::size_t>(axes_[0].count);
}

GridSpec GridSpec::Uniform(int dims, double lower, double upper, int count) {
  return GridSpec(std::vector<Axis>(dims, Axis{lower, upper, count}));
}

std::size_t GridSpec::Flatten(const std::vector<int>& index) const {
  std::size_t flat = 0;
  for (int d = 0; d < dims(); ++d) flat += strides_[d] * static_cast<std::size_t>(index[d]);
  return flat;
}

std::vector<int> GridSpec::Unflatten(std::size_t flat) const {
  std::vector<int> index(axes_.size());
  for (int d = 0; d < dims(); ++d) {
    index[d] = static_cast<int>(flat / strides_[d]);
    flat %= strides_[d];
  }
  return index;
}

StateVec GridSpec::Point(std::size_t flat) const {
  StateVec x(dims());
  for (int d = 0; d < dims(); ++d) {
    x[d] = axes_[d].point(static_cast<int>(flat / strides_[d]));
    flat %= strides_[d];
  }
  return x;
}

GridSpec GridSpec::Padded(int cells) const {
  if (cells < 0) throw ConfigError("oracle.pad_cells", "must be >= 0");
  std::vector<Axis> padded = axes_;
  for (Axis& ax : padded) {
    const double h = ax.step();
    ax.lower -= cells * h;
    ax.upper += cells * h;
    ax.count += 2 * cells;
  }
  return GridSpec(std::move(padded));
}

double ValueGrid::Interpolate(const StateVec& x) const {
  const int dims = spec.dims();
  if (x.size() != dims) throw DimensionMismatch("interpolation point has wrong dimension");
  std::size_t base = 0;
  double frac[8];
  std::size_t stride[8];
  for (int d = 0; d < dims; ++d) {
    const Axis& ax = spec.axis(d);
    const double u = std::clamp((x[d] - ax.lower) / ax.step(), 0.0, ax.count - 1.0);
    const int i = std::min(static_cast<int>(u), ax.count - 2);
    frac[d] = u - i;
    stride[d] = spec.stride(d);
    base += stride[d] * static_cast<std::size_t>(i);
  }
  double acc = 0.0;
  for (int corner = 0; corner < (1 << dims); ++corner) {
    double w = 1.0;
    std::size_t idx = base;
    for (int d = 0; d < dims; ++d) {
      if (corner & (1 << d)) {
        w *= frac[d];
        idx += stride[d];
      } else {
        w *= 1.0 - frac[d];
      }
    }
    if (w != 0.0) acc += w * values[idx];
  }
  return acc;
}

bool ValueGrid::AllFinite() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

KernelMask KernelMask::FromValues(const ValueGrid& grid) {
  KernelMask mask{grid.spec, std::vector<std::uint8_t>(grid.values.size())};
  for (std::size_t i = 0; i < grid.values.size(); ++i) mask.feasible[i] = grid.values[i] <= 0.0;
  return mask;
}

std::size_t KernelMask::Count() const {
  return static_cast<std::size_t>(std::count(feasible.begin(), feasible.end(), 1));
}

double KernelMask::Fraction() const {
  return feasible.empty() ? 0.0 : static_cast<double>(Count()) / feasible.size();
}

double KernelMask::Area() const {
  double cell = 1.0;
  for (const Axis& ax : spec.axes()) cell *= ax.step();
  return cell * static_cast<double>(Count());
}

namespace {

// Applies `op` to the Chebyshev neighbourhood of radius r around each cell.
template <typename Reduce>
KernelMask Morph(const KernelMask& in, int r, bool init, Reduce reduce) {
  KernelMask out{in.spec, std::vector<std::uint8_t>(in.feasible.size())};
  const GridSpec& g = in.spec;
  const int dims = g.dims();
  for (std::size_t flat = 0; flat < g.size(); ++flat) {
    const std::vector<int> idx = g.Unflatten(flat);
    bool acc = init;
    std::vector<int> off(dims, -r);
    while (true) {
      std::vector<int> n(dims);
      bool inside = true;
      for (int d = 0; d < dims; ++d) {
        n[d] = idx[d] + off[d];
        if (n[d] < 0 || n[d] >= g.axis(d).count) inside = false;
      }
      if (inside) acc = reduce(acc, in.feasible[g.Flatten(n)] != 0);
      int d = 0;
      while (d < dims && ++off[d] > r) off[d++] = -r;
      if (d == dims) break;
    }
    out.feasible[flat] = acc;
  }
  return out;
}

void RequireAligned(const KernelMask& a, const KernelMask& b) {
  if (!(a.spec == b.spec) || a.feasible.size() != b.feasible.size()) {
    throw DimensionMismatch("kernel masks are defined on different grids");
  }
}

}  // namespace

KernelMask KernelMask::Dilated(int cells) const {
  return Morph(*this, cells, false, [](bool acc, bool v) { return acc || v; });
}

KernelMask KernelMask::Eroded(int cells) const {
  return Morph(*this, cells, true, [](bool acc, bool v) { return acc && v; });
}

double Agreement(const KernelMask& a, const KernelMask& b) {
  RequireAligned(a, b);
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.feasible.size(); ++i) same += a.feasible[i] == b.feasible[i];
  return static_cast<double>(same) / a.feasible.size();
}

double IoU(const KernelMask& a, const KernelMask& b) {
  RequireAligned(a, b);
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.feasible.size(); ++i) {
    inter += a.feasible[i] && b.feasible[i];
    uni += a.feasible[i] || b.feasible[i];
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / uni;
}

bool IsSubset(const KernelMask& inner, const KernelMask& outer) {
  RequireAligned(inner, outer);
  for (std::size_t i = 0; i < inner.feasible.size(); ++i) {
    if (inner.feasible[i] && !outer.feasible[i]) return false;
  }
  return true;
}

}  // namespace rcrl::oracle
