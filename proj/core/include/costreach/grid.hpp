#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "costreach/vec.hpp"

namespace costreach {

/// How interpolation treats queries outside a non-periodic dimension's range.
///
/// Saturate returns the field's current maximum value, so a transition that
/// leaves the computational domain can never look cheaper than staying inside.
/// Clamp projects the query onto the domain boundary first.
enum class OutOfDomainPolicy : std::uint8_t {
  Saturate,
  Clamp,
};

struct GridDim {
  double lower = 0.0;
  double upper = 0.0;
  int point_count = 0;
  bool periodic = false;

  bool operator==(const GridDim&) const = default;
};

/// Dense Cartesian grid over a rectangular domain.
///
/// Node layout per dimension:
///   non-periodic: node i at lower + i * (upper - lower) / (point_count - 1),
///                 both endpoints are nodes;
///   periodic:     node i at lower + i * (upper - lower) / point_count,
///                 the coordinate `upper` is identified with `lower` and the
///                 duplicate endpoint node is not stored.
///
/// Buffers indexed by this grid are row-major with the first declared
/// dimension outermost.
class GridSpec {
public:
  explicit GridSpec(std::vector<GridDim> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw std::invalid_argument("GridSpec: needs at least one dimension");
    if (dims_.size() > static_cast<std::size_t>(kMaxDim))
      throw std::invalid_argument("GridSpec: dimension count exceeds " + std::to_string(kMaxDim));
    spacing_.resize(dims_.size());
    node_coords_.resize(dims_.size());
    for (std::size_t d = 0; d < dims_.size(); ++d) {
      const GridDim& dim = dims_[d];
      if (!(dim.upper > dim.lower))
        throw std::invalid_argument("GridSpec: upper must exceed lower in dimension " + std::to_string(d));
      if (dim.point_count < 2)
        throw std::invalid_argument("GridSpec: need at least 2 points in dimension " + std::to_string(d));
      const int denom = dim.periodic ? dim.point_count : dim.point_count - 1;
      spacing_[d] = (dim.upper - dim.lower) / denom;
      node_coords_[d].resize(static_cast<std::size_t>(dim.point_count));
      for (int i = 0; i < dim.point_count; ++i)
        node_coords_[d][static_cast<std::size_t>(i)] = dim.lower + i * spacing_[d];
    }
    strides_.resize(dims_.size());
    strides_.back() = 1;
    for (int d = static_cast<int>(dims_.size()) - 2; d >= 0; --d)
      strides_[static_cast<std::size_t>(d)] =
          strides_[static_cast<std::size_t>(d) + 1] * static_cast<std::size_t>(dims_[static_cast<std::size_t>(d) + 1].point_count);
    node_count_ = strides_[0] * static_cast<std::size_t>(dims_[0].point_count);
  }

  int dim_count() const { return static_cast<int>(dims_.size()); }
  const GridDim& dim(int d) const { return dims_[static_cast<std::size_t>(d)]; }
  const std::vector<GridDim>& dims() const { return dims_; }
  double spacing(int d) const { return spacing_[static_cast<std::size_t>(d)]; }
  std::size_t stride(int d) const { return strides_[static_cast<std::size_t>(d)]; }
  std::size_t node_count() const { return node_count_; }

  /// Physical coordinate of node i along dimension d. Unchecked.
  double node_coordinate(int d, int i) const {
    return node_coords_[static_cast<std::size_t>(d)][static_cast<std::size_t>(i)];
  }

  /// Physical coordinates of a node; throws std::out_of_range on a bad index.
  Vec node_coordinates(std::span<const int> index) const {
    if (index.size() != dims_.size())
      throw std::out_of_range("node_coordinates: index has wrong dimension count");
    Vec point = Vec::zeros(dim_count());
    for (int d = 0; d < dim_count(); ++d) {
      const int i = index[static_cast<std::size_t>(d)];
      if (i < 0 || i >= dims_[static_cast<std::size_t>(d)].point_count)
        throw std::out_of_range("node_coordinates: index " + std::to_string(i) +
                                " out of range in dimension " + std::to_string(d));
      point[d] = node_coordinate(d, i);
    }
    return point;
  }

  std::size_t flat_index(std::span<const int> index) const {
    if (index.size() != dims_.size())
      throw std::out_of_range("flat_index: index has wrong dimension count");
    std::size_t flat = 0;
    for (int d = 0; d < dim_count(); ++d) {
      const int i = index[static_cast<std::size_t>(d)];
      if (i < 0 || i >= dims_[static_cast<std::size_t>(d)].point_count)
        throw std::out_of_range("flat_index: index out of range in dimension " + std::to_string(d));
      flat += static_cast<std::size_t>(i) * strides_[static_cast<std::size_t>(d)];
    }
    return flat;
  }

  void unflatten(std::size_t flat, std::span<int> index) const {
    for (int d = 0; d < dim_count(); ++d) {
      index[static_cast<std::size_t>(d)] = static_cast<int>(flat / strides_[static_cast<std::size_t>(d)]);
      flat %= strides_[static_cast<std::size_t>(d)];
    }
  }

  /// Row-major increment of a multi-index (last dimension fastest). Unchecked.
  void advance(std::span<int> index) const {
    for (int d = dim_count() - 1; d >= 0; --d) {
      int& i = index[static_cast<std::size_t>(d)];
      if (++i < dims_[static_cast<std::size_t>(d)].point_count) return;
      i = 0;
    }
  }

  /// True when every non-periodic coordinate lies within its closed range.
  /// Periodic coordinates always count as inside.
  bool contains(const Vec& p) const {
    if (p.size() != dim_count()) return false;
    for (int d = 0; d < dim_count(); ++d) {
      const GridDim& dim = dims_[static_cast<std::size_t>(d)];
      if (!dim.periodic && (p[d] < dim.lower || p[d] > dim.upper)) return false;
    }
    return true;
  }

  bool operator==(const GridSpec& other) const { return dims_ == other.dims_; }

private:
  std::vector<GridDim> dims_;
  std::vector<double> spacing_;
  std::vector<std::size_t> strides_;
  std::vector<std::vector<double>> node_coords_;
  std::size_t node_count_ = 0;
};

struct FieldMeta {
  std::uint32_t step_index = 0;  // k: number of Bellman steps applied
  double dt = 0.0;               // seconds per step
  double horizon = 0.0;          // resolved step_count * dt
  std::string problem_digest;

  bool operator==(const FieldMeta&) const = default;
};

/// Grid-sampled scalar field, immutable after construction.
///
/// Stores one 64-bit value per node in row-major node order and supports
/// multilinear interpolation over the 2^n enclosing nodes. Safe for
/// concurrent readers.
class ValueField {
public:
  ValueField(GridSpec grid, std::vector<double> values, FieldMeta meta)
      : grid_(std::move(grid)), values_(std::move(values)), meta_(std::move(meta)) {
    if (values_.size() != grid_.node_count())
      throw std::invalid_argument("ValueField: buffer length " + std::to_string(values_.size()) +
                                  " does not match node count " + std::to_string(grid_.node_count()));
    min_value_ = std::numeric_limits<double>::infinity();
    max_value_ = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < values_.size(); ++i) {
      const double v = values_[i];
      if (!std::isfinite(v))
        throw std::invalid_argument("ValueField: non-finite value at node " + std::to_string(i));
      min_value_ = std::min(min_value_, v);
      max_value_ = std::max(max_value_, v);
    }
  }

  const GridSpec& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  const FieldMeta& meta() const { return meta_; }
  double min_value() const { return min_value_; }
  double max_value() const { return max_value_; }

  double value_at(std::span<const int> index) const { return values_[grid_.flat_index(index)]; }

  /// Multilinear interpolation at `point`.
  ///
  /// Periodic coordinates are wrapped modulo their period before cell lookup.
  /// Non-periodic coordinates outside the domain follow `policy`. Queries
  /// that land on a node (within a tight snap tolerance in index space)
  /// reproduce the stored node value exactly.
  double interpolate(const Vec& point, OutOfDomainPolicy policy = OutOfDomainPolicy::Saturate) const {
    Cell cell;
    if (!locate(point, policy, cell)) return max_value_;
    const int n = grid_.dim_count();
    const unsigned corners = 1u << n;
    double acc = 0.0;
    for (unsigned corner = 0; corner < corners; ++corner) {
      double weight = 1.0;
      std::size_t offset = 0;
      for (int d = 0; d < n; ++d) {
        if (corner >> d & 1u) {
          weight *= cell.frac[static_cast<std::size_t>(d)];
          offset += cell.hi_offset[static_cast<std::size_t>(d)];
        } else {
          weight *= 1.0 - cell.frac[static_cast<std::size_t>(d)];
          offset += cell.lo_offset[static_cast<std::size_t>(d)];
        }
      }
      acc += weight * values_[offset];
    }
    return acc;
  }

  /// Spread (max - min) of the 2^n node values enclosing `point`; used as the
  /// per-cell value scale when excluding near-threshold states.
  double local_cell_range(const Vec& point, OutOfDomainPolicy policy = OutOfDomainPolicy::Saturate) const {
    Cell cell;
    if (!locate(point, policy, cell)) return 0.0;
    const int n = grid_.dim_count();
    const unsigned corners = 1u << n;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (unsigned corner = 0; corner < corners; ++corner) {
      std::size_t offset = 0;
      for (int d = 0; d < n; ++d)
        offset += (corner >> d & 1u) ? cell.hi_offset[static_cast<std::size_t>(d)]
                                     : cell.lo_offset[static_cast<std::size_t>(d)];
      lo = std::min(lo, values_[offset]);
      hi = std::max(hi, values_[offset]);
    }
    return hi - lo;
  }

private:
  struct Cell {
    std::array<std::size_t, kMaxDim> lo_offset;
    std::array<std::size_t, kMaxDim> hi_offset;
    std::array<double, kMaxDim> frac;
  };

  // Queries within this distance of a node, measured in index units, are
  // treated as exactly on the node.
  static constexpr double kNodeSnap = 1e-9;

  bool locate(const Vec& point, OutOfDomainPolicy policy, Cell& cell) const {
    const int n = grid_.dim_count();
    if (point.size() != n)
      throw std::invalid_argument("interpolate: point has wrong dimension count");
    for (int d = 0; d < n; ++d) {
      double x = point[d];
      if (!std::isfinite(x))
        throw std::invalid_argument("interpolate: non-finite coordinate in dimension " + std::to_string(d));
      const GridDim& dim = grid_.dim(d);
      const std::size_t count = static_cast<std::size_t>(dim.point_count);
      const std::size_t stride = grid_.stride(d);
      std::size_t i0;
      std::size_t i1;
      double frac;
      if (dim.periodic) {
        const double period = dim.upper - dim.lower;
        double t = (x - dim.lower) / period;
        t -= std::floor(t);
        double u = t * static_cast<double>(count);
        const double nearest = std::round(u);
        if (std::abs(u - nearest) < kNodeSnap) u = nearest;
        if (u >= static_cast<double>(count)) u -= static_cast<double>(count);
        i0 = static_cast<std::size_t>(u);
        frac = u - static_cast<double>(i0);
        i1 = i0 + 1 == count ? 0 : i0 + 1;
      } else {
        if (x < dim.lower || x > dim.upper) {
          if (policy == OutOfDomainPolicy::Saturate) return false;
          x = std::clamp(x, dim.lower, dim.upper);
        }
        double u = (x - dim.lower) / grid_.spacing(d);
        const double nearest = std::round(u);
        if (std::abs(u - nearest) < kNodeSnap) u = nearest;
        if (u <= 0.0) {
          i0 = 0;
          frac = 0.0;
        } else if (u >= static_cast<double>(count - 1)) {
          i0 = count - 2;
          frac = 1.0;
        } else {
          i0 = static_cast<std::size_t>(u);
          frac = u - static_cast<double>(i0);
        }
        i1 = i0 + 1;
      }
      cell.lo_offset[static_cast<std::size_t>(d)] = i0 * stride;
      cell.hi_offset[static_cast<std::size_t>(d)] = i1 * stride;
      cell.frac[static_cast<std::size_t>(d)] = frac;
    }
    return true;
  }

  GridSpec grid_;
  std::vector<double> values_;
  FieldMeta meta_;
  double min_value_ = 0.0;
  double max_value_ = 0.0;
};

/// Boolean companion of ValueField: one byte per node, same node order.
struct MaskField {
  GridSpec grid;
  std::vector<std::uint8_t> values;
  FieldMeta meta;
};

}  // namespace costreach
