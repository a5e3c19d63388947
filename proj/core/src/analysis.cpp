#include "costreach/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "costreach/errors.hpp"

namespace costreach {

bool member(const ValueField& field, const Vec& s, double threshold, OutOfDomainPolicy policy) {
  return field.interpolate(s, policy) <= threshold;
}

ValueField slice(const ValueField& field, const SliceSpec& fixed, OutOfDomainPolicy policy) {
  const GridSpec& grid = field.grid();
  const int n = grid.dim_count();
  if (static_cast<int>(fixed.size()) != n - 2)
    throw std::invalid_argument("slice: expected " + std::to_string(n - 2) +
                                " fixed dimensions, got " + std::to_string(fixed.size()));
  for (const auto& [d, value] : fixed) {
    if (d < 0 || d >= n)
      throw std::invalid_argument("slice: fixed dimension " + std::to_string(d) + " out of range");
    const GridDim& dim = grid.dim(d);
    if (!dim.periodic && (value < dim.lower || value > dim.upper))
      throw std::invalid_argument("slice: fixed value " + std::to_string(value) +
                                  " outside domain of dimension " + std::to_string(d));
  }

  std::vector<int> free_dims;
  for (int d = 0; d < n; ++d)
    if (!fixed.contains(d)) free_dims.push_back(d);

  if (n == 2) return field;  // zero fixed dimensions: identity copy

  GridSpec slice_grid(std::vector<GridDim>{grid.dim(free_dims[0]), grid.dim(free_dims[1])});
  std::vector<double> values(slice_grid.node_count());
  Vec point = Vec::zeros(n);
  for (const auto& [d, value] : fixed) point[d] = value;

  const int n0 = slice_grid.dim(0).point_count;
  const int n1 = slice_grid.dim(1).point_count;
  std::size_t flat = 0;
  for (int i = 0; i < n0; ++i) {
    point[free_dims[0]] = grid.node_coordinate(free_dims[0], i);
    for (int j = 0; j < n1; ++j, ++flat) {
      point[free_dims[1]] = grid.node_coordinate(free_dims[1], j);
      values[flat] = field.interpolate(point, policy);
    }
  }
  return ValueField(std::move(slice_grid), std::move(values), field.meta());
}

namespace {

// Canonical cell-edge id: axis 0 edges run between nodes (i, j) and
// (i+1 mod N0, j); axis 1 edges between (i, j) and (i, j+1 mod N1). Shared
// edges get one id, so crossing positions computed once match bit-exactly
// across neighboring cells.
struct EdgeKey {
  int axis;
  int i;
  int j;
  auto operator<=>(const EdgeKey&) const = default;
};

struct ContourBuilder {
  const ValueField& field;
  double threshold;
  int n0, n1;
  std::map<EdgeKey, std::array<double, 2>> crossing;
  std::map<EdgeKey, std::vector<EdgeKey>> links;

  bool inside(double v) const { return v <= threshold; }

  double node_value(int i, int j) const {
    const GridSpec& grid = field.grid();
    return field.values()[static_cast<std::size_t>(i) * grid.stride(0) +
                          static_cast<std::size_t>(j) * grid.stride(1)];
  }

  // Physical coordinate of node index k along dim, allowing k == count on a
  // periodic wrap edge (one spacing past the last node).
  double coord(int dim, int k) const {
    const GridSpec& grid = field.grid();
    if (k < grid.dim(dim).point_count) return grid.node_coordinate(dim, k);
    return grid.dim(dim).lower + k * grid.spacing(dim);
  }

  std::array<double, 2> edge_point(const EdgeKey& e) {
    const GridSpec& grid = field.grid();
    const int count0 = grid.dim(0).point_count;
    const int count1 = grid.dim(1).point_count;
    double va, vb;
    std::array<double, 2> a{}, b{};
    if (e.axis == 0) {
      const int i2 = (e.i + 1) % count0;
      va = node_value(e.i, e.j);
      vb = node_value(i2, e.j);
      a = {coord(0, e.i), coord(1, e.j)};
      b = {coord(0, e.i + 1), coord(1, e.j)};
    } else {
      const int j2 = (e.j + 1) % count1;
      va = node_value(e.i, e.j);
      vb = node_value(e.i, j2);
      a = {coord(0, e.i), coord(1, e.j)};
      b = {coord(0, e.i), coord(1, e.j + 1)};
    }
    const double t = (threshold - va) / (vb - va);
    std::array<double, 2> p{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
    // Wrap seam-cell crossings back into the periodic domain.
    for (int d = 0; d < 2; ++d) {
      const GridDim& dim = grid.dim(d);
      if (dim.periodic && p[static_cast<std::size_t>(d)] >= dim.upper)
        p[static_cast<std::size_t>(d)] -= dim.upper - dim.lower;
    }
    return p;
  }

  void add_segment(const EdgeKey& a, const EdgeKey& b) {
    if (!crossing.contains(a)) crossing[a] = edge_point(a);
    if (!crossing.contains(b)) crossing[b] = edge_point(b);
    links[a].push_back(b);
    links[b].push_back(a);
  }

  void run() {
    const GridSpec& grid = field.grid();
    const int cells0 = grid.dim(0).periodic ? n0 : n0 - 1;
    const int cells1 = grid.dim(1).periodic ? n1 : n1 - 1;
    for (int i = 0; i < cells0; ++i) {
      for (int j = 0; j < cells1; ++j) {
        const int i2 = (i + 1) % n0;
        const int j2 = (j + 1) % n1;
        const double va = node_value(i, j);    // (i, j)
        const double vb = node_value(i2, j);   // (i+1, j)
        const double vc = node_value(i2, j2);  // (i+1, j+1)
        const double vd = node_value(i, j2);   // (i, j+1)
        const unsigned code = (inside(va) ? 1u : 0u) | (inside(vb) ? 2u : 0u) |
                              (inside(vc) ? 4u : 0u) | (inside(vd) ? 8u : 0u);
        if (code == 0 || code == 15) continue;

        const EdgeKey bottom{0, i, j};
        const EdgeKey right{1, i + 1 == n0 ? 0 : i + 1, j};
        const EdgeKey top{0, i, j + 1 == n1 ? 0 : j + 1};
        const EdgeKey left{1, i, j};

        switch (code) {
          case 1: add_segment(bottom, left); break;
          case 2: add_segment(bottom, right); break;
          case 3: add_segment(left, right); break;
          case 4: add_segment(right, top); break;
          case 6: add_segment(bottom, top); break;
          case 7: add_segment(left, top); break;
          case 8: add_segment(left, top); break;
          case 9: add_segment(bottom, top); break;
          case 11: add_segment(right, top); break;
          case 12: add_segment(left, right); break;
          case 13: add_segment(bottom, right); break;
          case 14: add_segment(bottom, left); break;
          case 5:  // A and C inside
            if (inside(0.25 * (va + vb + vc + vd))) {
              add_segment(bottom, right);
              add_segment(top, left);
            } else {
              add_segment(bottom, left);
              add_segment(right, top);
            }
            break;
          case 10:  // B and D inside
            if (inside(0.25 * (va + vb + vc + vd))) {
              add_segment(bottom, left);
              add_segment(right, top);
            } else {
              add_segment(bottom, right);
              add_segment(top, left);
            }
            break;
          default: break;
        }
      }
    }
  }

  // Chains crossings into polylines: open chains first (from degree-1 ends in
  // key order), then remaining closed loops.
  std::vector<std::vector<std::array<double, 2>>> stitch() {
    std::vector<std::vector<std::array<double, 2>>> polylines;
    std::set<EdgeKey> visited;

    auto walk = [&](const EdgeKey& start) {
      std::vector<std::array<double, 2>> line;
      EdgeKey current = start;
      EdgeKey previous = start;
      bool first = true;
      while (true) {
        visited.insert(current);
        line.push_back(crossing.at(current));
        const auto& neighbors = links.at(current);
        const EdgeKey* next = nullptr;
        for (const EdgeKey& candidate : neighbors) {
          if (!first && candidate == previous) continue;
          if (visited.contains(candidate)) continue;
          next = &candidate;
          break;
        }
        if (!next) {
          // Close the loop explicitly when we return to the start.
          if (!first) {
            for (const EdgeKey& candidate : neighbors)
              if (candidate == start && line.size() > 2) line.push_back(crossing.at(start));
          }
          break;
        }
        previous = current;
        current = *next;
        first = false;
      }
      return line;
    };

    for (const auto& [edge, neighbors] : links)
      if (neighbors.size() == 1 && !visited.contains(edge)) polylines.push_back(walk(edge));
    for (const auto& [edge, neighbors] : links)
      if (!visited.contains(edge)) polylines.push_back(walk(edge));
    return polylines;
  }
};

}  // namespace

LevelSetContour extract_contours(const ValueField& slice_field, double threshold,
                                 SliceSpec slice_desc) {
  const GridSpec& grid = slice_field.grid();
  if (grid.dim_count() != 2)
    throw std::invalid_argument("extract_contours: expected a 2-D field, got " +
                                std::to_string(grid.dim_count()) + " dimensions");
  LevelSetContour contour;
  contour.threshold = threshold;
  contour.slice = std::move(slice_desc);
  if (threshold < slice_field.min_value() || threshold > slice_field.max_value()) return contour;

  ContourBuilder builder{slice_field, threshold, grid.dim(0).point_count,
                         grid.dim(1).point_count, {}, {}};
  builder.run();
  contour.polylines = builder.stitch();
  return contour;
}

MaskField mask(const ValueField& field, double threshold) {
  MaskField out{field.grid(), std::vector<std::uint8_t>(field.grid().node_count()), field.meta()};
  const std::span<const double> values = field.values();
  for (std::size_t i = 0; i < values.size(); ++i) out.values[i] = values[i] <= threshold ? 1 : 0;
  return out;
}

namespace {

std::string format_double(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

}  // namespace

std::string to_json(const LevelSetContour& contour) {
  nlohmann::json doc;
  doc["threshold"] = contour.threshold;
  auto& slice = doc["slice"] = nlohmann::json::object();
  for (const auto& [d, value] : contour.slice) slice[std::to_string(d)] = value;
  auto& lines = doc["polylines"] = nlohmann::json::array();
  for (const auto& polyline : contour.polylines) {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : polyline) points.push_back({p[0], p[1]});
    lines.push_back(std::move(points));
  }
  return doc.dump(2);
}

std::string to_csv(const LevelSetContour& contour) {
  std::string out = "x,y,polyline_id\n";
  for (std::size_t id = 0; id < contour.polylines.size(); ++id)
    for (const auto& p : contour.polylines[id])
      out += format_double(p[0]) + "," + format_double(p[1]) + "," + std::to_string(id) + "\n";
  return out;
}

}  // namespace costreach
