#include "costreach/dynamics.hpp"

#include <cmath>
#include <string>

#include "costreach/errors.hpp"

namespace costreach {

namespace {

void check_derivative(const Vec& k, const Vec& s) {
  for (int i = 0; i < k.size(); ++i) {
    if (!std::isfinite(k[i])) {
      std::string msg = "vector field returned a non-finite derivative (component " +
                        std::to_string(i) + ") at state (";
      for (int d = 0; d < s.size(); ++d) msg += (d ? ", " : "") + std::to_string(s[d]);
      throw ModelError(msg + ")");
    }
  }
}

double wrap_coordinate(double x, double lower, double upper) {
  const double period = upper - lower;
  double t = (x - lower) / period;
  t -= std::floor(t);
  double wrapped = lower + t * period;
  if (wrapped >= upper) wrapped = lower;  // t*period can round up to the full period
  return wrapped;
}

}  // namespace

Vec integrate_step(const SystemModel& model, const Vec& s, const Vec& u, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_step: dt must be positive");
  const int n = model.state_dim;

  const Vec k1 = model.vector_field(s, u);
  check_derivative(k1, s);
  Vec stage = Vec::zeros(n);
  for (int i = 0; i < n; ++i) stage[i] = s[i] + 0.5 * dt * k1[i];

  const Vec k2 = model.vector_field(stage, u);
  check_derivative(k2, stage);
  for (int i = 0; i < n; ++i) stage[i] = s[i] + 0.5 * dt * k2[i];

  const Vec k3 = model.vector_field(stage, u);
  check_derivative(k3, stage);
  for (int i = 0; i < n; ++i) stage[i] = s[i] + dt * k3[i];

  const Vec k4 = model.vector_field(stage, u);
  check_derivative(k4, stage);

  Vec next = Vec::zeros(n);
  for (int i = 0; i < n; ++i)
    next[i] = s[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

  for (int i = 0; i < n && i < static_cast<int>(model.wrap.size()); ++i) {
    const WrapSpec& w = model.wrap[static_cast<std::size_t>(i)];
    if (w.periodic) next[i] = wrap_coordinate(next[i], w.lower, w.upper);
  }
  return next;
}

Vec frozen_step(const SystemModel& model, const TargetSet& target, const Vec& s, const Vec& u,
                double dt) {
  return target.contains(s) ? s : integrate_step(model, s, u, dt);
}

std::vector<Vec> make_interval_controls(double lo, double hi, int count) {
  if (count < 1) throw std::invalid_argument("make_interval_controls: count must be >= 1");
  std::vector<Vec> controls;
  controls.reserve(static_cast<std::size_t>(count));
  if (count == 1) {
    controls.push_back(Vec{0.5 * (lo + hi)});
    return controls;
  }
  const double step = (hi - lo) / (count - 1);
  for (int i = 0; i < count; ++i) controls.push_back(Vec{lo + i * step});
  return controls;
}

namespace {

// Visits up to max_samples nodes on a uniform sub-lattice of the grid.
template <typename Fn>
void for_each_sampled_node(const GridSpec& grid, std::size_t max_samples, Fn&& fn) {
  const int n = grid.dim_count();
  std::vector<int> counts(static_cast<std::size_t>(n));
  std::vector<int> strides(static_cast<std::size_t>(n), 1);
  std::size_t total = 1;
  for (int d = 0; d < n; ++d) {
    counts[static_cast<std::size_t>(d)] = grid.dim(d).point_count;
    total *= static_cast<std::size_t>(grid.dim(d).point_count);
  }
  // Thin each dimension evenly until the lattice fits the budget.
  while (total > max_samples) {
    total = 1;
    for (int d = 0; d < n; ++d) {
      auto& stride = strides[static_cast<std::size_t>(d)];
      stride *= 2;
      const int kept = (counts[static_cast<std::size_t>(d)] + stride - 1) / stride;
      total *= static_cast<std::size_t>(std::max(kept, 1));
    }
  }
  std::vector<int> index(static_cast<std::size_t>(n), 0);
  bool done = false;
  while (!done) {
    Vec point = Vec::zeros(n);
    for (int d = 0; d < n; ++d) point[d] = grid.node_coordinate(d, index[static_cast<std::size_t>(d)]);
    fn(point);
    done = true;
    for (int d = n - 1; d >= 0; --d) {
      index[static_cast<std::size_t>(d)] += strides[static_cast<std::size_t>(d)];
      if (index[static_cast<std::size_t>(d)] < counts[static_cast<std::size_t>(d)]) {
        done = false;
        break;
      }
      index[static_cast<std::size_t>(d)] = 0;
    }
  }
}

}  // namespace

CostBounds estimate_cost_bounds(const CostSpec& costs, const GridSpec& grid,
                                std::span<const Vec> controls, std::size_t max_samples) {
  CostBounds bounds{std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity()};
  for_each_sampled_node(grid, max_samples, [&](const Vec& s) {
    for (const Vec& u : controls) bounds.lambda = std::min(bounds.lambda, costs.running_cost(s, u));
    bounds.Lambda = std::min(bounds.Lambda, costs.endpoint_cost(s));
  });
  return bounds;
}

void check_cost_bounds(const CostSpec& costs, const GridSpec& grid, std::span<const Vec> controls,
                       std::size_t max_samples) {
  if (!(costs.lambda > 0.0))
    throw ValidationError("cost.lambda must be positive, got " + std::to_string(costs.lambda));
  const CostBounds sampled = estimate_cost_bounds(costs, grid, controls, max_samples);
  if (sampled.lambda < costs.lambda - 1e-12)
    throw ValidationError("sampled running cost " + std::to_string(sampled.lambda) +
                          " undercuts declared lambda " + std::to_string(costs.lambda));
  if (sampled.Lambda < costs.Lambda - 1e-12)
    throw ValidationError("sampled endpoint cost " + std::to_string(sampled.Lambda) +
                          " undercuts declared Lambda " + std::to_string(costs.Lambda));
}

}  // namespace costreach
