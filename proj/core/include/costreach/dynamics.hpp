#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "costreach/grid.hpp"
#include "costreach/vec.hpp"

namespace costreach {

/// Periodic identification of one state component. Wrapped after each
/// integration step; must match the grid the solver runs on.
struct WrapSpec {
  bool periodic = false;
  double lower = 0.0;
  double upper = 0.0;
};

/// Control system ds/dt = f(s, u) with a finite control sample set.
///
/// All evaluators are pure functions of their inputs; models are immutable
/// once built and safe to share across threads.
struct SystemModel {
  int state_dim = 0;
  std::vector<Vec> control_values;
  std::function<Vec(const Vec& state, const Vec& control)> vector_field;
  std::vector<WrapSpec> wrap;  // size state_dim
};

/// Closed interval, unconstrained by default.
struct AxisInterval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

using AxisBox = std::vector<AxisInterval>;  // one interval per state dimension

/// Target region: union of closed axis-aligned boxes, optionally combined
/// with an implicit membership function (inside iff value <= 0).
struct TargetSet {
  std::vector<AxisBox> boxes;
  std::function<double(const Vec&)> implicit;

  bool contains(const Vec& s) const {
    for (const AxisBox& box : boxes) {
      bool inside = true;
      for (std::size_t d = 0; d < box.size(); ++d) {
        const double x = s[static_cast<int>(d)];
        if (x < box[d].lo || x > box[d].hi) {
          inside = false;
          break;
        }
      }
      if (inside) return true;
    }
    return implicit && implicit(s) <= 0.0;
  }
};

/// Running cost c(s, u) with lower bound lambda > 0, endpoint cost Phi(s)
/// with lower bound Lambda.
struct CostSpec {
  std::function<double(const Vec& state, const Vec& control)> running_cost;
  std::function<double(const Vec& state)> endpoint_cost;
  double lambda = 0.0;
  double Lambda = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<Vec> controls;        // one per step taken; size == times.size() - 1
  std::vector<double> running_cost; // performance index accumulated through each state
  double accumulated_cost = 0.0;
  bool reached_target = false;
  std::optional<double> first_hit_time;
  bool exited_domain = false;
};

/// One step of classical RK4 under constant control; periodic components are
/// wrapped into their period afterwards. Throws ModelError on a non-finite
/// derivative.
Vec integrate_step(const SystemModel& model, const Vec& s, const Vec& u, double dt);

/// Frozen dynamics: states inside the target stay put.
Vec frozen_step(const SystemModel& model, const TargetSet& target, const Vec& s, const Vec& u, double dt);

/// Integral of the running cost over one step, left-endpoint rectangle rule.
inline double stage_cost(const CostSpec& costs, const Vec& s, const Vec& u, double dt) {
  return dt == 0.0 ? 0.0 : costs.running_cost(s, u) * dt;
}

/// Frozen stage cost: zero inside the target.
inline double frozen_stage_cost(const CostSpec& costs, const TargetSet& target, const Vec& s,
                                const Vec& u, double dt) {
  return target.contains(s) ? 0.0 : stage_cost(costs, s, u, dt);
}

/// Uniform sampling of a scalar control interval, endpoints included.
std::vector<Vec> make_interval_controls(double lo, double hi, int count);

struct CostBounds {
  double lambda;
  double Lambda;
};

/// Smallest running/endpoint cost over a sub-lattice of grid nodes crossed
/// with the control set. A sampled estimate, not a certified bound.
CostBounds estimate_cost_bounds(const CostSpec& costs, const GridSpec& grid,
                                std::span<const Vec> controls, std::size_t max_samples = 100000);

/// Verifies the declared lambda/Lambda against sampled costs
/// (tolerance 1e-12); throws ValidationError on violation.
void check_cost_bounds(const CostSpec& costs, const GridSpec& grid, std::span<const Vec> controls,
                       std::size_t max_samples = 100000);

}  // namespace costreach
