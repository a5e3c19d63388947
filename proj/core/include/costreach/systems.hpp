#pragma once

#include <string>

#include "costreach/dynamics.hpp"

namespace costreach {

enum class EndpointCost {
  Zero,
  /// -exp(-x^2 - y^2 - min(theta, 2*pi - theta)): a well at the origin with
  /// heading aligned to zero. Planar flight only.
  ExpWell,
};

struct BuiltinParams {
  int control_count = 21;
  double gamma = 0.0;  // path-length weight in the planar flight running cost
  EndpointCost endpoint = EndpointCost::Zero;
};

struct BuiltinProblem {
  std::string name;
  SystemModel model;
  CostSpec costs;
  TargetSet target;
};

/// Built-in benchmark systems.
///
/// "two_dim_poly":  x' = y + x^2, y' = -x + y^3 + u, u in [-1, 1];
///                  target [-0.2, 0.2]^2, unit running cost, zero endpoint.
/// "planar_flight": unit-speed vehicle with controllable heading rate in the
///                  wind field (y + 0.1 y^3, -x - 0.1 x^3); theta periodic on
///                  [0, 2*pi); target x in [-0.5, 0.5], y in [1.5, 2.5];
///                  running cost 1 + gamma * sqrt(x'^2 + y'^2).
///
/// Throws ValidationError for an unknown name.
BuiltinProblem builtin_system(const std::string& name, const BuiltinParams& params = {});

/// Fingerprint of a problem instance (label + control set + step size) used
/// to guard field/oracle comparisons. The label must identify system, cost
/// and target; grids intentionally do not participate.
std::string make_problem_digest(const std::string& label, const SystemModel& model, double dt);

}  // namespace costreach
