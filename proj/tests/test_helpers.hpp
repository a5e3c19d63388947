#pragma once

#include "costreach/solver.hpp"
#include "costreach/systems.hpp"

namespace costreach::testing {

struct OneDimProblem {
  SystemModel model;
  CostSpec costs;
  TargetSet target;
};

/// Minimal min-time problem: s' = u with u in {-1, 0, 1}, target [-0.1, 0.1],
/// unit running cost, zero endpoint cost. Values are travel times.
inline OneDimProblem one_dim_min_time() {
  OneDimProblem p;
  p.model.state_dim = 1;
  p.model.control_values = {Vec{-1.0}, Vec{0.0}, Vec{1.0}};
  p.model.vector_field = [](const Vec&, const Vec& u) { return Vec{u[0]}; };
  p.model.wrap = {WrapSpec{}};
  p.target.boxes = {AxisBox{{-0.1, 0.1}}};
  p.costs.running_cost = [](const Vec&, const Vec&) { return 1.0; };
  p.costs.endpoint_cost = [](const Vec&) { return 0.0; };
  p.costs.lambda = 1.0;
  p.costs.Lambda = 0.0;
  return p;
}

}  // namespace costreach::testing
