#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "costreach/dynamics.hpp"
#include "costreach/grid.hpp"

namespace costreach {

struct SolverConfig {
  double dt = 0.0;
  int step_count = 0;      // m
  double horizon = 0.0;    // resolved: step_count * dt
  OutOfDomainPolicy policy = OutOfDomainPolicy::Saturate;
  int threads = 0;         // 0: COSTREACH_THREADS env var, else hardware concurrency
  std::string problem_digest;

  static SolverConfig from_steps(double dt, int step_count);

  /// Smallest whole number of steps covering `min_horizon`.
  static SolverConfig from_horizon(double min_horizon, double dt);

  void validate() const;
};

struct StepStats {
  int step = 0;
  double wall_seconds = 0.0;
  double max_value = 0.0;
  double min_value = 0.0;
  std::size_t changed_nodes = 0;  // |new - old| > 1e-12
};

struct SolveReport {
  std::vector<StepStats> steps;
  std::string final_digest;
};

std::string to_json(const SolveReport& report);

/// Horizon big enough that every admissible cost below J_max stays in the
/// validity region: (J_max - Lambda) / lambda + epsilon.
double compute_horizon(double J_max, double lambda, double Lambda, double epsilon);

/// Terminal condition: endpoint cost sampled at every node, step_index 0.
ValueField init_terminal(const GridSpec& grid, const CostSpec& costs, FieldMeta meta = {});

/// One backward dynamic-programming sweep:
///   W'(s) = min over u of [ frozen stage cost + W interpolated at the frozen
///   step from s under u ].
///
/// Jacobi-style: reads only the previous field, writes a fresh buffer, so
/// sweeps are order-independent. Parallel over nodes with results identical
/// to the sequential sweep. Ties in the min go to the lowest control index.
ValueField bellman_step(const ValueField& field, const SystemModel& model, const CostSpec& costs,
                        const TargetSet& target, const SolverConfig& config);

/// Terminal condition plus `step_count` Bellman sweeps. Deterministic:
/// identical inputs produce bit-identical fields.
std::pair<ValueField, SolveReport> solve(const SystemModel& model, const CostSpec& costs,
                                         const TargetSet& target, const GridSpec& grid,
                                         const SolverConfig& config);

}  // namespace costreach
