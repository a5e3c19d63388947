#pragma once

#include <string>
#include <vector>

#include "costreach/dynamics.hpp"
#include "costreach/grid.hpp"

namespace costreach {

struct ControlChoice {
  int index = 0;
  Vec control;
  double candidate_value = 0.0;  // minimized stage cost + interpolated next value
};

/// Stationary feedback from a converged field: the one-step lookahead argmin
/// of [frozen stage cost + interpolated value at the frozen step], evaluated
/// with the field's own dt. Exactly the solver's per-node minimization, so
/// the chosen candidate value reproduces the Bellman sweep at grid nodes.
/// Ties go to the lowest control index.
ControlChoice choose_control(const ValueField& field, const SystemModel& model,
                             const CostSpec& costs, const TargetSet& target, const Vec& s,
                             OutOfDomainPolicy policy = OutOfDomainPolicy::Saturate);

Vec optimal_control(const ValueField& field, const SystemModel& model, const CostSpec& costs,
                    const TargetSet& target, const Vec& s,
                    OutOfDomainPolicy policy = OutOfDomainPolicy::Saturate);

/// Closed-loop rollout under the stationary feedback, using the true dynamics
/// and the true running cost. Stops at the first step that enters the target
/// (adding the endpoint cost there), on leaving the domain, or after
/// max_steps.
Trajectory simulate_closed_loop(const ValueField& field, const SystemModel& model,
                                const CostSpec& costs, const TargetSet& target, const Vec& s0,
                                int max_steps,
                                OutOfDomainPolicy policy = OutOfDomainPolicy::Saturate);

struct VerifyOptions {
  double band_cells = 2.0;       // exclude |value - J| <= band_cells * local cell range
  double cost_tolerance = -1.0;  // < 0: derived as 2 * dt * (sampled max running cost)
  int max_steps = 0;             // 0: 2 * ceil(horizon / dt)
  OutOfDomainPolicy policy = OutOfDomainPolicy::Saturate;
};

struct VerifyFailure {
  Vec state;
  double field_value = 0.0;
  double sim_cost = 0.0;
  bool reached = false;
  double margin = 0.0;  // J - field_value
};

struct VerifyRow {
  double admissible_cost = 0.0;
  std::size_t sample_count = 0;
  std::size_t predicted_inside = 0;
  std::size_t excluded_band = 0;
  std::size_t attempted = 0;
  std::size_t successes = 0;
  std::vector<VerifyFailure> failures;
};

struct VerificationReport {
  std::vector<VerifyRow> rows;
  double band_cells = 0.0;
  double cost_tolerance = 0.0;
};

/// For each admissible cost J: every sampled state predicted inside the
/// J-sub-level set and clear of the boundary band is rolled out closed-loop;
/// success means the target is reached with performance index within
/// J + cost_tolerance. Failures are recorded, not thrown.
VerificationReport verify_region(const ValueField& field, const SystemModel& model,
                                 const CostSpec& costs, const TargetSet& target,
                                 std::span<const double> admissible_costs,
                                 std::span<const Vec> samples, const VerifyOptions& options = {});

std::string to_json(const VerificationReport& report);
std::string to_csv(const Trajectory& trajectory);  // t, state..., u..., running J

}  // namespace costreach
