#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "costreach/dynamics.hpp"
#include "costreach/grid.hpp"

namespace costreach {

struct OracleResult {
  Vec start;
  double min_cost = 0.0;  // best performance index; saturation value when no hit
  bool hit = false;
  int hit_step = -1;
  std::uint64_t expansions = 0;  // transitions explored (diagnostic)
};

/// Exact discrete minimum over piecewise-constant control sequences.
///
/// Depth-first enumeration of all control sequences of length <= steps with
/// the true dynamics; a branch terminates on first entry into the target,
/// contributing its accumulated stage costs plus the endpoint cost there.
/// Branches whose cost floor (accumulated + lambda * dt + Lambda) cannot beat
/// the incumbent are pruned; lambda > 0 makes the floor valid, so pruning
/// never changes the minimum. When no sequence hits, min_cost is the
/// saturation value lambda * steps * dt + Lambda.
///
/// A non-empty `domain` terminates branches that leave it without a hit,
/// mirroring the solver's worst-case treatment of domain exits (and keeping
/// enumeration where the model is bounded).
///
/// Refuses with BudgetError when |controls|^steps exceeds the budget.
OracleResult brute_force_value(const SystemModel& model, const CostSpec& costs,
                               const TargetSet& target, const Vec& s0, int steps, double dt,
                               double budget = 1e7, const AxisBox& domain = {});

/// Oracle confinement box for a grid: its non-periodic extents.
AxisBox domain_box(const GridSpec& grid);

struct OracleRun {
  double dt = 0.0;
  int steps = 0;
  std::string problem_digest;
  std::vector<OracleResult> results;
};

struct ComparePoint {
  Vec state;
  double field_value = 0.0;
  double oracle_value = 0.0;
  bool oracle_hit = false;
  double error = 0.0;  // field_value - oracle_value
};

struct ThresholdAgreement {
  double threshold = 0.0;
  std::size_t compared = 0;
  std::size_t agreements = 0;
  std::size_t excluded_band = 0;
};

struct FieldComparison {
  std::vector<ComparePoint> points;
  std::size_t hit_count = 0;
  double mean_abs_error = 0.0;      // over all points
  double max_abs_error = 0.0;
  double mean_abs_error_hit = 0.0;  // over points where the oracle found a hit
  double max_abs_error_hit = 0.0;
  std::vector<ThresholdAgreement> agreement;
};

/// Field vs oracle, point by point. Classification at each threshold counts
/// agreement of the two sub-level tests, skipping points within
/// band_cells * local cell range of the threshold. Refuses on mismatched
/// problem digests or when the oracle horizon exceeds the field's.
FieldComparison compare_field(const ValueField& field, const OracleRun& run,
                              std::span<const double> thresholds, double band_cells = 2.0,
                              OutOfDomainPolicy policy = OutOfDomainPolicy::Saturate);

std::string to_csv(const OracleRun& run);  // state..., J*, hit_step
std::string to_json(const FieldComparison& comparison);

}  // namespace costreach
