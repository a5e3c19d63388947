#include "costreach/oracle.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include <nlohmann/json.hpp>

#include "costreach/errors.hpp"

namespace costreach {

namespace {

bool inside_box(const AxisBox& box, const Vec& s) {
  for (std::size_t d = 0; d < box.size(); ++d)
    if (s[static_cast<int>(d)] < box[d].lo || s[static_cast<int>(d)] > box[d].hi) return false;
  return true;
}

struct Enumerator {
  const SystemModel& model;
  const CostSpec& costs;
  const TargetSet& target;
  const AxisBox& domain;
  const int max_depth;
  const double dt;

  double best = std::numeric_limits<double>::infinity();
  int best_step = -1;
  std::uint64_t expansions = 0;

  void expand(const Vec& s, int depth, double accumulated) {
    for (const Vec& u : model.control_values) {
      const double acc = accumulated + stage_cost(costs, s, u, dt);
      const Vec next = integrate_step(model, s, u, dt);
      ++expansions;
      if (target.contains(next)) {
        const double total = acc + costs.endpoint_cost(next);
        if (total < best) {
          best = total;
          best_step = depth + 1;
        }
      } else if (!domain.empty() && !inside_box(domain, next)) {
        // left the computational domain: worst case, cannot hit anymore
      } else if (depth + 1 < max_depth) {
        // Any completion still pays at least one more stage (>= lambda * dt)
        // plus an endpoint cost >= Lambda, so this floor is exact.
        if (acc + costs.lambda * dt + costs.Lambda < best) expand(next, depth + 1, acc);
      }
    }
  }
};

}  // namespace

OracleResult brute_force_value(const SystemModel& model, const CostSpec& costs,
                               const TargetSet& target, const Vec& s0, int steps, double dt,
                               double budget, const AxisBox& domain) {
  if (steps < 0) throw std::invalid_argument("brute_force_value: steps must be >= 0");
  if (!(dt > 0.0)) throw std::invalid_argument("brute_force_value: dt must be positive");
  if (model.control_values.empty())
    throw ValidationError("brute_force_value: empty control set");
  const double sequences =
      std::pow(static_cast<double>(model.control_values.size()), static_cast<double>(steps));
  if (sequences > budget)
    throw BudgetError("brute_force_value: " + std::to_string(model.control_values.size()) + "^" +
                      std::to_string(steps) + " = " + std::to_string(sequences) +
                      " sequences exceed the budget of " + std::to_string(budget));

  OracleResult result;
  result.start = s0;
  if (target.contains(s0)) {
    result.hit = true;
    result.hit_step = 0;
    result.min_cost = costs.endpoint_cost(s0);
    return result;
  }

  Enumerator enumerator{model, costs, target, domain, steps, dt};
  if (steps > 0) enumerator.expand(s0, 0, 0.0);
  result.expansions = enumerator.expansions;
  if (enumerator.best_step >= 0) {
    result.hit = true;
    result.hit_step = enumerator.best_step;
    result.min_cost = enumerator.best;
  } else {
    // No sequence of <= steps reaches the target: report the saturation
    // value, the cheapest any run of this length could possibly cost.
    result.hit = false;
    result.min_cost = costs.lambda * steps * dt + costs.Lambda;
  }
  return result;
}

AxisBox domain_box(const GridSpec& grid) {
  AxisBox box(static_cast<std::size_t>(grid.dim_count()));
  for (int d = 0; d < grid.dim_count(); ++d)
    if (!grid.dim(d).periodic) {
      box[static_cast<std::size_t>(d)].lo = grid.dim(d).lower;
      box[static_cast<std::size_t>(d)].hi = grid.dim(d).upper;
    }
  return box;
}

FieldComparison compare_field(const ValueField& field, const OracleRun& run,
                              std::span<const double> thresholds, double band_cells,
                              OutOfDomainPolicy policy) {
  if (field.meta().problem_digest != run.problem_digest)
    throw ValidationError("compare_field: field and oracle were produced for different problems "
                          "(digest mismatch)");
  if (run.steps * run.dt > field.meta().horizon + 1e-9)
    throw ValidationError("compare_field: oracle horizon " + std::to_string(run.steps * run.dt) +
                          " exceeds the field horizon " + std::to_string(field.meta().horizon));

  FieldComparison out;
  out.points.reserve(run.results.size());
  double sum_all = 0.0;
  double sum_hit = 0.0;
  for (const OracleResult& r : run.results) {
    ComparePoint point;
    point.state = r.start;
    point.field_value = field.interpolate(r.start, policy);
    point.oracle_value = r.min_cost;
    point.oracle_hit = r.hit;
    point.error = point.field_value - point.oracle_value;
    const double abs_error = std::abs(point.error);
    sum_all += abs_error;
    out.max_abs_error = std::max(out.max_abs_error, abs_error);
    if (r.hit) {
      ++out.hit_count;
      sum_hit += abs_error;
      out.max_abs_error_hit = std::max(out.max_abs_error_hit, abs_error);
    }
    out.points.push_back(std::move(point));
  }
  if (!out.points.empty()) out.mean_abs_error = sum_all / static_cast<double>(out.points.size());
  if (out.hit_count) out.mean_abs_error_hit = sum_hit / static_cast<double>(out.hit_count);

  for (const double threshold : thresholds) {
    ThresholdAgreement agreement;
    agreement.threshold = threshold;
    for (const ComparePoint& point : out.points) {
      const double band = band_cells * field.local_cell_range(point.state, policy);
      if (std::abs(point.field_value - threshold) <= band) {
        ++agreement.excluded_band;
        continue;
      }
      ++agreement.compared;
      const bool field_inside = point.field_value <= threshold;
      const bool oracle_inside = point.oracle_value <= threshold;
      if (field_inside == oracle_inside) ++agreement.agreements;
    }
    out.agreement.push_back(agreement);
  }
  return out;
}

namespace {

std::string format_double(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

}  // namespace

std::string to_csv(const OracleRun& run) {
  const int dim = run.results.empty() ? 0 : run.results.front().start.size();
  std::string out;
  for (int d = 0; d < dim; ++d) out += "s" + std::to_string(d) + ",";
  out += "J_star,hit_step\n";
  for (const OracleResult& r : run.results) {
    for (int d = 0; d < dim; ++d) out += format_double(r.start[d]) + ",";
    out += format_double(r.min_cost) + "," + std::to_string(r.hit_step) + "\n";
  }
  return out;
}

std::string to_json(const FieldComparison& comparison) {
  nlohmann::json doc;
  doc["point_count"] = comparison.points.size();
  doc["hit_count"] = comparison.hit_count;
  doc["mean_abs_error"] = comparison.mean_abs_error;
  doc["max_abs_error"] = comparison.max_abs_error;
  doc["mean_abs_error_hit"] = comparison.mean_abs_error_hit;
  doc["max_abs_error_hit"] = comparison.max_abs_error_hit;
  auto& agreement = doc["agreement"] = nlohmann::json::array();
  for (const ThresholdAgreement& a : comparison.agreement)
    agreement.push_back({{"threshold", a.threshold},
                         {"compared", a.compared},
                         {"agreements", a.agreements},
                         {"excluded_band", a.excluded_band}});
  auto& points = doc["points"] = nlohmann::json::array();
  for (const ComparePoint& p : comparison.points) {
    nlohmann::json item;
    auto& state = item["state"] = nlohmann::json::array();
    for (int d = 0; d < p.state.size(); ++d) state.push_back(p.state[d]);
    item["field_value"] = p.field_value;
    item["oracle_value"] = p.oracle_value;
    item["oracle_hit"] = p.oracle_hit;
    item["error"] = p.error;
    points.push_back(std::move(item));
  }
  return doc.dump(2);
}

}  // namespace costreach
