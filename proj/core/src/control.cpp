#include "costreach/control.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include <nlohmann/json.hpp>

#include "costreach/analysis.hpp"
#include "costreach/errors.hpp"

namespace costreach {

ControlChoice choose_control(const ValueField& field, const SystemModel& model,
                             const CostSpec& costs, const TargetSet& target, const Vec& s,
                             OutOfDomainPolicy policy) {
  if (!field.grid().contains(s))
    throw std::invalid_argument("choose_control: state outside the field domain");
  if (model.control_values.empty()) throw ValidationError("choose_control: empty control set");
  const double dt = field.meta().dt;
  if (!(dt > 0.0))
    throw ValidationError("choose_control: field carries no step size (not a solve output?)");

  ControlChoice best;
  best.candidate_value = std::numeric_limits<double>::infinity();
  for (std::size_t ui = 0; ui < model.control_values.size(); ++ui) {
    const Vec& u = model.control_values[ui];
    const double candidate = frozen_stage_cost(costs, target, s, u, dt) +
                             field.interpolate(frozen_step(model, target, s, u, dt), policy);
    if (candidate < best.candidate_value) {
      best.index = static_cast<int>(ui);
      best.control = u;
      best.candidate_value = candidate;
    }
  }
  return best;
}

Vec optimal_control(const ValueField& field, const SystemModel& model, const CostSpec& costs,
                    const TargetSet& target, const Vec& s, OutOfDomainPolicy policy) {
  return choose_control(field, model, costs, target, s, policy).control;
}

Trajectory simulate_closed_loop(const ValueField& field, const SystemModel& model,
                                const CostSpec& costs, const TargetSet& target, const Vec& s0,
                                int max_steps, OutOfDomainPolicy policy) {
  if (!field.grid().contains(s0))
    throw std::invalid_argument("simulate_closed_loop: start state outside the field domain");
  const double dt = field.meta().dt;
  if (!(dt > 0.0))
    throw ValidationError("simulate_closed_loop: field carries no step size");

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(s0);
  traj.running_cost.push_back(0.0);

  if (target.contains(s0)) {
    traj.reached_target = true;
    traj.first_hit_time = 0.0;
    traj.accumulated_cost = costs.endpoint_cost(s0);
    traj.running_cost.back() = traj.accumulated_cost;
    return traj;
  }

  Vec state = s0;
  double time = 0.0;
  double cost = 0.0;
  for (int step = 0; step < max_steps; ++step) {
    const ControlChoice choice = choose_control(field, model, costs, target, state, policy);
    cost += stage_cost(costs, state, choice.control, dt);
    state = integrate_step(model, state, choice.control, dt);
    time += dt;

    traj.controls.push_back(choice.control);
    traj.times.push_back(time);
    traj.states.push_back(state);
    traj.running_cost.push_back(cost);

    if (target.contains(state)) {
      traj.reached_target = true;
      traj.first_hit_time = time;
      cost += costs.endpoint_cost(state);
      traj.running_cost.back() = cost;
      break;
    }
    if (!field.grid().contains(state)) {
      traj.exited_domain = true;
      break;
    }
  }
  traj.accumulated_cost = cost;
  return traj;
}

VerificationReport verify_region(const ValueField& field, const SystemModel& model,
                                 const CostSpec& costs, const TargetSet& target,
                                 std::span<const double> admissible_costs,
                                 std::span<const Vec> samples, const VerifyOptions& options) {
  const double dt = field.meta().dt;
  VerificationReport report;
  report.band_cells = options.band_cells;

  double cost_tolerance = options.cost_tolerance;
  if (cost_tolerance < 0.0) {
    // 2 * dt * (largest running cost seen over the samples and controls).
    double c_max = 0.0;
    for (const Vec& s : samples)
      for (const Vec& u : model.control_values) c_max = std::max(c_max, costs.running_cost(s, u));
    cost_tolerance = 2.0 * dt * c_max;
  }
  report.cost_tolerance = cost_tolerance;

  int max_steps = options.max_steps;
  if (max_steps <= 0 && dt > 0.0)
    max_steps = 2 * static_cast<int>(std::ceil(field.meta().horizon / dt));
  if (max_steps <= 0) max_steps = 1000;

  for (const double J : admissible_costs) {
    VerifyRow row;
    row.admissible_cost = J;
    row.sample_count = samples.size();
    for (const Vec& s : samples) {
      const double value = field.interpolate(s, options.policy);
      if (value > J) continue;
      ++row.predicted_inside;
      const double band = options.band_cells * field.local_cell_range(s, options.policy);
      if (std::abs(value - J) <= band) {
        ++row.excluded_band;
        continue;
      }
      ++row.attempted;
      const Trajectory traj =
          simulate_closed_loop(field, model, costs, target, s, max_steps, options.policy);
      if (traj.reached_target && traj.accumulated_cost <= J + cost_tolerance) {
        ++row.successes;
      } else {
        row.failures.push_back({s, value, traj.accumulated_cost, traj.reached_target, J - value});
      }
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

namespace {

std::string format_double(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

}  // namespace

std::string to_json(const VerificationReport& report) {
  nlohmann::json doc;
  doc["band_cells"] = report.band_cells;
  doc["cost_tolerance"] = report.cost_tolerance;
  auto& rows = doc["rows"] = nlohmann::json::array();
  for (const VerifyRow& row : report.rows) {
    nlohmann::json entry;
    entry["admissible_cost"] = row.admissible_cost;
    entry["sample_count"] = row.sample_count;
    entry["predicted_inside"] = row.predicted_inside;
    entry["excluded_band"] = row.excluded_band;
    entry["attempted"] = row.attempted;
    entry["successes"] = row.successes;
    auto& failures = entry["failures"] = nlohmann::json::array();
    for (const VerifyFailure& f : row.failures) {
      nlohmann::json item;
      auto& state = item["state"] = nlohmann::json::array();
      for (int d = 0; d < f.state.size(); ++d) state.push_back(f.state[d]);
      item["field_value"] = f.field_value;
      item["sim_cost"] = f.sim_cost;
      item["reached"] = f.reached;
      item["margin"] = f.margin;
      failures.push_back(std::move(item));
    }
    rows.push_back(std::move(entry));
  }
  return doc.dump(2);
}

std::string to_csv(const Trajectory& trajectory) {
  std::string out = "t";
  const int state_dim = trajectory.states.empty() ? 0 : trajectory.states.front().size();
  const int control_dim = trajectory.controls.empty() ? 0 : trajectory.controls.front().size();
  for (int d = 0; d < state_dim; ++d) out += ",s" + std::to_string(d);
  for (int d = 0; d < control_dim; ++d) out += ",u" + std::to_string(d);
  out += ",J\n";
  for (std::size_t k = 0; k < trajectory.times.size(); ++k) {
    out += format_double(trajectory.times[k]);
    for (int d = 0; d < state_dim; ++d) out += "," + format_double(trajectory.states[k][d]);
    for (int d = 0; d < control_dim; ++d)
      out += "," + (k < trajectory.controls.size() ? format_double(trajectory.controls[k][d])
                                                   : std::string());
    out += "," + format_double(trajectory.running_cost[k]) + "\n";
  }
  return out;
}

}  // namespace costreach
