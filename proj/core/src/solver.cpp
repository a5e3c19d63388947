#include "costreach/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "costreach/digest.hpp"
#include "costreach/errors.hpp"

namespace costreach {

namespace {

int env_thread_override() {
  const char* env = std::getenv("COSTREACH_THREADS");
  if (!env) return 0;
  const int parsed = std::atoi(env);
  return parsed > 0 ? parsed : 0;
}

int effective_threads(int requested, std::size_t work_items) {
  int threads = requested > 0 ? requested : env_thread_override();
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads <= 0) threads = 1;
  const std::size_t cap = std::max<std::size_t>(work_items, 1);
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), cap));
}

// Runs fn(begin, end) over contiguous chunks of [0, count). The first
// exception (lowest chunk) is rethrown after all workers join.
template <typename Fn>
void parallel_chunks(std::size_t count, int threads, Fn&& fn) {
  if (threads <= 1 || count == 0) {
    fn(std::size_t{0}, count);
    return;
  }
  const std::size_t chunk = (count + static_cast<std::size_t>(threads) - 1) /
                            static_cast<std::size_t>(threads);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    const std::size_t begin = static_cast<std::size_t>(t) * chunk;
    if (begin >= count) break;
    const std::size_t end = std::min(begin + chunk, count);
    pool.emplace_back([&fn, &errors, t, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
      }
    });
  }
  for (auto& worker : pool) worker.join();
  for (const auto& error : errors)
    if (error) std::rethrow_exception(error);
}

std::string describe_node(const GridSpec& grid, std::size_t flat) {
  std::array<int, kMaxDim> index{};
  grid.unflatten(flat, {index.data(), static_cast<std::size_t>(grid.dim_count())});
  std::string out = "(";
  for (int d = 0; d < grid.dim_count(); ++d)
    out += (d ? "," : "") + std::to_string(index[static_cast<std::size_t>(d)]);
  return out + ")";
}

}  // namespace

SolverConfig SolverConfig::from_steps(double dt, int step_count) {
  SolverConfig config;
  config.dt = dt;
  config.step_count = step_count;
  config.horizon = step_count * dt;
  config.validate();
  return config;
}

SolverConfig SolverConfig::from_horizon(double min_horizon, double dt) {
  if (!(dt > 0.0)) throw ValidationError("solver.dt must be positive");
  if (!(min_horizon > 0.0)) throw ValidationError("solver horizon must be positive");
  const int steps = static_cast<int>(std::ceil(min_horizon / dt - 1e-12));
  return from_steps(dt, steps);
}

void SolverConfig::validate() const {
  if (!(dt > 0.0)) throw ValidationError("solver.dt must be positive");
  if (step_count < 0) throw ValidationError("solver.steps must be >= 0");
  if (std::abs(step_count * dt - horizon) > 1e-9)
    throw ValidationError("solver horizon " + std::to_string(horizon) +
                          " does not equal steps * dt = " + std::to_string(step_count * dt));
}

double compute_horizon(double J_max, double lambda, double Lambda, double epsilon) {
  if (!(lambda > 0.0))
    throw ValidationError("compute_horizon: lambda must be positive (got " +
                          std::to_string(lambda) + ")");
  if (!(epsilon > 0.0)) throw ValidationError("compute_horizon: epsilon must be positive");
  return (J_max - Lambda) / lambda + epsilon;
}

ValueField init_terminal(const GridSpec& grid, const CostSpec& costs, FieldMeta meta) {
  std::vector<double> values(grid.node_count());
  std::array<int, kMaxDim> index{};
  const int n = grid.dim_count();
  Vec point = Vec::zeros(n);
  for (std::size_t flat = 0; flat < values.size(); ++flat) {
    for (int d = 0; d < n; ++d) point[d] = grid.node_coordinate(d, index[static_cast<std::size_t>(d)]);
    const double phi = costs.endpoint_cost(point);
    if (!std::isfinite(phi))
      throw ModelError("endpoint cost is non-finite at node " + describe_node(grid, flat));
    values[flat] = phi;
    grid.advance({index.data(), static_cast<std::size_t>(n)});
  }
  meta.step_index = 0;
  return ValueField(grid, std::move(values), std::move(meta));
}

ValueField bellman_step(const ValueField& field, const SystemModel& model, const CostSpec& costs,
                        const TargetSet& target, const SolverConfig& config) {
  const GridSpec& grid = field.grid();
  if (model.state_dim != grid.dim_count())
    throw ValidationError("bellman_step: model dimension does not match the grid");
  if (model.control_values.empty()) throw ValidationError("bellman_step: empty control set");
  if (!(config.dt > 0.0)) throw ValidationError("bellman_step: dt must be positive");

  const std::size_t node_count = grid.node_count();
  const std::span<const double> prev = field.values();
  std::vector<double> next(node_count);
  const double dt = config.dt;
  const OutOfDomainPolicy policy = config.policy;
  const int n = grid.dim_count();

  parallel_chunks(node_count, effective_threads(config.threads, node_count),
                  [&](std::size_t begin, std::size_t end) {
    std::array<int, kMaxDim> index{};
    grid.unflatten(begin, {index.data(), static_cast<std::size_t>(n)});
    Vec node = Vec::zeros(n);
    for (std::size_t flat = begin; flat < end; ++flat) {
      for (int d = 0; d < n; ++d)
        node[d] = grid.node_coordinate(d, index[static_cast<std::size_t>(d)]);
      if (target.contains(node)) {
        // Frozen: dynamics and stage cost vanish inside the target, so the
        // node value is reproduced bit-exactly.
        next[flat] = prev[flat];
      } else {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t ui = 0; ui < model.control_values.size(); ++ui) {
          const Vec& u = model.control_values[ui];
          const double candidate =
              stage_cost(costs, node, u, dt) +
              field.interpolate(integrate_step(model, node, u, dt), policy);
          if (!std::isfinite(candidate))
            throw SolverError("non-finite candidate at node " + describe_node(grid, flat) +
                              ", control index " + std::to_string(ui));
          if (candidate < best) best = candidate;
        }
        next[flat] = best;
      }
      grid.advance({index.data(), static_cast<std::size_t>(n)});
    }
  });

  FieldMeta meta = field.meta();
  meta.step_index += 1;
  return ValueField(grid, std::move(next), std::move(meta));
}

std::pair<ValueField, SolveReport> solve(const SystemModel& model, const CostSpec& costs,
                                         const TargetSet& target, const GridSpec& grid,
                                         const SolverConfig& config) {
  config.validate();
  if (model.state_dim != grid.dim_count())
    throw ValidationError("solve: model dimension " + std::to_string(model.state_dim) +
                          " does not match grid dimension " + std::to_string(grid.dim_count()));
  if (model.control_values.empty()) throw ValidationError("solve: empty control set");
  for (int d = 0; d < grid.dim_count(); ++d) {
    const bool model_periodic =
        d < static_cast<int>(model.wrap.size()) && model.wrap[static_cast<std::size_t>(d)].periodic;
    if (model_periodic != grid.dim(d).periodic)
      throw ValidationError("solve: periodic flags disagree between model and grid in dimension " +
                            std::to_string(d));
  }
  check_cost_bounds(costs, grid, model.control_values);

  FieldMeta meta;
  meta.dt = config.dt;
  meta.horizon = config.horizon;
  meta.problem_digest = config.problem_digest;
  ValueField field = init_terminal(grid, costs, std::move(meta));

  SolveReport report;
  report.steps.reserve(static_cast<std::size_t>(config.step_count));
  for (int k = 1; k <= config.step_count; ++k) {
    const auto started = std::chrono::steady_clock::now();
    ValueField next = bellman_step(field, model, costs, target, config);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;

    StepStats stats;
    stats.step = k;
    stats.wall_seconds = elapsed.count();
    stats.max_value = next.max_value();
    stats.min_value = next.min_value();
    for (std::size_t i = 0; i < next.values().size(); ++i)
      if (std::abs(next.values()[i] - field.values()[i]) > 1e-12) ++stats.changed_nodes;
    report.steps.push_back(stats);

    field = std::move(next);
  }
  report.final_digest = digest_doubles(field.values());
  return {std::move(field), std::move(report)};
}

std::string to_json(const SolveReport& report) {
  nlohmann::json doc;
  doc["final_digest"] = report.final_digest;
  auto& steps = doc["steps"] = nlohmann::json::array();
  for (const StepStats& s : report.steps)
    steps.push_back({{"step", s.step},
                     {"wall_seconds", s.wall_seconds},
                     {"max_value", s.max_value},
                     {"min_value", s.min_value},
                     {"changed_nodes", s.changed_nodes}});
  return doc.dump(2);
}

}  // namespace costreach
