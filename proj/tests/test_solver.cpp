#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "costreach/errors.hpp"
#include "costreach/solver.hpp"
#include "costreach/systems.hpp"
#include "test_helpers.hpp"

using namespace costreach;
using costreach::testing::one_dim_min_time;

TEST_CASE("horizon formula and its guard") {
  CHECK(compute_horizon(2.0, 1.0, 0.0, 0.1) == 2.1);
  CHECK(compute_horizon(3.0, 1.0, -1.0, 0.1) == 4.1);
  CHECK(compute_horizon(3.0, 1.0, 0.0, 0.1) == 3.1);
  // the slack keeps lambda * horizon + Lambda strictly above J_max
  CHECK(1.0 * compute_horizon(3.0, 1.0, -1.0, 0.1) + -1.0 > 3.0);
  CHECK_THROWS_AS((void)compute_horizon(2.0, 0.0, 0.0, 0.1), ValidationError);
  CHECK_THROWS_AS((void)compute_horizon(2.0, -1.0, 0.0, 0.1), ValidationError);
  CHECK_THROWS_AS((void)compute_horizon(2.0, 1.0, 0.0, 0.0), ValidationError);
}

TEST_CASE("solver config resolution") {
  const SolverConfig table1 = SolverConfig::from_horizon(2.1, 0.02);
  CHECK(table1.step_count == 105);
  const SolverConfig reduced = SolverConfig::from_horizon(3.1, 0.04);
  CHECK(reduced.step_count == 78);
  CHECK_THROWS_AS((void)SolverConfig::from_steps(-0.1, 10), ValidationError);
  SolverConfig broken = SolverConfig::from_steps(0.1, 10);
  broken.horizon = 1.5;
  CHECK_THROWS_AS(broken.validate(), ValidationError);
}

TEST_CASE("terminal condition samples the endpoint cost") {
  const GridSpec grid({{-1.0, 1.0, 11, false}, {-1.0, 1.0, 11, false}});
  const BuiltinProblem poly = builtin_system("two_dim_poly");
  const ValueField zeros = init_terminal(grid, poly.costs);
  for (const double v : zeros.values()) CHECK(v == 0.0);
  CHECK(zeros.meta().step_index == 0);

  CostSpec constant = poly.costs;
  constant.endpoint_cost = [](const Vec&) { return 2.5; };
  constant.Lambda = 2.5;
  const ValueField k = init_terminal(grid, constant);
  for (const double v : k.values()) CHECK(v == 2.5);

  BuiltinParams params;
  params.gamma = 0.1;
  params.endpoint = EndpointCost::ExpWell;
  const BuiltinProblem case2 = builtin_system("planar_flight", params);
  const GridSpec grid3({{-4.0, 4.0, 9, false}, {-4.0, 4.0, 9, false},
                        {0.0, 6.283185307179586, 8, true}});
  const ValueField well = init_terminal(grid3, case2.costs);
  const std::vector<int> origin{4, 4, 0};  // (0, 0, 0)
  CHECK(well.value_at(origin) == -1.0);

  CostSpec bad = poly.costs;
  bad.endpoint_cost = [](const Vec& s) { return s[0] > 0.9 ? std::nan("") : 0.0; };
  CHECK_THROWS_AS((void)init_terminal(grid, bad), ModelError);
}

TEST_CASE("a target covering the whole domain is a fixed point of the sweep") {
  const GridSpec grid({{-1.0, 1.0, 9, false}, {-1.0, 1.0, 9, false}});
  BuiltinProblem poly = builtin_system("two_dim_poly");
  poly.target.boxes = {AxisBox{{-2.0, 2.0}, {-2.0, 2.0}}};
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  // values don't matter as long as they're frozen: use a random terminal field
  std::vector<double> values(grid.node_count());
  for (double& v : values) v = dist(rng);
  FieldMeta meta;
  meta.dt = 0.1;
  meta.horizon = 0.1;
  const ValueField start(grid, values, meta);
  const ValueField next =
      bellman_step(start, poly.model, poly.costs, poly.target, SolverConfig::from_steps(0.1, 1));
  CHECK(std::memcmp(next.values().data(), start.values().data(),
                    values.size() * sizeof(double)) == 0);
  CHECK(next.meta().step_index == start.meta().step_index + 1);
}

TEST_CASE("single sweep of the one-dimensional integrator, hand-enumerated") {
  const auto p = one_dim_min_time();
  const GridSpec grid({{-1.0, 1.0, 41, false}});  // nodes every 0.05
  const SolverConfig config = SolverConfig::from_steps(0.1, 1);
  const ValueField terminal = init_terminal(grid, p.costs);
  const ValueField after_one = bellman_step(terminal, p.model, p.costs, p.target, config);

  // node at 0.15: every control pays one stage and lands on the zero field
  const std::vector<int> at_015{23};
  CHECK(grid.node_coordinate(0, 23) == doctest::Approx(0.15).epsilon(1e-15));
  CHECK(after_one.value_at(at_015) == 0.1);

  // node at 0.05 is inside the target and stays at the terminal value
  const std::vector<int> at_005{21};
  CHECK(after_one.value_at(at_005) == 0.0);

  // second sweep: moving toward the target keeps the value at one stage cost
  const ValueField after_two = bellman_step(after_one, p.model, p.costs, p.target, config);
  CHECK(after_two.value_at(at_015) == 0.1);
  CHECK(after_two.value_at(at_005) == 0.0);
}

TEST_CASE("zero steps returns the terminal field") {
  const auto p = one_dim_min_time();
  const GridSpec grid({{-1.0, 1.0, 21, false}});
  const auto [field, report] =
      solve(p.model, p.costs, p.target, grid, SolverConfig::from_steps(0.1, 0));
  CHECK(report.steps.empty());
  for (const double v : field.values()) CHECK(v == 0.0);
}

TEST_CASE("min-time solve: bounds, frozen nodes, monotone step maxima") {
  BuiltinParams params;
  params.control_count = 3;
  const BuiltinProblem poly = builtin_system("two_dim_poly", params);
  const GridSpec grid({{-1.0, 1.0, 41, false}, {-1.0, 1.0, 41, false}});
  const SolverConfig config = SolverConfig::from_steps(0.1, 10);
  const auto [field, report] = solve(poly.model, poly.costs, poly.target, grid, config);

  CHECK(field.min_value() >= 0.0);
  CHECK(field.max_value() <= 10 * 0.1 + 1e-9);

  // nodes inside the target hold the endpoint cost exactly, at every step
  std::vector<int> index(2);
  for (int i = 0; i < 41; ++i)
    for (int j = 0; j < 41; ++j) {
      index[0] = i;
      index[1] = j;
      const Vec node = grid.node_coordinates(index);
      if (poly.target.contains(node)) CHECK(field.value_at(index) == 0.0);
    }

  // step maxima are nondecreasing and gain at most one stage cost per sweep
  double previous_max = 0.0;
  for (const StepStats& stats : report.steps) {
    CHECK(stats.max_value >= previous_max);
    CHECK(stats.max_value <= previous_max + 0.1 + 1e-12);
    CHECK(stats.min_value >= poly.costs.Lambda);
    previous_max = stats.max_value;
  }
  CHECK(report.steps.size() == 10);
  CHECK(report.final_digest.size() == 16);
}

TEST_CASE("value iteration stabilizes below the shorter horizon") {
  const auto p = one_dim_min_time();
  const GridSpec grid({{-1.0, 1.0, 81, false}});
  const auto [short_run, r1] =
      solve(p.model, p.costs, p.target, grid, SolverConfig::from_steps(0.1, 5));
  const auto [long_run, r2] =
      solve(p.model, p.costs, p.target, grid, SolverConfig::from_steps(0.1, 10));
  const double cutoff = 5 * 0.1 - 2 * 0.1;
  std::size_t checked = 0;
  for (std::size_t i = 0; i < grid.node_count(); ++i) {
    if (long_run.values()[i] <= cutoff) {
      CHECK(std::abs(long_run.values()[i] - short_run.values()[i]) <= 1e-9);
      ++checked;
    }
  }
  CHECK(checked > 10);
}

TEST_CASE("solves are deterministic and parallel sweeps match sequential ones") {
  BuiltinParams params;
  params.control_count = 5;
  const BuiltinProblem poly = builtin_system("two_dim_poly", params);
  const GridSpec grid({{-1.0, 1.0, 31, false}, {-1.0, 1.0, 31, false}});

  SolverConfig sequential = SolverConfig::from_steps(0.05, 8);
  sequential.threads = 1;
  const auto [field1, report1] = solve(poly.model, poly.costs, poly.target, grid, sequential);
  const auto [field2, report2] = solve(poly.model, poly.costs, poly.target, grid, sequential);
  CHECK(report1.final_digest == report2.final_digest);
  CHECK(std::memcmp(field1.values().data(), field2.values().data(),
                    grid.node_count() * sizeof(double)) == 0);

  for (const int threads : {2, 4, 7}) {
    SolverConfig parallel = sequential;
    parallel.threads = threads;
    const auto [field_p, report_p] = solve(poly.model, poly.costs, poly.target, grid, parallel);
    CHECK(std::memcmp(field_p.values().data(), field1.values().data(),
                      grid.node_count() * sizeof(double)) == 0);
  }

  // 3-D with a periodic dimension
  const BuiltinProblem flight = builtin_system("planar_flight", params);
  const GridSpec grid3({{-4.0, 4.0, 17, false}, {-4.0, 4.0, 17, false},
                        {0.0, 6.283185307179586, 16, true}});
  SolverConfig seq3 = SolverConfig::from_steps(0.1, 3);
  seq3.threads = 1;
  const auto [f3_seq, rep3a] = solve(flight.model, flight.costs, flight.target, grid3, seq3);
  SolverConfig par3 = seq3;
  par3.threads = 4;
  const auto [f3_par, rep3b] = solve(flight.model, flight.costs, flight.target, grid3, par3);
  CHECK(std::memcmp(f3_seq.values().data(), f3_par.values().data(),
                    grid3.node_count() * sizeof(double)) == 0);
}

TEST_CASE("non-finite candidates are reported with node and control") {
  const GridSpec grid({{-1.0, 1.0, 11, false}});
  auto p = one_dim_min_time();
  p.costs.running_cost = [](const Vec& s, const Vec&) {
    return s[0] > 0.5 ? std::nan("") : 1.0;
  };
  const ValueField terminal = init_terminal(grid, p.costs);
  try {
    (void)bellman_step(terminal, p.model, p.costs, p.target, SolverConfig::from_steps(0.1, 1));
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    const std::string message = e.what();
    CHECK(message.find("node") != std::string::npos);
    CHECK(message.find("control index") != std::string::npos);
  }
}

TEST_CASE("solve validates dimensions and periodicity against the model") {
  const BuiltinProblem poly = builtin_system("two_dim_poly");
  const GridSpec wrong_dims({{-1.0, 1.0, 11, false}});
  CHECK_THROWS_AS(
      (void)solve(poly.model, poly.costs, poly.target, wrong_dims, SolverConfig::from_steps(0.1, 1)),
      ValidationError);

  const BuiltinProblem flight = builtin_system("planar_flight");
  const GridSpec not_periodic({{-4.0, 4.0, 9, false}, {-4.0, 4.0, 9, false},
                               {0.0, 6.283185307179586, 8, false}});
  CHECK_THROWS_AS((void)solve(flight.model, flight.costs, flight.target, not_periodic,
                              SolverConfig::from_steps(0.1, 1)),
                  ValidationError);
}
