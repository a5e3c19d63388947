// costreach: batch front end for solving reachability value fields and
// post-processing them into level sets, masks, verification reports and
// oracle comparisons. See README for the config reference.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "costreach/control.hpp"
#include "costreach/errors.hpp"
#include "costreach/field_io.hpp"
#include "costreach/pipeline.hpp"
#include "costreach/run_config.hpp"

namespace {

using namespace costreach;

Vec parse_state(const std::string& text) {
  std::vector<double> parts;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    try {
      parts.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ValidationError("--state component \"" + item + "\" is not a number");
    }
  }
  if (parts.empty()) throw ValidationError("--state must list comma-separated coordinates");
  if (parts.size() > static_cast<std::size_t>(kMaxDim))
    throw ValidationError("--state has too many components");
  return Vec(std::span<const double>(parts));
}

int run_stages(const std::string& config_path, const std::string& output_dir,
               const StageSet& stages, const std::string& field_path) {
  RunConfig config = load_run_config(config_path);
  if (!output_dir.empty()) config.output_dir = output_dir;
  std::optional<std::filesystem::path> field;
  if (!field_path.empty()) field = field_path;
  const RunResult result = run_pipeline(config, stages, field);
  for (const std::string& warning : result.warnings) std::cerr << "warning: " << warning << "\n";
  std::cout << "run directory: " << result.run_dir.string() << "\n";
  for (const Artifact& artifact : result.artifacts)
    std::cout << "  " << artifact.name << "  " << artifact.digest << "  " << artifact.bytes
              << " bytes\n";
  return 0;
}

int run_simulate(const std::string& config_path, const std::string& field_path,
                 const std::string& state_text, int max_steps, const std::string& out_path) {
  const RunConfig config = load_run_config(config_path);
  const ResolvedProblem resolved = resolve_problem(config);
  const ValueField field = load_field(field_path);
  if (field.meta().problem_digest != resolved.solver.problem_digest)
    throw ValidationError("field was solved for a different problem than this config");

  const Vec s0 = parse_state(state_text);
  if (s0.size() != field.grid().dim_count())
    throw ValidationError("--state has " + std::to_string(s0.size()) + " components but the field is " +
                          std::to_string(field.grid().dim_count()) + "-dimensional");
  if (max_steps <= 0)
    max_steps = 2 * static_cast<int>(std::ceil(field.meta().horizon / field.meta().dt));

  const Trajectory traj =
      simulate_closed_loop(field, resolved.problem.model, resolved.problem.costs,
                           resolved.problem.target, s0, max_steps, resolved.solver.policy);
  const std::string csv = to_csv(traj);
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    std::ofstream out(out_path);
    if (!out) throw FormatError("cannot write trajectory file: " + out_path);
    out << csv;
  }
  std::cerr << (traj.reached_target ? "reached target" : "did not reach target")
            << (traj.exited_domain ? " (left the domain)" : "") << ", performance index "
            << traj.accumulated_cost;
  if (traj.first_hit_time) std::cerr << ", first hit at t = " << *traj.first_hit_time;
  std::cerr << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reachability value fields: solve, extract level sets, verify, compare"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  std::string field_path;
  std::string state_text;
  std::string out_path;
  int max_steps = 0;

  auto* solve_cmd = app.add_subcommand("solve", "Solve the field and run all stages the config enables");
  solve_cmd->add_option("config", config_path, "Run config (JSON)")->required();
  solve_cmd->add_option("--output-dir", output_dir, "Override the config's output directory");

  auto* extract_cmd = app.add_subcommand("extract", "Extract contours/masks from a solved field");
  extract_cmd->add_option("config", config_path, "Run config (JSON)")->required();
  extract_cmd->add_option("--field", field_path, "Field file (default: the run directory's field)");
  extract_cmd->add_option("--output-dir", output_dir, "Override the config's output directory");

  auto* verify_cmd = app.add_subcommand("verify", "Closed-loop verification from a solved field");
  verify_cmd->add_option("config", config_path, "Run config (JSON)")->required();
  verify_cmd->add_option("--field", field_path, "Field file (default: the run directory's field)");
  verify_cmd->add_option("--output-dir", output_dir, "Override the config's output directory");

  auto* oracle_cmd = app.add_subcommand("oracle", "Brute-force oracle comparison against a field");
  oracle_cmd->add_option("config", config_path, "Run config (JSON)")->required();
  oracle_cmd->add_option("--field", field_path, "Field file (default: the run directory's field)");
  oracle_cmd->add_option("--output-dir", output_dir, "Override the config's output directory");

  auto* simulate_cmd = app.add_subcommand("simulate", "Closed-loop rollout from one start state");
  simulate_cmd->add_option("config", config_path, "Run config (JSON)")->required();
  simulate_cmd->add_option("--field", field_path, "Field file")->required();
  simulate_cmd->add_option("--state", state_text, "Start state, comma separated")->required();
  simulate_cmd->add_option("--max-steps", max_steps, "Step cap (default: 2 * horizon / dt)");
  simulate_cmd->add_option("--out", out_path, "Trajectory CSV path (default: stdout)");

  auto* info_cmd = app.add_subcommand("info", "Print a field or mask file summary");
  info_cmd->add_option("path", field_path, "Field file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(solve_cmd))
      return run_stages(config_path, output_dir, StageSet::all(), "");
    if (app.got_subcommand(extract_cmd))
      return run_stages(config_path, output_dir, StageSet{false, true, false, false}, field_path);
    if (app.got_subcommand(verify_cmd))
      return run_stages(config_path, output_dir, StageSet{false, false, true, false}, field_path);
    if (app.got_subcommand(oracle_cmd))
      return run_stages(config_path, output_dir, StageSet{false, false, false, true}, field_path);
    if (app.got_subcommand(simulate_cmd))
      return run_simulate(config_path, field_path, state_text, max_steps, out_path);
    if (app.got_subcommand(info_cmd)) {
      std::cout << field_info(field_path);
      return 0;
    }
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
