#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "costreach/run_config.hpp"
#include "costreach/solver.hpp"
#include "costreach/systems.hpp"

namespace costreach {

/// RunConfig turned into runnable pieces.
struct ResolvedProblem {
  BuiltinProblem problem;
  GridSpec grid;
  SolverConfig solver;
  std::vector<double> thresholds;
  double validity_bound = 0.0;  // lambda * horizon + Lambda
  std::vector<std::string> warnings;
};

ResolvedProblem resolve_problem(const RunConfig& config);

struct Artifact {
  std::string name;
  std::string path;  // relative to the run directory
  std::string digest;
  std::uint64_t bytes = 0;
  bool deterministic = true;  // false for artifacts carrying wall-clock timings
};

struct StageSet {
  bool solve = false;
  bool extract = false;
  bool verify = false;
  bool oracle = false;

  static StageSet all() { return {true, true, true, true}; }
};

struct RunResult {
  std::filesystem::path run_dir;
  std::vector<Artifact> artifacts;
  std::vector<std::string> warnings;
};

/// Executes the requested stages in order solve -> extract -> verify ->
/// oracle, writing every artifact plus a manifest.json under
/// output_dir/<config digest>. Stages other than solve reuse `field_path`
/// (default: the field saved in the run directory). A stage failure still
/// writes the manifest of completed artifacts before rethrowing.
RunResult run_pipeline(const RunConfig& config, const StageSet& stages,
                       const std::optional<std::filesystem::path>& field_path = {});

/// Human-readable summary of a field or mask file (grid shape, dt, horizon,
/// value range, digest).
std::string field_info(const std::filesystem::path& path);

}  // namespace costreach
