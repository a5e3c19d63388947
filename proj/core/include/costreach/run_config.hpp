#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "costreach/analysis.hpp"
#include "costreach/dynamics.hpp"
#include "costreach/grid.hpp"

namespace costreach {

// Batch run description, loaded from a JSON file. Section layout mirrors the
// library types; see README for the full reference and defaults.

struct SystemSection {
  std::string name;
  int control_count = 21;
  double gamma = 0.0;
  std::string endpoint = "zero";  // "zero" | "exp_well"
};

struct CostSection {
  std::optional<double> lambda;   // override the builtin's analytic bound
  std::optional<double> Lambda;
};

struct SolverSection {
  double dt = 0.0;
  std::optional<int> steps;       // explicit m; mutually exclusive with auto_horizon
  bool auto_horizon = false;      // m from (J_max - Lambda)/lambda + epsilon
  double epsilon = 0.1;
  std::string out_of_domain = "saturate";  // "saturate" | "clamp"
  int threads = 0;
};

struct AnalysisSection {
  bool contours = false;
  bool masks = false;
  std::vector<SliceSpec> slices;  // required for contours when dim_count > 2
};

struct VerifySection {
  bool enabled = false;
  std::vector<double> levels;     // defaults to thresholds
  SliceSpec slice;                // sample lattice lives on this slice (3-D runs)
  int stride = 1;
  double band_cells = 2.0;
  double cost_tolerance = -1.0;
  int max_steps = 0;
};

struct OracleSection {
  bool enabled = false;
  int steps = 0;
  double budget = 1e7;
  double band_cells = 2.0;
  std::vector<double> probe_lower;  // uniform probe lattice bounds, per dimension
  std::vector<double> probe_upper;
  std::vector<int> probe_counts;
};

struct RunConfig {
  SystemSection system;
  std::vector<GridDim> grid;
  std::optional<std::vector<AxisBox>> target_boxes;  // override the builtin target
  CostSection cost;
  SolverSection solver;
  std::vector<double> thresholds;  // strictly increasing admissible costs / horizons
  AnalysisSection analysis;
  VerifySection verify;
  OracleSection oracle;
  std::string output_dir = "out";
};

/// Parse + validate. Unknown keys and violated constraints raise
/// ValidationError naming the offending key.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const std::string& json_text);

/// Canonical JSON with all defaults materialized. Identical resolved configs
/// produce identical text (and so identical digests).
std::string resolved_config_json(const RunConfig& config);
std::string config_digest(const RunConfig& config);

}  // namespace costreach
