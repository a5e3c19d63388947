#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "costreach/digest.hpp"
#include "costreach/errors.hpp"
#include "costreach/field_io.hpp"
#include "costreach/pipeline.hpp"
#include "costreach/run_config.hpp"

using namespace costreach;
namespace fs = std::filesystem;

namespace {

const char* kDeskConfig = R"({
  "system": {"name": "two_dim_poly", "control_count": 3},
  "grid": [
    {"lower": -1.0, "upper": 1.0, "points": 41},
    {"lower": -1.0, "upper": 1.0, "points": 41}
  ],
  "solver": {"dt": 0.1, "steps": 10},
  "thresholds": [0.25, 0.5, 0.75],
  "analysis": {"contours": true, "masks": true},
  "output_dir": "OUTDIR"
})";

std::string desk_config_text(const std::string& out_dir) {
  std::string text = kDeskConfig;
  text.replace(text.find("OUTDIR"), 6, out_dir);
  return text;
}

fs::path fresh_dir(const char* name) {
  const fs::path dir = fs::temp_directory_path() / "costreach_pipeline_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("config parsing rejects unknown and malformed keys by name") {
  CHECK_THROWS_WITH_AS((void)parse_run_config(R"({"systm": {}})"),
                       doctest::Contains("systm"), ValidationError);
  CHECK_THROWS_WITH_AS(
      (void)parse_run_config(
          R"({"system": {"name": "two_dim_poly"}, "grid": [{"lower": 0, "upper": 1, "points": 5}],
             "solver": {"dt": 0.1, "steps": 1, "dtt": 2}, "thresholds": [1]})"),
      doctest::Contains("solver.dtt"), ValidationError);
  CHECK_THROWS_WITH_AS(
      (void)parse_run_config(
          R"({"system": {"name": "two_dim_poly"},
             "grid": [{"lower": 0, "upper": 1, "points": 5}, {"lower": 0, "upper": 1, "points": 5}],
             "solver": {"dt": 0.1, "steps": 1}, "thresholds": [2, 1]})"),
      doctest::Contains("strictly increasing"), ValidationError);
  // exactly one of steps / auto_horizon
  CHECK_THROWS_AS((void)parse_run_config(
                      R"({"system": {"name": "two_dim_poly"},
             "grid": [{"lower": 0, "upper": 1, "points": 5}, {"lower": 0, "upper": 1, "points": 5}],
             "solver": {"dt": 0.1}, "thresholds": [1]})"),
                  ValidationError);
  CHECK_THROWS_AS((void)parse_run_config(
                      R"({"system": {"name": "two_dim_poly"},
             "grid": [{"lower": 0, "upper": 1, "points": 5}, {"lower": 0, "upper": 1, "points": 5}],
             "solver": {"dt": 0.1, "steps": 3, "auto_horizon": true}, "thresholds": [1]})"),
                  ValidationError);
  CHECK_THROWS_AS((void)parse_run_config("not json at all"), ValidationError);
}

TEST_CASE("resolution checks the grid against the system") {
  RunConfig config = parse_run_config(desk_config_text("unused"));
  config.grid.pop_back();
  CHECK_THROWS_AS((void)resolve_problem(config), ValidationError);

  RunConfig flight = parse_run_config(R"({
    "system": {"name": "planar_flight"},
    "grid": [
      {"lower": -4.0, "upper": 4.0, "points": 9},
      {"lower": -4.0, "upper": 4.0, "points": 9},
      {"lower": 0.0, "upper": 6.283185307179586, "points": 8}
    ],
    "solver": {"dt": 0.1, "steps": 5},
    "thresholds": [0.5],
    "output_dir": "unused"
  })");
  // theta must be declared periodic to match the system
  CHECK_THROWS_AS((void)resolve_problem(flight), ValidationError);
  flight.grid[2].periodic = true;
  CHECK_NOTHROW((void)resolve_problem(flight));
}

TEST_CASE("auto horizon resolves steps from the largest threshold") {
  RunConfig config = parse_run_config(R"({
    "system": {"name": "two_dim_poly"},
    "grid": [
      {"lower": -1.0, "upper": 1.0, "points": 21},
      {"lower": -1.0, "upper": 1.0, "points": 21}
    ],
    "solver": {"dt": 0.02, "auto_horizon": true, "epsilon": 0.1},
    "thresholds": [0.5, 1.0, 1.5, 2.0],
    "output_dir": "unused"
  })");
  const ResolvedProblem resolved = resolve_problem(config);
  CHECK(resolved.solver.step_count == 105);
  CHECK(resolved.solver.horizon == 105 * 0.02);
  CHECK(resolved.validity_bound > 2.0);
  CHECK(resolved.warnings.empty());
}

TEST_CASE("thresholds beyond the validity bound warn but do not fail") {
  RunConfig config = parse_run_config(desk_config_text("unused"));
  config.thresholds = {0.5, 1.5};  // validity bound is 1.0 * 1.0 + 0 = 1.0
  const ResolvedProblem resolved = resolve_problem(config);
  REQUIRE(resolved.warnings.size() == 1);
  CHECK(resolved.warnings[0].find("1.5") != std::string::npos);
}

TEST_CASE("the solve pipeline writes fields, level sets and a manifest") {
  const fs::path out = fresh_dir("full_run");
  const RunConfig config = parse_run_config(desk_config_text(out.string()));
  const RunResult result = run_pipeline(config, StageSet::all());

  CHECK(fs::exists(result.run_dir / "field.rchf"));
  CHECK(fs::exists(result.run_dir / "field.rchf.meta.json"));
  CHECK(fs::exists(result.run_dir / "solve_report.json"));
  for (int t = 1; t <= 3; ++t) {
    char name[64];
    std::snprintf(name, sizeof(name), "contour_%02d.json", t);
    CHECK(fs::exists(result.run_dir / name));
    std::snprintf(name, sizeof(name), "contour_%02d.csv", t);
    CHECK(fs::exists(result.run_dir / name));
    std::snprintf(name, sizeof(name), "mask_%02d.rchf", t);
    CHECK(fs::exists(result.run_dir / name));
  }
  CHECK(fs::exists(result.run_dir / "manifest.json"));

  const std::string manifest = read_file(result.run_dir / "manifest.json");
  CHECK(manifest.find("\"config_digest\"") != std::string::npos);
  CHECK(manifest.find("field.rchf") != std::string::npos);

  // identical configs land in the same directory with identical field bytes
  const std::string digest_before = digest_file(result.run_dir / "field.rchf");
  const RunResult again = run_pipeline(config, StageSet::all());
  CHECK(again.run_dir == result.run_dir);
  CHECK(digest_file(result.run_dir / "field.rchf") == digest_before);
}

TEST_CASE("extract and verify stages run from a previously saved field") {
  const fs::path out_a = fresh_dir("solve_only");
  RunConfig config = parse_run_config(desk_config_text(out_a.string()));
  const RunResult solve_only = run_pipeline(config, StageSet{true, false, false, false});
  CHECK(fs::exists(solve_only.run_dir / "field.rchf"));
  CHECK_FALSE(fs::exists(solve_only.run_dir / "contour_01.json"));

  const RunResult extract_only = run_pipeline(config, StageSet{false, true, false, false});
  CHECK(extract_only.run_dir == solve_only.run_dir);
  CHECK(fs::exists(extract_only.run_dir / "contour_01.json"));

  // the same contours as a combined run in a different output directory
  const fs::path out_b = fresh_dir("combined");
  const RunConfig config_b = parse_run_config(desk_config_text(out_b.string()));
  const RunResult combined = run_pipeline(config_b, StageSet::all());
  CHECK(read_file(combined.run_dir / "contour_02.json") ==
        read_file(extract_only.run_dir / "contour_02.json"));
}

TEST_CASE("a stage failure still writes the manifest of completed artifacts") {
  const fs::path out = fresh_dir("failing_extract");
  RunConfig config = parse_run_config(R"({
    "system": {"name": "planar_flight"},
    "grid": [
      {"lower": -4.0, "upper": 4.0, "points": 9},
      {"lower": -4.0, "upper": 4.0, "points": 9},
      {"lower": 0.0, "upper": 6.283185307179586, "points": 8, "periodic": true}
    ],
    "solver": {"dt": 0.1, "steps": 3},
    "thresholds": [0.25],
    "analysis": {"contours": true},
    "output_dir": "unused"
  })");
  config.output_dir = out.string();
  // contours on a 3-D field need analysis.slices: the extract stage fails
  CHECK_THROWS_AS((void)run_pipeline(config, StageSet::all()), ValidationError);
  const fs::path run_dir = out / config_digest(config);
  REQUIRE(fs::exists(run_dir / "manifest.json"));
  const std::string manifest = read_file(run_dir / "manifest.json");
  CHECK(manifest.find("\"error\"") != std::string::npos);
  CHECK(manifest.find("field.rchf") != std::string::npos);
}

TEST_CASE("the resolved config round-trips through the parser with a stable digest") {
  const RunConfig config = parse_run_config(desk_config_text("somewhere/out"));
  const std::string resolved = resolved_config_json(config);
  const RunConfig reparsed = parse_run_config(resolved);
  CHECK(config_digest(reparsed) == config_digest(config));
  CHECK(resolved_config_json(reparsed) == resolved);
}

TEST_CASE("the oracle stage compares the field against brute force") {
  const fs::path out = fresh_dir("oracle_stage");
  RunConfig config = parse_run_config(R"({
    "system": {"name": "two_dim_poly", "control_count": 3},
    "grid": [
      {"lower": -1.0, "upper": 1.0, "points": 21},
      {"lower": -1.0, "upper": 1.0, "points": 21}
    ],
    "solver": {"dt": 0.1, "steps": 5},
    "thresholds": [0.3],
    "oracle": {
      "enabled": true, "steps": 5,
      "probe_lower": [-0.4, -0.4], "probe_upper": [0.4, 0.4], "probe_counts": [5, 5]
    },
    "output_dir": "unused"
  })");
  config.output_dir = out.string();
  const RunResult result = run_pipeline(config, StageSet::all());
  CHECK(fs::exists(result.run_dir / "oracle_results.csv"));
  CHECK(fs::exists(result.run_dir / "oracle_compare.json"));
  const std::string comparison = read_file(result.run_dir / "oracle_compare.json");
  CHECK(comparison.find("\"mean_abs_error\"") != std::string::npos);
}

TEST_CASE("the verify stage samples a lattice and reports per level") {
  const fs::path out = fresh_dir("verify_stage");
  RunConfig config = parse_run_config(R"({
    "system": {"name": "two_dim_poly", "control_count": 3},
    "grid": [
      {"lower": -1.0, "upper": 1.0, "points": 41},
      {"lower": -1.0, "upper": 1.0, "points": 41}
    ],
    "solver": {"dt": 0.05, "steps": 20},
    "thresholds": [0.5],
    "verify": {"enabled": true, "stride": 2},
    "output_dir": "unused"
  })");
  config.output_dir = out.string();
  const RunResult result = run_pipeline(config, StageSet::all());
  REQUIRE(fs::exists(result.run_dir / "verify_report.json"));
  const std::string report = read_file(result.run_dir / "verify_report.json");
  CHECK(report.find("\"admissible_cost\": 0.5") != std::string::npos);
  CHECK(report.find("\"successes\"") != std::string::npos);
}

TEST_CASE("field info prints shape, step size and digest") {
  const fs::path out = fresh_dir("info");
  const RunConfig config = parse_run_config(desk_config_text(out.string()));
  const RunResult result = run_pipeline(config, StageSet{true, true, false, false});
  const std::string info = field_info(result.run_dir / "field.rchf");
  CHECK(info.find("41x41") != std::string::npos);
  CHECK(info.find("dt: 0.1") != std::string::npos);
  CHECK(info.find("digest: ") != std::string::npos);
  CHECK(info.find("value field") != std::string::npos);

  const std::string mask_info = field_info(result.run_dir / "mask_01.rchf");
  CHECK(mask_info.find("MASK") != std::string::npos);
  CHECK(mask_info.find("nodes set") != std::string::npos);

  CHECK_THROWS_AS((void)field_info(out / "missing.rchf"), FormatError);
}
