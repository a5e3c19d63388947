#include "costreach/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "costreach/analysis.hpp"
#include "costreach/control.hpp"
#include "costreach/digest.hpp"
#include "costreach/errors.hpp"
#include "costreach/field_io.hpp"
#include "costreach/oracle.hpp"

namespace costreach {

namespace {

using nlohmann::json;

OutOfDomainPolicy parse_policy(const std::string& name) {
  return name == "clamp" ? OutOfDomainPolicy::Clamp : OutOfDomainPolicy::Saturate;
}

std::string two_digits(std::size_t i) {
  char buffer[8];
  std::snprintf(buffer, sizeof(buffer), "%02zu", i);
  return buffer;
}

}  // namespace

ResolvedProblem resolve_problem(const RunConfig& config) {
  BuiltinParams params;
  params.control_count = config.system.control_count;
  params.gamma = config.system.gamma;
  params.endpoint =
      config.system.endpoint == "exp_well" ? EndpointCost::ExpWell : EndpointCost::Zero;
  BuiltinProblem problem = builtin_system(config.system.name, params);

  if (config.target_boxes) problem.target.boxes = *config.target_boxes;
  if (config.cost.lambda) problem.costs.lambda = *config.cost.lambda;
  if (config.cost.Lambda) problem.costs.Lambda = *config.cost.Lambda;

  GridSpec grid(config.grid);
  if (grid.dim_count() != problem.model.state_dim)
    throw ValidationError("\"grid\" has " + std::to_string(grid.dim_count()) +
                          " dimensions but system \"" + config.system.name + "\" has " +
                          std::to_string(problem.model.state_dim));
  for (int d = 0; d < grid.dim_count(); ++d) {
    const WrapSpec& wrap = problem.model.wrap[static_cast<std::size_t>(d)];
    const GridDim& dim = grid.dim(d);
    if (wrap.periodic != dim.periodic)
      throw ValidationError("\"grid[" + std::to_string(d) +
                            "].periodic\" disagrees with the system's periodicity");
    if (wrap.periodic &&
        (std::abs(wrap.lower - dim.lower) > 1e-12 || std::abs(wrap.upper - dim.upper) > 1e-12))
      throw ValidationError("\"grid[" + std::to_string(d) +
                            "]\" bounds disagree with the system's period");
  }

  ResolvedProblem resolved{std::move(problem), std::move(grid), {}, config.thresholds, 0.0, {}};

  const double lambda = resolved.problem.costs.lambda;
  const double Lambda = resolved.problem.costs.Lambda;
  if (config.solver.steps) {
    resolved.solver = SolverConfig::from_steps(config.solver.dt, *config.solver.steps);
  } else {
    const double J_max = config.thresholds.back();
    resolved.solver = SolverConfig::from_horizon(
        compute_horizon(J_max, lambda, Lambda, config.solver.epsilon), config.solver.dt);
  }
  resolved.solver.policy = parse_policy(config.solver.out_of_domain);
  resolved.solver.threads = config.solver.threads;

  json label = {{"system", config.system.name},
                {"control_count", config.system.control_count},
                {"gamma", config.system.gamma},
                {"endpoint", config.system.endpoint},
                {"lambda", lambda},
                {"Lambda", Lambda}};
  if (config.target_boxes) {
    auto& boxes = label["target"] = json::array();
    for (const AxisBox& box : *config.target_boxes) {
      json entry = json::array();
      for (const AxisInterval& interval : box) entry.push_back({interval.lo, interval.hi});
      boxes.push_back(std::move(entry));
    }
  }
  resolved.solver.problem_digest =
      make_problem_digest(label.dump(), resolved.problem.model, resolved.solver.dt);

  resolved.validity_bound = lambda * resolved.solver.horizon + Lambda;
  for (const double J : config.thresholds)
    if (!(J < resolved.validity_bound))
      resolved.warnings.push_back(
          "threshold " + std::to_string(J) + " is not below lambda * horizon + Lambda = " +
          std::to_string(resolved.validity_bound) +
          "; membership at this level can undercount the true set");
  return resolved;
}

namespace {

struct ArtifactWriter {
  std::filesystem::path run_dir;
  std::vector<Artifact> artifacts;

  void record(const std::string& name, bool deterministic) {
    const std::filesystem::path path = run_dir / name;
    artifacts.push_back({name, name, digest_file(path),
                         static_cast<std::uint64_t>(std::filesystem::file_size(path)),
                         deterministic});
  }

  void write_text(const std::string& name, const std::string& content, bool deterministic) {
    const std::filesystem::path path = run_dir / name;
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write artifact: " + path.string());
    out << content;
    out.close();
    record(name, deterministic);
  }
};

std::vector<Vec> build_slice_lattice(const GridSpec& grid, const SliceSpec& fixed, int stride) {
  const int n = grid.dim_count();
  std::vector<int> free_dims;
  for (int d = 0; d < n; ++d)
    if (!fixed.contains(d)) free_dims.push_back(d);
  if (free_dims.size() != 2)
    throw ValidationError("\"verify.slice\" must fix all but two grid dimensions");

  Vec point = Vec::zeros(n);
  for (const auto& [d, value] : fixed) {
    if (d < 0 || d >= n)
      throw ValidationError("\"verify.slice\" dimension " + std::to_string(d) + " out of range");
    point[d] = value;
  }
  std::vector<Vec> samples;
  for (int i = 0; i < grid.dim(free_dims[0]).point_count; i += stride) {
    point[free_dims[0]] = grid.node_coordinate(free_dims[0], i);
    for (int j = 0; j < grid.dim(free_dims[1]).point_count; j += stride) {
      point[free_dims[1]] = grid.node_coordinate(free_dims[1], j);
      samples.push_back(point);
    }
  }
  return samples;
}

std::vector<Vec> build_probe_lattice(const OracleSection& oracle) {
  const int n = static_cast<int>(oracle.probe_counts.size());
  std::vector<Vec> probes;
  std::vector<int> index(static_cast<std::size_t>(n), 0);
  bool done = false;
  while (!done) {
    Vec point = Vec::zeros(n);
    for (int d = 0; d < n; ++d) {
      const double lo = oracle.probe_lower[static_cast<std::size_t>(d)];
      const double hi = oracle.probe_upper[static_cast<std::size_t>(d)];
      const int count = oracle.probe_counts[static_cast<std::size_t>(d)];
      point[d] = count == 1 ? 0.5 * (lo + hi)
                            : lo + index[static_cast<std::size_t>(d)] * (hi - lo) / (count - 1);
    }
    probes.push_back(point);
    done = true;
    for (int d = n - 1; d >= 0; --d) {
      if (++index[static_cast<std::size_t>(d)] < oracle.probe_counts[static_cast<std::size_t>(d)]) {
        done = false;
        break;
      }
      index[static_cast<std::size_t>(d)] = 0;
    }
  }
  return probes;
}

void run_extract(const RunConfig& config, const ValueField& field, OutOfDomainPolicy policy,
                 ArtifactWriter& writer) {
  if (config.analysis.masks) {
    for (std::size_t t = 0; t < config.thresholds.size(); ++t) {
      const std::string name = "mask_" + two_digits(t + 1) + ".rchf";
      save_mask(mask(field, config.thresholds[t]), writer.run_dir / name);
      writer.record(name, true);
      writer.record(name + ".meta.json", true);
    }
  }
  if (!config.analysis.contours) return;

  const auto write_contour = [&](const ValueField& plane, const SliceSpec& desc,
                                 const std::string& stem) {
    for (std::size_t t = 0; t < config.thresholds.size(); ++t) {
      const LevelSetContour contour = extract_contours(plane, config.thresholds[t], desc);
      writer.write_text(stem + two_digits(t + 1) + ".json", to_json(contour), true);
      writer.write_text(stem + two_digits(t + 1) + ".csv", to_csv(contour), true);
    }
  };

  if (field.grid().dim_count() == 2) {
    write_contour(field, {}, "contour_");
  } else {
    if (config.analysis.slices.empty())
      throw ValidationError(
          "\"analysis.slices\" is required to extract contours from a field with more than two "
          "dimensions");
    for (std::size_t s = 0; s < config.analysis.slices.size(); ++s) {
      const SliceSpec& spec = config.analysis.slices[s];
      const ValueField plane = slice(field, spec, policy);
      const std::string name = "slice_" + two_digits(s + 1) + ".rchf";
      save_field(plane, writer.run_dir / name);
      writer.record(name, true);
      writer.record(name + ".meta.json", true);
      write_contour(plane, spec, "slice_" + two_digits(s + 1) + "_contour_");
    }
  }
}

void run_verify(const RunConfig& config, const ResolvedProblem& resolved, const ValueField& field,
                ArtifactWriter& writer) {
  VerifyOptions options;
  options.band_cells = config.verify.band_cells;
  options.cost_tolerance = config.verify.cost_tolerance;
  options.max_steps = config.verify.max_steps;
  options.policy = resolved.solver.policy;

  const std::vector<double>& levels =
      config.verify.levels.empty() ? config.thresholds : config.verify.levels;
  const std::vector<Vec> samples =
      build_slice_lattice(field.grid(), config.verify.slice, config.verify.stride);
  const VerificationReport report =
      verify_region(field, resolved.problem.model, resolved.problem.costs, resolved.problem.target,
                    levels, samples, options);
  writer.write_text("verify_report.json", to_json(report), true);
}

void run_oracle(const RunConfig& config, const ResolvedProblem& resolved, const ValueField& field,
                ArtifactWriter& writer) {
  OracleRun run;
  run.dt = resolved.solver.dt;
  run.steps = config.oracle.steps;
  run.problem_digest = resolved.solver.problem_digest;
  const AxisBox domain = domain_box(field.grid());
  for (const Vec& probe : build_probe_lattice(config.oracle))
    run.results.push_back(brute_force_value(resolved.problem.model, resolved.problem.costs,
                                            resolved.problem.target, probe, run.steps, run.dt,
                                            config.oracle.budget, domain));
  writer.write_text("oracle_results.csv", to_csv(run), true);
  const FieldComparison comparison = compare_field(field, run, resolved.thresholds,
                                                   config.oracle.band_cells,
                                                   resolved.solver.policy);
  writer.write_text("oracle_compare.json", to_json(comparison), true);
}

}  // namespace

RunResult run_pipeline(const RunConfig& config, const StageSet& stages,
                       const std::optional<std::filesystem::path>& field_path) {
  const ResolvedProblem resolved = resolve_problem(config);
  const std::string digest = config_digest(config);

  RunResult result;
  result.run_dir = std::filesystem::path(config.output_dir) / digest;
  result.warnings = resolved.warnings;
  std::filesystem::create_directories(result.run_dir);

  ArtifactWriter writer{result.run_dir, {}};
  std::vector<std::string> executed;
  std::string failure;

  const auto write_manifest = [&] {
    json doc;
    doc["config"] = json::parse(resolved_config_json(config));
    doc["config_digest"] = digest;
    doc["problem_digest"] = resolved.solver.problem_digest;
    doc["stages"] = executed;
    doc["warnings"] = result.warnings;
    auto& artifacts = doc["artifacts"] = json::array();
    for (const Artifact& a : writer.artifacts)
      artifacts.push_back({{"name", a.name},
                           {"path", a.path},
                           {"digest", a.digest},
                           {"bytes", a.bytes},
                           {"deterministic", a.deterministic}});
    if (!failure.empty()) doc["error"] = failure;
    std::ofstream out(result.run_dir / "manifest.json");
    out << doc.dump(2) << '\n';
  };

  try {
    std::optional<ValueField> field;

    if (stages.solve) {
      auto [solved, report] =
          solve(resolved.problem.model, resolved.problem.costs, resolved.problem.target,
                resolved.grid, resolved.solver);
      save_field(solved, result.run_dir / "field.rchf");
      writer.record("field.rchf", true);
      writer.record("field.rchf.meta.json", true);
      // Wall-clock timings make this artifact differ across identical runs.
      writer.write_text("solve_report.json", to_json(report), false);
      field.emplace(std::move(solved));
      executed.push_back("solve");
    }

    const auto ensure_field = [&]() -> const ValueField& {
      if (!field) {
        const std::filesystem::path path =
            field_path ? *field_path : result.run_dir / "field.rchf";
        field.emplace(load_field(path));
        if (field->meta().problem_digest != resolved.solver.problem_digest)
          throw ValidationError("field at " + path.string() +
                                " was solved for a different problem (digest mismatch)");
      }
      return *field;
    };

    if (stages.extract && (config.analysis.contours || config.analysis.masks)) {
      run_extract(config, ensure_field(), resolved.solver.policy, writer);
      executed.push_back("extract");
    }
    if (stages.verify && config.verify.enabled) {
      run_verify(config, resolved, ensure_field(), writer);
      executed.push_back("verify");
    }
    if (stages.oracle && config.oracle.enabled) {
      run_oracle(config, resolved, ensure_field(), writer);
      executed.push_back("oracle");
    }
  } catch (const std::exception& e) {
    failure = e.what();
    write_manifest();
    throw;
  }

  write_manifest();
  result.artifacts = writer.artifacts;
  return result;
}

std::string field_info(const std::filesystem::path& path) {
  const FieldFileHeader header = read_field_header(path);
  std::string out;
  out += "path: " + path.string() + "\n";
  out += std::string("kind: ") + (header.is_mask() ? "mask (MASK flag set)" : "value field") + "\n";
  std::string shape;
  for (int d = 0; d < header.grid.dim_count(); ++d)
    shape += (d ? "x" : "") + std::to_string(header.grid.dim(d).point_count);
  out += "grid: " + shape + "\n";
  for (int d = 0; d < header.grid.dim_count(); ++d) {
    const GridDim& dim = header.grid.dim(d);
    char line[128];
    std::snprintf(line, sizeof(line), "  dim %d: [%.17g, %.17g]%s\n", d, dim.lower, dim.upper,
                  dim.periodic ? " periodic" : "");
    out += line;
  }
  char line[160];
  std::snprintf(line, sizeof(line), "step_index: %u\ndt: %g\nhorizon: %g\n",
                header.meta.step_index, header.meta.dt, header.meta.horizon);
  out += line;
  if (header.is_mask()) {
    const MaskField loaded = load_mask(path);
    std::size_t set = 0;
    for (const std::uint8_t v : loaded.values) set += v != 0;
    out += "nodes set: " + std::to_string(set) + " of " + std::to_string(loaded.values.size()) +
           "\n";
    out += "digest: " +
           digest_bytes(std::as_bytes(std::span<const std::uint8_t>(loaded.values))) + "\n";
  } else {
    const ValueField loaded = load_field(path);
    std::snprintf(line, sizeof(line), "value range: [%g, %g]\n", loaded.min_value(),
                  loaded.max_value());
    out += line;
    out += "digest: " + digest_doubles(loaded.values()) + "\n";
  }
  out += "problem digest: " + header.meta.problem_digest + "\n";
  return out;
}

}  // namespace costreach
