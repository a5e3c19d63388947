#include "costreach/run_config.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "costreach/digest.hpp"
#include "costreach/errors.hpp"

namespace costreach {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::string& section,
                         const std::set<std::string>& known) {
  for (const auto& [key, value] : obj.items())
    if (!known.contains(key))
      throw ValidationError("unknown key \"" + (section.empty() ? key : section + "." + key) +
                            "\"");
}

const json* find(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double require_number(const json& obj, const char* key, const std::string& label) {
  const json* v = find(obj, key);
  if (!v || !v->is_number()) throw ValidationError("\"" + label + "\" must be a number");
  return v->get<double>();
}

SliceSpec parse_slice_spec(const json& obj, const std::string& key) {
  if (!obj.is_object()) throw ValidationError("\"" + key + "\" must map dimension index to value");
  SliceSpec spec;
  for (const auto& [dim_text, value] : obj.items()) {
    if (!value.is_number())
      throw ValidationError("\"" + key + "." + dim_text + "\" must be a number");
    try {
      spec[std::stoi(dim_text)] = value.get<double>();
    } catch (const std::exception&) {
      throw ValidationError("\"" + key + "\" keys must be dimension indices, got \"" + dim_text +
                            "\"");
    }
  }
  return spec;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("config root must be an object");
  reject_unknown_keys(doc, "",
                      {"system", "grid", "target", "cost", "solver", "thresholds", "analysis",
                       "verify", "oracle", "output_dir"});

  RunConfig config;

  // system
  {
    const json* section = find(doc, "system");
    if (!section || !section->is_object())
      throw ValidationError("\"system\" section is required");
    reject_unknown_keys(*section, "system", {"name", "control_count", "gamma", "endpoint"});
    const json* name = find(*section, "name");
    if (!name || !name->is_string()) throw ValidationError("\"system.name\" must be a string");
    config.system.name = name->get<std::string>();
    if (const json* v = find(*section, "control_count")) {
      if (!v->is_number_integer() || v->get<int>() < 1)
        throw ValidationError("\"system.control_count\" must be a positive integer");
      config.system.control_count = v->get<int>();
    }
    if (const json* v = find(*section, "gamma")) config.system.gamma = v->get<double>();
    if (const json* v = find(*section, "endpoint")) {
      config.system.endpoint = v->get<std::string>();
      if (config.system.endpoint != "zero" && config.system.endpoint != "exp_well")
        throw ValidationError("\"system.endpoint\" must be \"zero\" or \"exp_well\"");
    }
  }

  // grid
  {
    const json* section = find(doc, "grid");
    if (!section || !section->is_array() || section->empty())
      throw ValidationError("\"grid\" must be a non-empty array of dimensions");
    for (std::size_t d = 0; d < section->size(); ++d) {
      const json& entry = (*section)[d];
      const std::string where = "grid[" + std::to_string(d) + "]";
      if (!entry.is_object()) throw ValidationError("\"" + where + "\" must be an object");
      reject_unknown_keys(entry, where, {"lower", "upper", "points", "periodic"});
      GridDim dim;
      dim.lower = require_number(entry, "lower", where + ".lower");
      dim.upper = require_number(entry, "upper", where + ".upper");
      const json* points = find(entry, "points");
      if (!points || !points->is_number_integer() || points->get<int>() < 2)
        throw ValidationError("\"" + where + ".points\" must be an integer >= 2");
      dim.point_count = points->get<int>();
      if (const json* v = find(entry, "periodic")) dim.periodic = v->get<bool>();
      if (!(dim.upper > dim.lower))
        throw ValidationError("\"" + where + "\": upper must exceed lower");
      config.grid.push_back(dim);
    }
  }

  // target (optional override of the builtin target)
  if (const json* section = find(doc, "target")) {
    reject_unknown_keys(*section, "target", {"boxes"});
    const json* boxes = find(*section, "boxes");
    if (!boxes || !boxes->is_array())
      throw ValidationError("\"target.boxes\" must be an array of boxes");
    std::vector<AxisBox> parsed;
    for (const json& box_json : *boxes) {
      AxisBox box;
      for (const json& interval : box_json) {
        if (interval.is_null()) {
          box.push_back(AxisInterval{});  // unconstrained dimension
        } else if (interval.is_array() && interval.size() == 2) {
          box.push_back(AxisInterval{interval[0].get<double>(), interval[1].get<double>()});
        } else {
          throw ValidationError("\"target.boxes\" entries must be [lo, hi] pairs or null");
        }
      }
      if (box.size() != config.grid.size())
        throw ValidationError("\"target.boxes\": box dimension does not match the grid");
      parsed.push_back(std::move(box));
    }
    config.target_boxes = std::move(parsed);
  }

  // cost (optional overrides of the analytic bounds)
  if (const json* section = find(doc, "cost")) {
    reject_unknown_keys(*section, "cost", {"lambda", "Lambda"});
    if (const json* v = find(*section, "lambda")) config.cost.lambda = v->get<double>();
    if (const json* v = find(*section, "Lambda")) config.cost.Lambda = v->get<double>();
  }

  // solver
  {
    const json* section = find(doc, "solver");
    if (!section || !section->is_object())
      throw ValidationError("\"solver\" section is required");
    reject_unknown_keys(*section, "solver",
                        {"dt", "steps", "auto_horizon", "epsilon", "out_of_domain", "threads"});
    config.solver.dt = require_number(*section, "dt", "solver.dt");
    if (!(config.solver.dt > 0.0)) throw ValidationError("\"solver.dt\" must be positive");
    if (const json* v = find(*section, "steps")) {
      if (!v->is_number_integer() || v->get<int>() < 0)
        throw ValidationError("\"solver.steps\" must be a non-negative integer");
      config.solver.steps = v->get<int>();
    }
    if (const json* v = find(*section, "auto_horizon")) config.solver.auto_horizon = v->get<bool>();
    if (const json* v = find(*section, "epsilon")) {
      config.solver.epsilon = v->get<double>();
      if (!(config.solver.epsilon > 0.0))
        throw ValidationError("\"solver.epsilon\" must be positive");
    }
    if (const json* v = find(*section, "out_of_domain")) {
      config.solver.out_of_domain = v->get<std::string>();
      if (config.solver.out_of_domain != "saturate" && config.solver.out_of_domain != "clamp")
        throw ValidationError("\"solver.out_of_domain\" must be \"saturate\" or \"clamp\"");
    }
    if (const json* v = find(*section, "threads")) config.solver.threads = v->get<int>();
    if (config.solver.steps.has_value() == config.solver.auto_horizon)
      throw ValidationError(
          "\"solver\" needs exactly one of \"steps\" or \"auto_horizon\": true");
  }

  // thresholds
  {
    const json* section = find(doc, "thresholds");
    if (!section || !section->is_array() || section->empty())
      throw ValidationError("\"thresholds\" must be a non-empty array");
    for (const json& v : *section) config.thresholds.push_back(v.get<double>());
    for (std::size_t i = 1; i < config.thresholds.size(); ++i)
      if (!(config.thresholds[i] > config.thresholds[i - 1]))
        throw ValidationError("\"thresholds\" must be strictly increasing");
  }

  // analysis
  if (const json* section = find(doc, "analysis")) {
    reject_unknown_keys(*section, "analysis", {"contours", "masks", "slices"});
    if (const json* v = find(*section, "contours")) config.analysis.contours = v->get<bool>();
    if (const json* v = find(*section, "masks")) config.analysis.masks = v->get<bool>();
    if (const json* v = find(*section, "slices")) {
      if (!v->is_array()) throw ValidationError("\"analysis.slices\" must be an array");
      for (const json& s : *v)
        config.analysis.slices.push_back(parse_slice_spec(s, "analysis.slices"));
    }
  }

  // verify
  if (const json* section = find(doc, "verify")) {
    reject_unknown_keys(*section, "verify",
                        {"enabled", "levels", "slice", "stride", "band_cells", "cost_tolerance",
                         "max_steps"});
    if (const json* v = find(*section, "enabled")) config.verify.enabled = v->get<bool>();
    if (const json* v = find(*section, "levels"))
      for (const json& level : *v) config.verify.levels.push_back(level.get<double>());
    if (const json* v = find(*section, "slice"))
      config.verify.slice = parse_slice_spec(*v, "verify.slice");
    if (const json* v = find(*section, "stride")) {
      config.verify.stride = v->get<int>();
      if (config.verify.stride < 1) throw ValidationError("\"verify.stride\" must be >= 1");
    }
    if (const json* v = find(*section, "band_cells")) config.verify.band_cells = v->get<double>();
    if (const json* v = find(*section, "cost_tolerance"))
      config.verify.cost_tolerance = v->get<double>();
    if (const json* v = find(*section, "max_steps")) config.verify.max_steps = v->get<int>();
  }

  // oracle
  if (const json* section = find(doc, "oracle")) {
    reject_unknown_keys(*section, "oracle",
                        {"enabled", "steps", "budget", "band_cells", "probe_lower", "probe_upper",
                         "probe_counts"});
    if (const json* v = find(*section, "enabled")) config.oracle.enabled = v->get<bool>();
    if (const json* v = find(*section, "steps")) config.oracle.steps = v->get<int>();
    if (const json* v = find(*section, "budget")) config.oracle.budget = v->get<double>();
    if (const json* v = find(*section, "band_cells")) config.oracle.band_cells = v->get<double>();
    if (const json* v = find(*section, "probe_lower"))
      for (const json& x : *v) config.oracle.probe_lower.push_back(x.get<double>());
    if (const json* v = find(*section, "probe_upper"))
      for (const json& x : *v) config.oracle.probe_upper.push_back(x.get<double>());
    if (const json* v = find(*section, "probe_counts"))
      for (const json& x : *v) config.oracle.probe_counts.push_back(x.get<int>());
    if (config.oracle.enabled) {
      if (config.oracle.steps < 1)
        throw ValidationError("\"oracle.steps\" must be >= 1 when the oracle is enabled");
      const std::size_t dims = config.grid.size();
      if (config.oracle.probe_lower.size() != dims || config.oracle.probe_upper.size() != dims ||
          config.oracle.probe_counts.size() != dims)
        throw ValidationError(
            "\"oracle.probe_lower/probe_upper/probe_counts\" must each list one entry per grid "
            "dimension");
      for (int count : config.oracle.probe_counts)
        if (count < 1) throw ValidationError("\"oracle.probe_counts\" entries must be >= 1");
    }
  }

  if (const json* v = find(doc, "output_dir")) config.output_dir = v->get<std::string>();
  if (config.output_dir.empty()) throw ValidationError("\"output_dir\" must not be empty");

  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path.string());
  std::string text(std::istreambuf_iterator<char>(in), {});
  return parse_run_config(text);
}

std::string resolved_config_json(const RunConfig& config) {
  json doc;
  doc["system"] = {{"name", config.system.name},
                   {"control_count", config.system.control_count},
                   {"gamma", config.system.gamma},
                   {"endpoint", config.system.endpoint}};
  auto& grid = doc["grid"] = json::array();
  for (const GridDim& dim : config.grid)
    grid.push_back({{"lower", dim.lower},
                    {"upper", dim.upper},
                    {"points", dim.point_count},
                    {"periodic", dim.periodic}});
  if (config.target_boxes) {
    auto& boxes = doc["target"]["boxes"] = json::array();
    for (const AxisBox& box : *config.target_boxes) {
      json entry = json::array();
      for (const AxisInterval& interval : box) {
        if (std::isinf(interval.lo) && std::isinf(interval.hi))
          entry.push_back(nullptr);
        else
          entry.push_back({interval.lo, interval.hi});
      }
      boxes.push_back(std::move(entry));
    }
  }
  json cost = json::object();
  if (config.cost.lambda) cost["lambda"] = *config.cost.lambda;
  if (config.cost.Lambda) cost["Lambda"] = *config.cost.Lambda;
  if (!cost.empty()) doc["cost"] = std::move(cost);
  json solver = {{"dt", config.solver.dt},
                 {"out_of_domain", config.solver.out_of_domain},
                 {"threads", config.solver.threads}};
  if (config.solver.steps) {
    solver["steps"] = *config.solver.steps;
  } else {
    solver["auto_horizon"] = true;
    solver["epsilon"] = config.solver.epsilon;
  }
  doc["solver"] = std::move(solver);
  doc["thresholds"] = config.thresholds;
  json slices = json::array();
  for (const SliceSpec& spec : config.analysis.slices) {
    json s = json::object();
    for (const auto& [d, value] : spec) s[std::to_string(d)] = value;
    slices.push_back(std::move(s));
  }
  doc["analysis"] = {{"contours", config.analysis.contours},
                     {"masks", config.analysis.masks},
                     {"slices", std::move(slices)}};
  json verify_slice = json::object();
  for (const auto& [d, value] : config.verify.slice) verify_slice[std::to_string(d)] = value;
  doc["verify"] = {{"enabled", config.verify.enabled},
                   {"levels", config.verify.levels.empty() ? config.thresholds
                                                           : config.verify.levels},
                   {"slice", std::move(verify_slice)},
                   {"stride", config.verify.stride},
                   {"band_cells", config.verify.band_cells},
                   {"cost_tolerance", config.verify.cost_tolerance},
                   {"max_steps", config.verify.max_steps}};
  doc["oracle"] = {{"enabled", config.oracle.enabled},
                   {"steps", config.oracle.steps},
                   {"budget", config.oracle.budget},
                   {"band_cells", config.oracle.band_cells},
                   {"probe_lower", config.oracle.probe_lower},
                   {"probe_upper", config.oracle.probe_upper},
                   {"probe_counts", config.oracle.probe_counts}};
  doc["output_dir"] = config.output_dir;
  return doc.dump(2);
}

std::string config_digest(const RunConfig& config) {
  return digest_text(resolved_config_json(config));
}

}  // namespace costreach
