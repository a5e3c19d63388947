#include "costreach/systems.hpp"

#include <cmath>
#include <numbers>

#include "costreach/digest.hpp"
#include "costreach/errors.hpp"

namespace costreach {

namespace {

BuiltinProblem make_two_dim_poly(const BuiltinParams& params) {
  BuiltinProblem out;
  out.name = "two_dim_poly";
  out.model.state_dim = 2;
  out.model.control_values = make_interval_controls(-1.0, 1.0, params.control_count);
  out.model.wrap = {WrapSpec{}, WrapSpec{}};
  out.model.vector_field = [](const Vec& s, const Vec& u) {
    return Vec{s[1] + s[0] * s[0], -s[0] + s[1] * s[1] * s[1] + u[0]};
  };
  out.target.boxes = {AxisBox{{-0.2, 0.2}, {-0.2, 0.2}}};
  out.costs.running_cost = [](const Vec&, const Vec&) { return 1.0; };
  out.costs.endpoint_cost = [](const Vec&) { return 0.0; };
  out.costs.lambda = 1.0;
  out.costs.Lambda = 0.0;
  return out;
}

BuiltinProblem make_planar_flight(const BuiltinParams& params) {
  static constexpr double two_pi = 2.0 * std::numbers::pi;
  BuiltinProblem out;
  out.name = "planar_flight";
  out.model.state_dim = 3;
  out.model.control_values = make_interval_controls(-1.0, 1.0, params.control_count);
  out.model.wrap = {WrapSpec{}, WrapSpec{}, WrapSpec{true, 0.0, two_pi}};
  // Unit airspeed plus the wind field (y + 0.1 y^3, -x - 0.1 x^3).
  out.model.vector_field = [](const Vec& s, const Vec& u) {
    const double wx = s[1] + 0.1 * s[1] * s[1] * s[1];
    const double wy = -s[0] - 0.1 * s[0] * s[0] * s[0];
    return Vec{std::cos(s[2]) + wx, std::sin(s[2]) + wy, u[0]};
  };
  out.target.boxes = {AxisBox{{-0.5, 0.5}, {1.5, 2.5}, {}}};

  const double gamma = params.gamma;
  if (gamma == 0.0) {
    out.costs.running_cost = [](const Vec&, const Vec&) { return 1.0; };
  } else {
    // Time plus gamma-weighted ground speed (path length per unit time).
    out.costs.running_cost = [gamma](const Vec& s, const Vec&) {
      const double xdot = std::cos(s[2]) + s[1] + 0.1 * s[1] * s[1] * s[1];
      const double ydot = std::sin(s[2]) - s[0] - 0.1 * s[0] * s[0] * s[0];
      return 1.0 + gamma * std::sqrt(xdot * xdot + ydot * ydot);
    };
  }
  out.costs.lambda = 1.0;

  switch (params.endpoint) {
    case EndpointCost::Zero:
      out.costs.endpoint_cost = [](const Vec&) { return 0.0; };
      out.costs.Lambda = 0.0;
      break;
    case EndpointCost::ExpWell:
      out.costs.endpoint_cost = [](const Vec& s) {
        const double heading = std::min(s[2], two_pi - s[2]);
        return -std::exp(-s[0] * s[0] - s[1] * s[1] - heading);
      };
      out.costs.Lambda = -1.0;
      break;
  }
  return out;
}

}  // namespace

BuiltinProblem builtin_system(const std::string& name, const BuiltinParams& params) {
  if (params.control_count < 1)
    throw ValidationError("system.control_count must be >= 1, got " +
                          std::to_string(params.control_count));
  if (name == "two_dim_poly") return make_two_dim_poly(params);
  if (name == "planar_flight") return make_planar_flight(params);
  throw ValidationError("unknown system: \"" + name +
                        "\" (expected two_dim_poly or planar_flight)");
}

std::string make_problem_digest(const std::string& label, const SystemModel& model, double dt) {
  std::string key = label;
  key += "|dt=";
  key.append(reinterpret_cast<const char*>(&dt), sizeof(dt));
  key += "|u=";
  for (const Vec& u : model.control_values)
    key.append(reinterpret_cast<const char*>(u.data()),
               sizeof(double) * static_cast<std::size_t>(u.size()));
  for (const WrapSpec& w : model.wrap) {
    key += w.periodic ? "|p" : "|.";
    key.append(reinterpret_cast<const char*>(&w.lower), sizeof(double));
    key.append(reinterpret_cast<const char*>(&w.upper), sizeof(double));
  }
  return digest_text(key);
}

}  // namespace costreach
