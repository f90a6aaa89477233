#pragma once

// JSON simulation configs.
//
//   {
//     "model":  {"type": "se2_body", "mass": 1, "gravity": 9.8,
//                "shape": {"type": "ellipse", "a": 1, "b": 0.5}},
//     "rule":   "midpoint",
//     "q0": [1.5707963267948966, 0, 3.5], "v0": [-3, 2, 0],
//     "t0": 0, "t_final": 25, "h": 0.01,
//     "solver": {"tol": 1e-10},
//     "outputs": {"csv": true, "summary": true, "plots": ["energy"]}
//   }
//
// Every key except model, q0, v0, t_final and h is optional. Unknown keys are
// rejected with the JSON pointer of the offending entry.

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "nhvi/discretization.hpp"
#include "nhvi/errors.hpp"
#include "nhvi/integrator.hpp"
#include "nhvi/models.hpp"

namespace nhvi::io {

using json = nlohmann::json;

enum class PlotKind { Energy, Coordinates, PlaneTrajectory };

[[nodiscard]] inline std::string_view to_string(PlotKind k) {
  switch (k) {
    case PlotKind::Energy: return "energy";
    case PlotKind::Coordinates: return "coordinates";
    case PlotKind::PlaneTrajectory: return "plane_trajectory";
  }
  return "energy";
}

using ModelParams = std::variant<ParticleParams, Se2BodyParams, PendulumParams>;

struct SolverConfig {
  NewtonOptions newton{};
  MomentumTransfer transfer = MomentumTransfer::LeastSquares;
  double grazing_tol = 1e-12;
  double alpha_eps = 1e-6;
  bool operator==(const SolverConfig&) const = default;

  [[nodiscard]] IntegratorOptions integrator_options() const {
    IntegratorOptions o;
    o.newton = newton;
    o.transfer = transfer;
    o.grazing_tol = grazing_tol;
    o.alpha_eps = alpha_eps;
    return o;
  }
};

struct OutputConfig {
  bool csv = true;
  bool summary = true;
  std::vector<PlotKind> plots{};
  bool operator==(const OutputConfig&) const = default;
};

struct SimConfig {
  ModelParams model = Se2BodyParams{};
  Rule rule = Rule::Midpoint;
  std::vector<double> q0;
  std::vector<double> v0;
  double t0 = 0.0;
  double t_final = 1.0;
  double h = 0.01;
  SolverConfig solver{};
  OutputConfig outputs{};
  bool operator==(const SimConfig&) const = default;
};

[[nodiscard]] inline std::string model_type(const ModelParams& m) {
  switch (m.index()) {
    case 0: return "particle";
    case 1: return "se2_body";
    default: return "pendulum";
  }
}

[[nodiscard]] inline int model_dim(const ModelParams& m) { return m.index() == 1 ? 3 : 2; }

/// The pendulum's discrete constraint is built on the retraction rule; the
/// other models default to the midpoint rule.
[[nodiscard]] inline Rule default_rule(const ModelParams& m) {
  return m.index() == 2 ? Rule::RetractionLeft : Rule::Midpoint;
}

[[nodiscard]] inline std::shared_ptr<const MechanicalModel> build_model(const ModelParams& m) {
  return std::visit(
      [](const auto& p) -> std::shared_ptr<const MechanicalModel> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ParticleParams>) return make_particle(p);
        else if constexpr (std::is_same_v<T, Se2BodyParams>) return make_se2_body(p);
        else return make_pendulum(p);
      },
      m);
}

[[nodiscard]] inline Vector to_vector(const std::vector<double>& x) {
  return Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(x.size()));
}

namespace detail {

class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& what) {
    ErrorContext ctx;
    ctx.phase = path.empty() ? "/" : path;
    throw Error(ErrorKind::SchemaError, (path.empty() ? "/" : path) + ": " + what, ctx);
  }

  [[nodiscard]] std::string at(const std::string& key) const { return path_ + "/" + key; }
  [[nodiscard]] bool has(const std::string& key) const { return j_.contains(key); }

  [[nodiscard]] const json& raw(const std::string& key) const {
    seen_.insert(key);
    if (!j_.contains(key)) fail(at(key), "missing required key");
    return j_.at(key);
  }

  [[nodiscard]] double number(const std::string& key) const {
    const json& v = raw(key);
    if (!v.is_number()) fail(at(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(at(key), "expected a finite number");
    return x;
  }
  [[nodiscard]] double number(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }

  [[nodiscard]] int integer(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number_integer()) fail(at(key), "expected an integer");
    return v.get<int>();
  }

  [[nodiscard]] bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) fail(at(key), "expected true or false");
    return v.get<bool>();
  }

  [[nodiscard]] std::string string(const std::string& key) const {
    const json& v = raw(key);
    if (!v.is_string()) fail(at(key), "expected a string");
    return v.get<std::string>();
  }

  [[nodiscard]] std::vector<double> numbers(const std::string& key) const {
    const json& v = raw(key);
    if (!v.is_array()) fail(at(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
        fail(at(key) + "/" + std::to_string(i), "expected a finite number");
      }
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  [[nodiscard]] Reader child(const std::string& key) const { return Reader(raw(key), at(key)); }

  /// Rejects keys that no accessor asked for.
  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) {
        fail(at(item.key()), "unknown key");
      }
    }
  }

 private:
  const json& j_;
  std::string path_;
  mutable std::set<std::string> seen_;
};

inline ModelParams read_model(const Reader& r) {
  const std::string type = r.string("type");
  ModelParams out;
  if (type == "particle") {
    ParticleParams p;
    p.mass = r.number("mass", p.mass);
    p.gravity = r.number("gravity", p.gravity);
    out = p;
  } else if (type == "se2_body") {
    Se2BodyParams p;
    p.mass = r.number("mass", p.mass);
    p.gravity = r.number("gravity", p.gravity);
    if (r.has("inertia")) p.inertia = r.number("inertia");
    if (r.has("shape")) {
      const Reader s = r.child("shape");
      const std::string shape = s.string("type");
      if (shape == "ellipse") {
        EllipseShape e;
        e.a = s.number("a", e.a);
        e.b = s.number("b", e.b);
        p.shape = e;
      } else if (shape == "star") {
        StarShape st;
        st.l = s.number("l", st.l);
        p.shape = st;
      } else {
        Reader::fail(s.at("type"), "unknown shape '" + shape + "' (expected ellipse or star)");
      }
      s.finish();
    }
    out = p;
  } else if (type == "pendulum") {
    PendulumParams p;
    p.mass = r.number("mass", p.mass);
    p.gravity = r.number("gravity", p.gravity);
    p.length = r.number("length", p.length);
    p.radius = r.number("radius", p.radius);
    if (r.has("gain")) {
      const Reader g = r.child("gain");
      p.gain.offset = g.number("offset", p.gain.offset);
      p.gain.cos2_amplitude = g.number("cos2_amplitude", p.gain.cos2_amplitude);
      g.finish();
    }
    out = p;
  } else {
    Reader::fail(r.at("type"),
                 "unknown model '" + type + "' (expected particle, se2_body or pendulum)");
  }
  r.finish();
  return out;
}

inline PlotKind read_plot(const json& v, const std::string& path) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "energy") return PlotKind::Energy;
    if (s == "coordinates") return PlotKind::Coordinates;
    if (s == "plane_trajectory") return PlotKind::PlaneTrajectory;
  }
  Reader::fail(path, "expected one of energy, coordinates, plane_trajectory");
}

}  // namespace detail

/// Checks the cross-field invariants and that the model parameters build.
inline void validate(const SimConfig& c) {
  using detail::Reader;
  if (!(c.h > 0.0)) Reader::fail("/h", "timestep must be positive");
  if (!(c.t_final > c.t0)) Reader::fail("/t_final", "t_final must exceed t0");
  if (std::lround((c.t_final - c.t0) / c.h) < 1) {
    Reader::fail("/h", "interval is shorter than one step");
  }
  const int n = model_dim(c.model);
  for (const auto& [name, x] : {std::pair{"q0", &c.q0}, std::pair{"v0", &c.v0}}) {
    if (static_cast<int>(x->size()) != n) {
      ErrorContext ctx;
      ctx.phase = std::string("/") + name;
      throw Error(ErrorKind::DimensionMismatch,
                  std::string("/") + name + ": length " + std::to_string(x->size()) + ", model '" +
                      model_type(c.model) + "' has dimension " + std::to_string(n),
                  ctx);
    }
  }
  try {
    c.solver.newton.validate();
  } catch (const Error& e) {
    Reader::fail("/solver", e.detail());
  }
  if (!(c.solver.grazing_tol >= 0.0)) Reader::fail("/solver/grazing_tol", "must be >= 0");
  if (!(c.solver.alpha_eps > 0.0 && c.solver.alpha_eps < 0.5)) {
    Reader::fail("/solver/alpha_eps", "must lie in (0, 0.5)");
  }
  try {
    (void)build_model(c.model);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::SchemaError) throw;
    Reader::fail("/model", e.detail());
  }
}

[[nodiscard]] inline SimConfig parse_config(const json& j) {
  using detail::Reader;
  const Reader r(j, "");
  SimConfig c;
  c.model = detail::read_model(r.child("model"));
  c.rule = default_rule(c.model);
  if (r.has("rule")) {
    try {
      c.rule = rule_from_string(r.string("rule"));
    } catch (const Error& e) {
      Reader::fail("/rule", e.detail());
    }
  }
  c.q0 = r.numbers("q0");
  c.v0 = r.numbers("v0");
  c.t0 = r.number("t0", 0.0);
  c.t_final = r.number("t_final");
  c.h = r.number("h");

  if (r.has("solver")) {
    const Reader s = r.child("solver");
    NewtonOptions& n = c.solver.newton;
    n.tol = s.number("tol", n.tol);
    n.max_iter = s.integer("max_iter", n.max_iter);
    n.max_backtracks = s.integer("max_backtracks", n.max_backtracks);
    n.fd_eps = s.number("fd_eps", n.fd_eps);
    c.solver.grazing_tol = s.number("grazing_tol", c.solver.grazing_tol);
    c.solver.alpha_eps = s.number("alpha_eps", c.solver.alpha_eps);
    if (s.has("momentum_transfer")) {
      try {
        c.solver.transfer = momentum_transfer_from_string(s.string("momentum_transfer"));
      } catch (const Error& e) {
        Reader::fail("/solver/momentum_transfer", e.detail());
      }
    }
    s.finish();
  }
  if (r.has("outputs")) {
    const Reader o = r.child("outputs");
    c.outputs.csv = o.boolean("csv", c.outputs.csv);
    c.outputs.summary = o.boolean("summary", c.outputs.summary);
    if (o.has("plots")) {
      const json& plots = o.raw("plots");
      if (!plots.is_array()) Reader::fail("/outputs/plots", "expected an array");
      for (std::size_t i = 0; i < plots.size(); ++i) {
        c.outputs.plots.push_back(
            detail::read_plot(plots[i], "/outputs/plots/" + std::to_string(i)));
      }
    }
    o.finish();
  }
  r.finish();
  validate(c);
  return c;
}

[[nodiscard]] inline SimConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::SchemaError, "cannot open config '" + path.string() + "'");
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::SchemaError, path.string() + ": " + e.what());
  }
  return parse_config(j);
}

[[nodiscard]] inline json serialize(const SimConfig& c) {
  json model;
  model["type"] = model_type(c.model);
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        model["mass"] = p.mass;
        model["gravity"] = p.gravity;
        if constexpr (std::is_same_v<T, Se2BodyParams>) {
          if (p.inertia) model["inertia"] = *p.inertia;
          if (const auto* e = std::get_if<EllipseShape>(&p.shape)) {
            model["shape"] = {{"type", "ellipse"}, {"a", e->a}, {"b", e->b}};
          } else {
            model["shape"] = {{"type", "star"}, {"l", std::get<StarShape>(p.shape).l}};
          }
        } else if constexpr (std::is_same_v<T, PendulumParams>) {
          model["length"] = p.length;
          model["radius"] = p.radius;
          model["gain"] = {{"offset", p.gain.offset},
                           {"cos2_amplitude", p.gain.cos2_amplitude}};
        }
      },
      c.model);

  json plots = json::array();
  for (PlotKind k : c.outputs.plots) plots.push_back(std::string(to_string(k)));

  return {
      {"model", model},
      {"rule", std::string(to_string(c.rule))},
      {"q0", c.q0},
      {"v0", c.v0},
      {"t0", c.t0},
      {"t_final", c.t_final},
      {"h", c.h},
      {"solver",
       {{"tol", c.solver.newton.tol},
        {"max_iter", c.solver.newton.max_iter},
        {"max_backtracks", c.solver.newton.max_backtracks},
        {"fd_eps", c.solver.newton.fd_eps},
        {"grazing_tol", c.solver.grazing_tol},
        {"alpha_eps", c.solver.alpha_eps},
        {"momentum_transfer", std::string(to_string(c.solver.transfer))}}},
      {"outputs", {{"csv", c.outputs.csv}, {"summary", c.outputs.summary}, {"plots", plots}}},
  };
}

}  // namespace nhvi::io
