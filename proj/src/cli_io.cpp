#include "kirchhoff/cli_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include <Eigen/Core>
#include <boost/version.hpp>
#include <oneapi/tbb/version.h>

#include "kirchhoff/asymptotic.hpp"
#include "kirchhoff/data_classes.hpp"
#include "kirchhoff/fixedpoint.hpp"
#include "kirchhoff/kirchhoff_scalar.hpp"
#include "kirchhoff/parallel.hpp"
#include "kirchhoff/symbols.hpp"

namespace kirchhoff {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kEquations{"scalar_kirchhoff", "spagnolo", "coupled_example22",
                                          "companion"};
const std::vector<std::string> kSolvers{"direct", "asymptotic", "fixedpoint", "none"};
const std::vector<std::string> kKinds{"gaussian", "bump", "rational", "zero"};

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const std::string& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Collects violations while walking the document.
class Reader {
 public:
  std::vector<std::string> errors;

  void fail(const std::string& path, const std::string& message) {
    errors.push_back((path.empty() ? "/" : path) + ": " + message);
  }

  bool object(const json& j, const std::string& path, const std::vector<std::string>& allowed) {
    if (!j.is_object()) {
      fail(path, "must be an object");
      return false;
    }
    for (const auto& item : j.items())
      if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
        fail(path + "/" + item.key(), "unknown key (allowed: " + join(allowed) + ")");
    return true;
  }

  // Reads obj[key] into out when present; `check` returns an error message or nothing.
  void number(const json& obj, const std::string& key, const std::string& path, double& out,
              const std::function<std::optional<std::string>(double)>& check = {}) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    const std::string p = path + "/" + key;
    if (!v.is_number()) {
      fail(p, "must be a number");
      return;
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
      fail(p, "must be finite");
      return;
    }
    if (check) {
      if (auto msg = check(x)) {
        fail(p, *msg);
        return;
      }
    }
    out = x;
  }

  template <class Int>
  void integer(const json& obj, const std::string& key, const std::string& path, Int& out,
               long long lo, long long hi) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    const std::string p = path + "/" + key;
    if (!v.is_number_integer()) {
      fail(p, "must be an integer");
      return;
    }
    const long long x = v.get<long long>();
    if (x < lo || x > hi) {
      fail(p, key + " must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
      return;
    }
    out = static_cast<Int>(x);
  }

  void boolean(const json& obj, const std::string& key, const std::string& path, bool& out) {
    if (!obj.contains(key)) return;
    if (!obj.at(key).is_boolean()) {
      fail(path + "/" + key, "must be true or false");
      return;
    }
    out = obj.at(key).get<bool>();
  }

  void choice(const json& obj, const std::string& key, const std::string& path, std::string& out,
              const std::vector<std::string>& allowed) {
    if (!obj.contains(key)) return;
    const std::string p = path + "/" + key;
    if (!obj.at(key).is_string()) {
      fail(p, "must be a string (allowed: " + join(allowed) + ")");
      return;
    }
    const std::string v = obj.at(key).get<std::string>();
    if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
      fail(p, "unknown " + key + " '" + v + "' (allowed: " + join(allowed) + ")");
      return;
    }
    out = v;
  }

  void text(const json& obj, const std::string& key, const std::string& path, std::string& out) {
    if (!obj.contains(key)) return;
    if (!obj.at(key).is_string() || obj.at(key).get<std::string>().empty()) {
      fail(path + "/" + key, "must be a non-empty string");
      return;
    }
    out = obj.at(key).get<std::string>();
  }

  void number_list(const json& obj, const std::string& key, const std::string& path,
                   std::vector<double>& out,
                   const std::function<std::optional<std::string>(double)>& check = {}) {
    if (!obj.contains(key)) return;
    const std::string p = path + "/" + key;
    if (!obj.at(key).is_array()) {
      fail(p, "must be an array of numbers");
      return;
    }
    std::vector<double> vals;
    const json& arr = obj.at(key);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      double x = 0.0;
      json wrapper{{"v", arr[i]}};
      const std::size_t before = errors.size();
      number(wrapper, "v", p + "/" + std::to_string(i), x, check);
      if (errors.size() == before) vals.push_back(x);
    }
    out = vals;
  }
};

const auto positive = [](const std::string& what) {
  return [what](double x) -> std::optional<std::string> {
    if (x > 0.0) return std::nullopt;
    return what + " must be positive";
  };
};

const auto within = [](const std::string& what, double lo, double hi) {
  return [=](double x) -> std::optional<std::string> {
    if (x >= lo && x <= hi) return std::nullopt;
    char buf[128];
    std::snprintf(buf, sizeof buf, " must lie in [%g, %g]", lo, hi);
    return what + buf;
  };
};

Profile parse_profile(Reader& r, const json& j, const std::string& path) {
  Profile p;
  if (!j.is_object()) {
    r.fail(path, "must be an object");
    return p;
  }
  std::string kind = "zero";
  if (!j.contains("kind")) {
    r.fail(path + "/kind", "missing required field (allowed: " + join(kKinds) + ")");
  } else {
    r.choice(j, "kind", path, kind, kKinds);
  }
  std::vector<std::string> allowed{"kind", "amplitude", "anisotropy"};
  if (kind == "gaussian") {
    allowed.insert(allowed.end(), {"alpha", "power"});
    p = Profile::gaussian(0.5);
    r.number(j, "alpha", path, p.alpha, positive("alpha"));
    r.integer(j, "power", path, p.power, 0, 8);
  } else if (kind == "bump") {
    allowed.insert(allowed.end(), {"lo", "hi"});
    p = Profile::bump(1.0, 3.0);
    r.number(j, "lo", path, p.lo, within("lo", 0.0, 1e6));
    r.number(j, "hi", path, p.hi, positive("hi"));
    if (!(p.hi > p.lo)) r.fail(path + "/hi", "hi must exceed lo");
  } else if (kind == "rational") {
    allowed.push_back("order");
    p = Profile::rational(3);
    r.integer(j, "order", path, p.order, 1, 64);
  }
  r.object(j, path, allowed);
  if (j.contains("amplitude")) {
    const json& a = j.at("amplitude");
    if (a.is_number()) {
      p.amplitude = Complex{a.get<double>(), 0.0};
    } else if (a.is_array() && a.size() == 2 && a[0].is_number() && a[1].is_number()) {
      p.amplitude = Complex{a[0].get<double>(), a[1].get<double>()};
    } else {
      r.fail(path + "/amplitude", "must be a number or [re, im]");
    }
    if (!std::isfinite(std::abs(p.amplitude))) r.fail(path + "/amplitude", "must be finite");
  }
  r.number(j, "anisotropy", path, p.anisotropy, within("anisotropy", -10.0, 10.0));
  return p;
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const ConvergenceError*>(&e)) return "ConvergenceError";
  if (dynamic_cast<const StiffnessError*>(&e)) return "StiffnessError";
  if (dynamic_cast<const IntegratorFailureError*>(&e)) return "IntegratorFailureError";
  if (dynamic_cast<const NotHyperbolicError*>(&e)) return "NotHyperbolicError";
  if (dynamic_cast<const NearDegeneracyError*>(&e)) return "NearDegeneracyError";
  if (dynamic_cast<const AssumptionViolationError*>(&e)) return "AssumptionViolationError";
  if (dynamic_cast<const NonHermitianFormError*>(&e)) return "NonHermitianFormError";
  if (dynamic_cast<const UnsupportedDimensionError*>(&e)) return "UnsupportedDimensionError";
  if (dynamic_cast<const UnsupportedOperationError*>(&e)) return "UnsupportedOperationError";
  if (dynamic_cast<const DimensionError*>(&e)) return "DimensionError";
  if (dynamic_cast<const InvalidArgumentError*>(&e)) return "InvalidArgumentError";
  if (dynamic_cast<const FileNotFoundError*>(&e)) return "FileNotFoundError";
  if (dynamic_cast<const Error*>(&e)) return "Error";
  return "InternalError";
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
  if (!out) throw Error("write failed for '" + path + "'");
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFoundError("file not found: '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json versions() {
  json v;
  v["toolkit"] = kToolkitVersion;
  v["compiler"] = __VERSION__;
  v["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
               "." + std::to_string(EIGEN_MINOR_VERSION);
  v["tbb"] = std::to_string(TBB_VERSION_MAJOR) + "." + std::to_string(TBB_VERSION_MINOR);
  v["boost"] = BOOST_LIB_VERSION;
  v["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                       std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                       std::to_string(NLOHMANN_JSON_VERSION_PATCH);
  return v;
}

// Symbol, form and initial field of the first-order system behind a scenario.
struct SystemSetup {
  SymbolMatrix symbol;
  HermitianForm form;
  SpectralField u0;
};

SpectralField scalar_field(const std::shared_ptr<const Grid>& grid, const Profile& p) {
  return InitialData{{p}}.sample(grid);
}

SystemSetup system_setup(const ScenarioConfig& c, const std::shared_ptr<const Grid>& grid,
                         const InitialData& data) {
  if (c.is_scalar()) {
    const bool zero_order = c.equation == "spagnolo";
    const Profile& f0 = data.components[0];
    const Profile& f1 = data.components[1];
    // gradient: V = (rho u, -i u'); zero order: V = (u, -i u' / rho).
    SpectralField u0 = SpectralField::sample(
        grid, 2, [&](std::size_t comp, const Direction& w, double rho) -> Complex {
          if (comp == 0) return zero_order ? f0(w, rho) : rho * f0(w, rho);
          const Complex v = Complex{0.0, -1.0} * f1(w, rho);
          return zero_order ? v / rho : v;
        });
    std::vector<double> diag = c.form.empty() ? std::vector<double>{1.0, 0.0} : c.form;
    return {scalar_kirchhoff_symbol(c.s_max), HermitianForm::diagonal(diag), std::move(u0)};
  }
  if (c.equation == "coupled_example22") {
    const double p1 = c.p1;
    const double p2 = c.p2;
    CoupledSymbol cs = coupled_symbol(
        c.a1, c.a2, [p1](double, const Direction&) { return p1; },
        [p2](double, const Direction&) { return p2; }, c.dimension, c.s_max);
    std::vector<double> diag = c.form.empty() ? std::vector<double>{1.0, 0.0, 1.0, 0.0} : c.form;
    return {cs.symbol, HermitianForm::diagonal(diag), data.sample(grid)};
  }
  std::vector<DirectionProfile> h;
  double lipschitz = 0.0;
  for (const CompanionTerm& t : c.companion) {
    h.push_back([t](double s, const Direction& w) { return t.c0 + t.c1 * s + t.c2 * w[0] * w[0]; });
    lipschitz += std::abs(t.c1);
  }
  std::vector<double> diag = c.form;
  if (diag.empty()) {
    diag.assign(c.companion.size(), 0.0);
    diag[0] = 1.0;
  }
  return {companion_symbol(std::move(h), c.s_max, lipschitz), HermitianForm::diagonal(diag),
          data.sample(grid)};
}

FixedPointOptions fixed_point_options(const ScenarioConfig& c) {
  FixedPointOptions o;
  o.tol = c.fixed_point_tol;
  o.max_iter = c.max_iter;
  o.checkpoint_intervals = c.checkpoints;
  o.linear.tol = c.linear_tol;
  o.k0 = c.k0;
  o.lambda = c.lambda;
  return o;
}

double energy_at_start(const Trajectory& t) { return t.energy.empty() ? 0.0 : t.energy.front(); }

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : Error([&] {
        std::string msg = "invalid configuration:";
        for (const std::string& v : violations) msg += "\n  " + v;
        return msg;
      }()),
      violations_(std::move(violations)) {}

ScenarioConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("/: not valid JSON: ") + e.what()});
  }
  Reader r;
  ScenarioConfig c;
  if (!r.object(doc, "", {"dimension", "equation", "companion", "coupled", "s_max", "form", "data",
                          "epsilon", "grid", "horizon", "solver", "checkpoints", "tolerances",
                          "fixed_point", "classes", "sweep", "seed", "output"}))
    throw ConfigError(r.errors);

  for (const char* key : {"equation", "solver", "data"})
    if (!doc.contains(key)) r.fail(std::string("/") + key, "missing required field");
  r.integer(doc, "dimension", "", c.dimension, 1, 3);
  r.choice(doc, "equation", "", c.equation, kEquations);
  r.choice(doc, "solver", "", c.solver, kSolvers);
  if (c.solver != "none" && !doc.contains("horizon")) r.fail("/horizon", "missing required field");
  r.number(doc, "horizon", "", c.horizon, [](double x) -> std::optional<std::string> {
    if (!(x > 0.0)) return "horizon must be positive";
    if (x > 1e4) return "horizon must not exceed 1e4";
    return std::nullopt;
  });
  r.number(doc, "epsilon", "", c.epsilon, within("epsilon", 0.0, 1e3));
  r.number(doc, "s_max", "", c.s_max, positive("s_max"));
  r.integer(doc, "checkpoints", "", c.checkpoints, 1, 100000);
  r.number_list(doc, "form", "", c.form);
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !(doc["seed"].is_number_integer() && doc["seed"].get<long long>() >= 0))
      r.fail("/seed", "must be a non-negative integer");
    else
      c.seed = doc["seed"].get<std::uint64_t>();
  }

  if (doc.contains("companion")) {
    const json& comp = doc["companion"];
    if (r.object(comp, "/companion", {"h"})) {
      if (!comp.contains("h") || !comp["h"].is_array() || comp["h"].empty()) {
        r.fail("/companion/h", "must be a non-empty array of {c0, c1, c2} terms");
      } else {
        for (std::size_t i = 0; i < comp["h"].size(); ++i) {
          const std::string p = "/companion/h/" + std::to_string(i);
          CompanionTerm t;
          if (r.object(comp["h"][i], p, {"c0", "c1", "c2"})) {
            r.number(comp["h"][i], "c0", p, t.c0);
            r.number(comp["h"][i], "c1", p, t.c1);
            r.number(comp["h"][i], "c2", p, t.c2);
          }
          c.companion.push_back(t);
        }
      }
    }
  }
  if (doc.contains("coupled")) {
    const json& cp = doc["coupled"];
    if (r.object(cp, "/coupled", {"a1", "a2", "p1", "p2"})) {
      r.number(cp, "a1", "/coupled", c.a1, positive("a1"));
      r.number(cp, "a2", "/coupled", c.a2, positive("a2"));
      r.number(cp, "p1", "/coupled", c.p1);
      r.number(cp, "p2", "/coupled", c.p2);
    }
  }

  if (doc.contains("data")) {
    const json& d = doc["data"];
    if (!d.is_array() || d.empty()) {
      r.fail("/data", "must be a non-empty array of profiles");
    } else {
      for (std::size_t i = 0; i < d.size(); ++i)
        c.data.push_back(parse_profile(r, d[i], "/data/" + std::to_string(i)));
    }
  }

  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    if (r.object(g, "/grid", {"angular", "polar", "radial", "rho_max", "rule"})) {
      r.integer(g, "angular", "/grid", c.grid.angular, 1, 4096);
      r.integer(g, "polar", "/grid", c.grid.polar, 0, 4096);
      r.integer(g, "radial", "/grid", c.grid.radial, 2, 65536);
      r.number(g, "rho_max", "/grid", c.grid.rho_max, positive("rho_max"));
      std::string rule = "gauss_legendre";
      r.choice(g, "rule", "/grid", rule, {"gauss_legendre", "trapezoid"});
      c.grid.rule = rule == "trapezoid" ? RadialRule::trapezoid : RadialRule::gauss_legendre;
    }
  }
  c.grid.dimension = c.dimension;

  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    if (r.object(t, "/tolerances", {"solver", "fixed_point", "linear"})) {
      r.number(t, "solver", "/tolerances", c.tol, within("solver tolerance", 1e-12, 1e-3));
      r.number(t, "fixed_point", "/tolerances", c.fixed_point_tol,
               within("fixed_point tolerance", 1e-14, 1e-2));
      r.number(t, "linear", "/tolerances", c.linear_tol, within("linear tolerance", 1e-14, 1e-3));
    }
  }
  if (doc.contains("fixed_point")) {
    const json& f = doc["fixed_point"];
    if (r.object(f, "/fixed_point", {"max_iter", "k0", "lambda", "cross_validate"})) {
      r.integer(f, "max_iter", "/fixed_point", c.max_iter, 1, 1000);
      r.number(f, "k0", "/fixed_point", c.k0, positive("k0"));
      r.number(f, "lambda", "/fixed_point", c.lambda, within("lambda", 0.0, 1e12));
      r.boolean(f, "cross_validate", "/fixed_point", c.cross_validate);
    }
  }
  if (doc.contains("classes")) {
    const json& k = doc["classes"];
    if (r.object(k, "/classes", {"norms", "threshold", "tau_max", "sweep"})) {
      if (k.contains("norms")) {
        if (!k["norms"].is_array()) {
          r.fail("/classes/norms", "must be an array of norm names");
        } else {
          for (std::size_t i = 0; i < k["norms"].size(); ++i) {
            const std::string p = "/classes/norms/" + std::to_string(i);
            if (!k["norms"][i].is_string()) {
              r.fail(p, "must be a string");
              continue;
            }
            const std::string name = k["norms"][i].get<std::string>();
            try {
              NormSelection::parse(name);
              c.class_norms.push_back(name);
            } catch (const InvalidArgumentError& e) {
              r.fail(p, e.what());
            }
          }
        }
      }
      r.number(k, "threshold", "/classes", c.class_threshold, positive("threshold"));
      r.number(k, "tau_max", "/classes", c.tau_max, within("tau_max", 1.0, 4096.0));
      r.boolean(k, "sweep", "/classes", c.class_sweep);
    }
  }
  if (doc.contains("sweep")) {
    const json& s = doc["sweep"];
    if (r.object(s, "/sweep", {"epsilons", "random_samples", "range"})) {
      r.number_list(s, "epsilons", "/sweep", c.sweep_epsilons, within("epsilon", 0.0, 1e3));
      r.integer(s, "random_samples", "/sweep", c.sweep_random, 0, 1000);
      if (s.contains("range")) {
        std::vector<double> range;
        r.number_list(s, "range", "/sweep", range, positive("range bound"));
        if (range.size() != 2 || !(range[0] < range[1]))
          r.fail("/sweep/range", "must be [lo, hi] with 0 < lo < hi");
        else {
          c.sweep_min = range[0];
          c.sweep_max = range[1];
        }
      }
    }
  }
  if (doc.contains("output")) {
    const json& o = doc["output"];
    if (r.object(o, "/output", {"directory", "prefix"})) {
      r.text(o, "directory", "/output", c.output_dir);
      r.text(o, "prefix", "/output", c.prefix);
      if (c.prefix.find('/') != std::string::npos) r.fail("/output/prefix", "must not contain '/'");
    }
  }

  // Cross-field checks.
  if (c.is_scalar() && !c.data.empty() && c.data.size() != 2)
    r.fail("/data", c.equation + " needs exactly two profiles (u0, u1), got " +
                        std::to_string(c.data.size()));
  if (c.equation == "coupled_example22" && !c.data.empty() && c.data.size() != 4)
    r.fail("/data", "coupled_example22 needs four profiles (V components), got " +
                        std::to_string(c.data.size()));
  if (c.equation == "companion") {
    if (c.companion.empty())
      r.fail("/companion/h", "companion equation needs a non-empty H list");
    else if (!c.data.empty() && c.data.size() != c.companion.size())
      r.fail("/data", "companion of order " + std::to_string(c.companion.size()) + " needs " +
                          std::to_string(c.companion.size()) + " profiles");
  } else if (doc.contains("companion")) {
    r.fail("/companion", "only valid with equation 'companion'");
  }
  if (!c.form.empty()) {
    const std::size_t m = c.is_scalar() ? 2 : c.equation == "coupled_example22" ? 4 : c.companion.size();
    if (c.form.size() != m)
      r.fail("/form", "needs " + std::to_string(m) + " diagonal entries, got " + std::to_string(c.form.size()));
  }
  if (c.solver == "direct" && !c.is_scalar())
    r.fail("/solver", "direct solver supports scalar_kirchhoff and spagnolo only (use fixedpoint)");
  if (c.cross_validate && !(c.solver == "fixedpoint" && c.is_scalar()))
    r.fail("/fixed_point/cross_validate", "requires solver 'fixedpoint' with a scalar equation");
  if ((!c.sweep_epsilons.empty() || c.sweep_random > 0) && c.solver != "fixedpoint")
    r.fail("/sweep", "amplitude sweeps require solver 'fixedpoint'");
  if (c.solver == "none" && c.class_norms.empty() && !c.class_sweep)
    r.fail("/classes", "solver 'none' needs class norms or a class sweep");
  if (c.dimension == 1 && c.grid.angular != 2 && doc.contains("grid") && doc["grid"].contains("angular"))
    r.fail("/grid/angular", "dimension 1 has exactly 2 directions");
  if (c.dimension == 1) c.grid.angular = 2;

  if (!r.errors.empty()) throw ConfigError(r.errors);
  return c;
}

ScenarioConfig load_config(const std::string& path) { return parse_config(read_text(path)); }

json ScenarioConfig::to_json() const {
  json j;
  j["dimension"] = dimension;
  j["equation"] = equation;
  if (equation == "companion") {
    json h = json::array();
    for (const CompanionTerm& t : companion) h.push_back({{"c0", t.c0}, {"c1", t.c1}, {"c2", t.c2}});
    j["companion"] = {{"h", h}};
  }
  if (equation == "coupled_example22") j["coupled"] = {{"a1", a1}, {"a2", a2}, {"p1", p1}, {"p2", p2}};
  j["s_max"] = s_max;
  j["form"] = form;
  json d = json::array();
  for (const Profile& p : data) {
    json e;
    switch (p.kind) {
      case ProfileKind::zero:
        e["kind"] = "zero";
        break;
      case ProfileKind::gaussian:
        e = {{"kind", "gaussian"}, {"alpha", p.alpha}, {"power", p.power}};
        break;
      case ProfileKind::bump:
        e = {{"kind", "bump"}, {"lo", p.lo}, {"hi", p.hi}};
        break;
      case ProfileKind::rational:
        e = {{"kind", "rational"}, {"order", p.order}};
        break;
    }
    e["amplitude"] = {p.amplitude.real(), p.amplitude.imag()};
    e["anisotropy"] = p.anisotropy;
    d.push_back(e);
  }
  j["data"] = d;
  j["epsilon"] = epsilon;
  j["grid"] = {{"angular", grid.angular},
               {"polar", grid.polar},
               {"radial", grid.radial},
               {"rho_max", grid.rho_max},
               {"rule", grid.rule == RadialRule::trapezoid ? "trapezoid" : "gauss_legendre"}};
  j["horizon"] = horizon;
  j["solver"] = solver;
  j["checkpoints"] = checkpoints;
  j["tolerances"] = {{"solver", tol}, {"fixed_point", fixed_point_tol}, {"linear", linear_tol}};
  j["fixed_point"] = {{"max_iter", max_iter}, {"k0", k0}, {"lambda", lambda}, {"cross_validate", cross_validate}};
  j["classes"] = {{"norms", class_norms}, {"threshold", class_threshold}, {"tau_max", tau_max}, {"sweep", class_sweep}};
  j["sweep"] = {{"epsilons", sweep_epsilons}, {"random_samples", sweep_random}, {"range", {sweep_min, sweep_max}}};
  j["seed"] = seed;
  j["output"] = {{"directory", output_dir}, {"prefix", prefix}};
  return j;
}

RunResult run_scenario(const ScenarioConfig& c) {
  const auto start = std::chrono::steady_clock::now();
  RunResult result;
  fs::create_directories(c.output_dir);
  const auto out_path = [&](const std::string& suffix) {
    return (fs::path(c.output_dir) / (c.prefix + suffix)).string();
  };
  const auto emit = [&](const std::string& suffix, const std::string& content) {
    const std::string p = out_path(suffix);
    write_text(p, content);
    result.artifacts.push_back(p);
  };
  json& manifest = result.manifest;
  manifest["config"] = c.to_json();
  manifest["versions"] = versions();
  manifest["threads"] = parallel::thread_count();

  try {
    const auto grid = std::make_shared<const Grid>(Grid::build(c.grid));
    manifest["grid"] = {{"dimension", grid->dimension()},
                        {"angular_nodes", grid->angular_count()},
                        {"radial_nodes", grid->radial_count()},
                        {"modes", grid->mode_count()},
                        {"rho_max", grid->rho_max()},
                        {"rule", c.grid.rule == RadialRule::trapezoid ? "trapezoid" : "gauss_legendre"}};
    const InitialData data = InitialData{c.data}.scaled(c.epsilon);
    ClassControls controls;
    controls.oscillatory.tau_max = c.tau_max;

    if (c.solver == "direct") {
      ScalarSolveOptions o;
      o.tol = c.tol;
      o.checkpoint_intervals = c.checkpoints;
      const NonlocalKind kind =
          c.equation == "spagnolo" ? NonlocalKind::zero_order : NonlocalKind::gradient;
      const Trajectory traj = solve_scalar(scalar_field(grid, data.components[0]),
                                           scalar_field(grid, data.components[1]), kind,
                                           c.horizon, o);
      emit("_trajectory.csv", traj.to_csv());
      manifest["results"] = {{"energy_start", energy_at_start(traj)},
                             {"max_relative_energy_drift", traj.max_relative_energy_drift()}};
    } else if (c.solver == "fixedpoint" || c.solver == "asymptotic") {
      const SystemSetup sys = system_setup(c, grid, data);
      const FixedPointOptions fo = fixed_point_options(c);
      std::vector<double> sweep = c.sweep_epsilons;
      if (c.sweep_random > 0) {
        std::mt19937_64 rng(c.seed);
        std::uniform_real_distribution<double> u(std::log(c.sweep_min), std::log(c.sweep_max));
        for (std::size_t i = 0; i < c.sweep_random; ++i) sweep.push_back(std::exp(u(rng)));
      }
      if (!sweep.empty()) {
        json rows = json::array();
        for (double eps : sweep) {
          const InitialData d = InitialData{c.data}.scaled(eps);
          const SystemSetup s = system_setup(c, grid, d);
          const NonlinearResult nr = solve_nonlinear(s.symbol, s.form, s.u0, c.horizon, fo);
          double ratio = 0.0;
          for (double q : nr.report.contraction_ratios) ratio = std::max(ratio, q);
          double sup_s = 0.0;
          for (double v : nr.trajectory.s) sup_s = std::max(sup_s, v);
          rows.push_back({{"epsilon", eps},
                          {"iterations", nr.report.iterations},
                          {"k_est", nr.report.k_est.empty() ? 0.0 : nr.report.k_est.back()},
                          {"max_contraction_ratio", ratio},
                          {"sup_s", sup_s},
                          {"energy_start", energy_at_start(nr.trajectory)}});
        }
        emit("_sweep.json", json{{"kind", "epsilon_sweep"}, {"seed", c.seed}, {"rows", rows}}.dump(2));
      }
      const NonlinearResult nr = solve_nonlinear(sys.symbol, sys.form, sys.u0, c.horizon, fo);
      emit("_iterations.json", nr.report.to_json().dump(2));
      manifest["results"] = {{"iterations", nr.report.iterations},
                             {"converged", nr.report.converged},
                             {"within_budget", nr.report.within_budget}};
      if (c.solver == "fixedpoint") {
        emit("_trajectory.csv", nr.trajectory.to_csv());
        if (c.cross_validate) {
          ScalarSolveOptions o;
          o.tol = c.tol;
          o.checkpoint_intervals = c.checkpoints;
          const NonlocalKind kind =
              c.equation == "spagnolo" ? NonlocalKind::zero_order : NonlocalKind::gradient;
          const Trajectory direct = solve_scalar(scalar_field(grid, data.components[0]),
                                                 scalar_field(grid, data.components[1]), kind,
                                                 c.horizon, o);
          double sup = 0.0;
          for (std::size_t i = 0; i < direct.size(); ++i)
            sup = std::max(sup, std::abs(nr.path.s(direct.times[i]) - direct.s[i]));
          manifest["results"]["cross_validation"] = {{"sup_s_difference", sup},
                                                     {"direct_checkpoints", direct.size()}};
        }
      } else {
        std::vector<double> times;
        for (std::size_t i = 0; i <= c.checkpoints; ++i)
          times.push_back(c.horizon * static_cast<double>(i) / static_cast<double>(c.checkpoints));
        LinearSolveOptions lo;
        lo.tol = c.linear_tol;
        const AsymptoticSolution asym = solve_asymptotic(nr.path, sys.symbol, sys.u0, times, lo);
        const std::vector<SpectralField> direct = direct_mode_solve(nr.path, sys.symbol, sys.u0, times, lo);
        std::ostringstream csv;
        csv << "t,s,l2_norm_sq,relative_difference\n";
        double worst = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i) {
          const double norm_sq = sobolev_norm_sq(direct[i], 0.0);
          const double diff = l2_distance(asym.snapshots[i], direct[i]);
          const double relative = norm_sq > 0.0 ? diff / std::sqrt(norm_sq) : diff;
          worst = std::max(worst, relative);
          csv << fmt17(times[i]) << ',' << fmt17(nr.path.s(times[i])) << ','
              << fmt17(sobolev_norm_sq(asym.snapshots[i], 0.0)) << ',' << fmt17(relative) << '\n';
        }
        emit("_trajectory.csv", csv.str());
        manifest["results"]["max_relative_representation_difference"] = worst;
      }
    }

    if (!c.class_norms.empty()) {
      std::vector<NormSelection> sel;
      for (const std::string& name : c.class_norms) sel.push_back(NormSelection::parse(name));
      const ClassReport rep = class_report(data, c.dimension, sel, c.class_threshold, controls);
      emit("_classes.json", rep.to_json().dump(2));
    }
    if (c.class_sweep) {
      const InclusionReport inc = inclusion_report(profile_catalog(), c.dimension, controls);
      emit("_inclusion.csv", inc.to_csv());
      emit("_inclusion.json", inc.to_json().dump(2));
      manifest["results"]["inclusion_violations"] = inc.violations.size();
    }
    manifest["controls"] = {{"tau_max", controls.oscillatory.tau_max},
                            {"nodes_per_wavelength", controls.oscillatory.nodes_per_wavelength},
                            {"cut_rel", controls.oscillatory.cut_rel}};
  } catch (const std::exception& e) {
    json err{{"error", error_kind(e)}, {"message", e.what()}};
    if (const auto* ce = dynamic_cast<const ConvergenceError*>(&e)) err["report"] = ce->report().to_json();
    emit("_error.json", err.dump(2));
    result.exit_code = 2;
    manifest["error"] = err["error"];
  }
  manifest["exit_code"] = result.exit_code;
  manifest["wall_time_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::vector<std::string> listed = result.artifacts;
  listed.push_back(out_path("_manifest.json"));
  manifest["artifacts"] = listed;
  emit("_manifest.json", manifest.dump(2));
  return result;
}

std::string emit_plotdata(const std::string& artifact, const std::string& out_path) {
  if (!fs::exists(artifact)) throw FileNotFoundError("artifact not found: '" + artifact + "'");
  const std::string content = read_text(artifact);
  const std::string target =
      out_path.empty() ? fs::path(artifact).replace_extension(".dat").string() : out_path;
  std::ostringstream os;
  const std::string ext = fs::path(artifact).extension().string();
  if (ext == ".csv") {
    std::istringstream in(content);
    std::string header;
    std::getline(in, header);
    std::vector<std::string> cols;
    {
      std::istringstream hs(header);
      std::string col;
      while (std::getline(hs, col, ',')) cols.push_back(col);
    }
    if (cols.size() >= 3 && cols[0] == "t" && cols[1] == "s" && cols[2] == "energy") {
      os << "# t [time]  s [|grad u|^2]  E [energy]  drift [(E - E0) / E0, dimensionless]\n";
      std::string line;
      double e0 = 0.0;
      bool first = true;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> v;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) v.push_back(std::stod(cell));
        if (v.size() < 3) throw InvalidArgumentError("malformed trajectory row in '" + artifact + "'");
        if (first) e0 = v[2];
        first = false;
        const double drift = e0 != 0.0 ? (v[2] - e0) / std::abs(e0) : 0.0;
        os << fmt17(v[0]) << ' ' << fmt17(v[1]) << ' ' << fmt17(v[2]) << ' ' << fmt17(drift) << '\n';
      }
    } else if (cols.size() >= 2 && cols[0] == "family" && cols[1] == "parameter") {
      os << "# family [name]  parameter [profile parameter]";
      for (std::size_t i = 2; i < cols.size(); ++i) os << "  " << cols[i] << " [norm value or inf]";
      os << '\n';
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        os << line << '\n';
      }
    } else {
      throw InvalidArgumentError("unrecognized CSV artifact '" + artifact + "'");
    }
  } else if (ext == ".json") {
    json j;
    try {
      j = json::parse(content);
    } catch (const json::parse_error& e) {
      throw InvalidArgumentError("artifact '" + artifact + "' is not valid JSON");
    }
    if (j.value("kind", "") == "epsilon_sweep") {
      os << "# epsilon [amplitude]  iterations [count]  K_est [total variation bound]  "
            "ratio [max contraction ratio]\n";
      for (const json& row : j["rows"])
        os << fmt17(row["epsilon"].get<double>()) << ' ' << row["iterations"].get<std::size_t>()
           << ' ' << fmt17(row["k_est"].get<double>()) << ' '
           << fmt17(row["max_contraction_ratio"].get<double>()) << '\n';
    } else if (j.contains("sup_diffs")) {
      os << "# iteration [count]  sup_diff [sup |s_new - s_old|]  K_est [total variation bound]\n";
      const auto& d = j["sup_diffs"];
      const auto& k = j["k_est"];
      for (std::size_t i = 0; i < d.size(); ++i)
        os << i + 1 << ' ' << fmt17(d[i].get<double>()) << ' '
           << fmt17(i < k.size() ? k[i].get<double>() : 0.0) << '\n';
    } else {
      throw InvalidArgumentError("unrecognized JSON artifact '" + artifact + "'");
    }
  } else {
    throw InvalidArgumentError("unsupported artifact type '" + ext + "'");
  }
  write_text(target, os.str());
  return target;
}

}  // namespace kirchhoff
