// RunConfig: the JSON run document. Either names a built-in problem
// ("problem": "bar" | "inclusion", further keys override its study defaults)
// or spells the problem out field by field. Errors carry the offending field
// path.
#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "peristatic/core.hpp"
#include "peristatic/study.hpp"

namespace peristatic {

struct RunConfig {
  StudyConfig study;
  std::string csv_path;     // optional output override
  std::string fields_dir;   // optional per-run field dump directory
  std::string custom_weights_path;  // optional, scheme "custom" only
  bool allow_invalid_weights = false;
};

namespace config_detail {

using nlohmann::json;

[[noreturn]] inline void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config: field '" + path + "': " + what);
}

inline const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing");
  return *it;
}

inline double number(const json& v, const std::string& path) {
  if (v.is_number()) return v.get<double>();
  // Fractions like "1/40" are accepted for exact-looking kappas.
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    const auto slash = s.find('/');
    try {
      if (slash == std::string::npos) return std::stod(s);
      return std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
    } catch (...) {
      fail(path, "cannot parse number '" + s + "'");
    }
  }
  fail(path, "expected a number");
}

inline Vec2 vec2(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) fail(path, "expected [x, y]");
  return {number(v[0], path + "[0]"), number(v[1], path + "[1]")};
}

inline Region region(const json& v, const std::string& path) {
  const std::string kind = require(v, "kind", path).get<std::string>();
  if (kind == "box")
    return Region::box(vec2(require(v, "origin", path), path + ".origin"),
                       vec2(require(v, "extent", path), path + ".extent"));
  if (kind == "disc")
    return Region::disc(vec2(require(v, "center", path), path + ".center"),
                        number(require(v, "radius", path), path + ".radius"));
  fail(path + ".kind", "expected box or disc");
}

inline ScalarField scalar_field(const json& v, const std::string& path) {
  ScalarField f;
  if (v.is_number()) {
    f.background = v.get<double>();
    return f;
  }
  f.background = number(require(v, "background", path), path + ".background");
  if (v.contains("overrides")) {
    const json& os = v["overrides"];
    if (!os.is_array()) fail(path + ".overrides", "expected an array");
    for (std::size_t i = 0; i < os.size(); ++i) {
      const std::string p = path + ".overrides[" + std::to_string(i) + "]";
      f.overrides.push_back({region(require(os[i], "region", p), p + ".region"),
                             number(require(os[i], "value", p), p + ".value")});
    }
  }
  return f;
}

inline VectorField vector_field(const json& v, const std::string& path) {
  VectorField f;
  if (v.is_array()) {
    f.background = vec2(v, path);
    return f;
  }
  f.background = vec2(require(v, "background", path), path + ".background");
  if (v.contains("overrides")) {
    const json& os = v["overrides"];
    if (!os.is_array()) fail(path + ".overrides", "expected an array");
    for (std::size_t i = 0; i < os.size(); ++i) {
      const std::string p = path + ".overrides[" + std::to_string(i) + "]";
      f.overrides.push_back({region(require(os[i], "region", p), p + ".region"),
                             vec2(require(os[i], "value", p), p + ".value")});
    }
  }
  return f;
}

inline Kernel kernel(const json& v, double delta, const std::string& path) {
  const std::string name = require(v, "name", path).get<std::string>();
  if (name == "inverse_distance") return Kernel::inverse_distance(delta);
  if (name == "constant")
    return Kernel::constant(delta, v.contains("value") ? number(v["value"], path + ".value") : 1.0);
  if (name == "conical")
    return Kernel::conical(delta, number(require(v, "scale", path), path + ".scale"));
  if (name == "polynomial") {
    const json& cs = require(v, "coefficients", path);
    if (!cs.is_array() || cs.empty()) fail(path + ".coefficients", "expected a nonempty array");
    std::vector<double> coeffs;
    for (std::size_t i = 0; i < cs.size(); ++i)
      coeffs.push_back(number(cs[i], path + ".coefficients[" + std::to_string(i) + "]"));
    const int alpha =
        v.contains("alpha") ? static_cast<int>(number(v["alpha"], path + ".alpha")) : 0;
    return Kernel::polynomial(delta, coeffs, alpha);
  }
  fail(path + ".name", "unknown kernel '" + name + "'");
}

inline WeightScheme scheme(const std::string& s, const std::string& path) {
  if (s == "FA" || s == "fa") return WeightScheme::fa;
  if (s == "PAAC" || s == "paac") return WeightScheme::paac;
  if (s == "custom") return WeightScheme::custom;
  fail(path, "unknown scheme '" + s + "' (expected FA, PAAC or custom)");
}

}  // namespace config_detail

inline RunConfig parse_run_config(const std::string& text) {
  using config_detail::fail;
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");

  RunConfig rc;
  bool have_problem = false;
  if (doc.contains("problem")) {
    if (!doc["problem"].is_string()) fail("problem", "expected bar or inclusion");
    rc.study = builtin_study(doc["problem"].get<std::string>());
    have_problem = true;
  }
  if (!have_problem || doc.contains("domain")) {
    ProblemSpec p = have_problem ? rc.study.problem : ProblemSpec{};
    const double delta = config_detail::number(config_detail::require(doc, "delta", ""), "delta");
    p.domain.origin = config_detail::vec2(
        config_detail::require(config_detail::require(doc, "domain", ""), "origin", "domain"),
        "domain.origin");
    p.domain.extent = config_detail::vec2(
        config_detail::require(doc["domain"], "extent", "domain"), "domain.extent");
    p.theta = config_detail::region(config_detail::require(doc, "theta", ""), "theta");
    p.load = config_detail::vector_field(config_detail::require(doc, "load", ""), "load");
    p.k_field = config_detail::scalar_field(config_detail::require(doc, "k", ""), "k");
    p.l_field = config_detail::scalar_field(config_detail::require(doc, "l", ""), "l");
    p.kernel = doc.contains("kernel") ? config_detail::kernel(doc["kernel"], delta, "kernel")
                                      : Kernel::inverse_distance(delta);
    rc.study.problem = p;
  }

  if (doc.contains("kappas")) {
    rc.study.kappas.clear();
    if (!doc["kappas"].is_array() || doc["kappas"].empty())
      fail("kappas", "expected a nonempty array");
    for (std::size_t i = 0; i < doc["kappas"].size(); ++i)
      rc.study.kappas.push_back(
          config_detail::number(doc["kappas"][i], "kappas[" + std::to_string(i) + "]"));
  }
  if (doc.contains("reference_kappa"))
    rc.study.reference_kappa = config_detail::number(doc["reference_kappa"], "reference_kappa");
  if (doc.contains("schemes")) {
    rc.study.schemes.clear();
    if (!doc["schemes"].is_array() || doc["schemes"].empty())
      fail("schemes", "expected a nonempty array");
    for (std::size_t i = 0; i < doc["schemes"].size(); ++i)
      rc.study.schemes.push_back(config_detail::scheme(
          doc["schemes"][i].get<std::string>(), "schemes[" + std::to_string(i) + "]"));
  }
  if (doc.contains("reference_scheme"))
    rc.study.reference_scheme =
        config_detail::scheme(doc["reference_scheme"].get<std::string>(), "reference_scheme");

  if (doc.contains("solver")) {
    const auto& s = doc["solver"];
    if (s.contains("tol")) rc.study.solver.tol = config_detail::number(s["tol"], "solver.tol");
    if (!(rc.study.solver.tol > 0.0 && rc.study.solver.tol < 1.0))
      fail("solver.tol", "must be in (0, 1)");
    if (s.contains("max_iter"))
      rc.study.solver.max_iter = static_cast<int>(config_detail::number(s["max_iter"], "solver.max_iter"));
    if (s.contains("precond")) {
      const std::string p = s["precond"].get<std::string>();
      if (p == "jacobi")
        rc.study.solver.precond = Preconditioner::jacobi;
      else if (p == "none")
        rc.study.solver.precond = Preconditioner::none;
      else
        fail("solver.precond", "expected jacobi or none");
    }
  }

  if (doc.contains("output")) {
    const auto& o = doc["output"];
    if (o.contains("csv")) rc.csv_path = o["csv"].get<std::string>();
    if (o.contains("fields_dir")) rc.fields_dir = o["fields_dir"].get<std::string>();
  }
  if (doc.contains("custom_weights")) rc.custom_weights_path = doc["custom_weights"].get<std::string>();
  if (doc.contains("allow_invalid_weights"))
    rc.allow_invalid_weights = doc["allow_invalid_weights"].get<bool>();

  if (rc.study.kappas.empty()) fail("kappas", "missing");
  if (rc.study.schemes.empty()) fail("schemes", "missing");
  if (!(rc.study.reference_kappa > 0.0)) fail("reference_kappa", "missing or not positive");
  rc.study.validate();
  return rc;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

}  // namespace peristatic
