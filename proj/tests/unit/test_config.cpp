#include <doctest.h>

#include <peristatic/config.hpp>

using namespace peristatic;

namespace {
const char* kFullConfig = R"JSON({
  "domain": { "origin": [0.0, 0.0], "extent": [2.0, 1.0] },
  "delta": 0.05,
  "theta": { "kind": "box", "origin": [0.0, 0.0], "extent": [0.1, 1.0] },
  "load": {
    "background": [0.0, 0.0],
    "overrides": [
      { "region": { "kind": "box", "origin": [1.9, 0.0], "extent": [0.1, 1.0] },
        "value": [100.0, 0.0] }
    ]
  },
  "k": { "background": 100.0,
         "overrides": [ { "region": { "kind": "disc", "center": [1.0, 0.5], "radius": 0.3 },
                          "value": 0.01 } ] },
  "l": 800.0,
  "kernel": { "name": "inverse_distance" },
  "schemes": ["PAAC", "FA"],
  "kappas": ["1/40", 0.0125],
  "reference_kappa": "1/160",
  "reference_scheme": "PAAC",
  "solver": { "tol": 1e-10, "max_iter": 500, "precond": "jacobi" },
  "output": { "csv": "out.csv" }
})JSON";
}

TEST_CASE("parse_run_config: full document") {
  const RunConfig rc = parse_run_config(kFullConfig);
  CHECK(rc.study.problem.domain.extent.x == 2.0);
  CHECK(rc.study.problem.delta() == 0.05);
  CHECK(rc.study.problem.k_field({1.0, 0.5}) == 0.01);
  CHECK(rc.study.problem.k_field({0.1, 0.1}) == 100.0);
  CHECK(rc.study.problem.l_field({0.1, 0.1}) == 800.0);
  CHECK(rc.study.problem.load({1.95, 0.5}).x == 100.0);
  CHECK(rc.study.kappas.size() == 2);
  CHECK(rc.study.kappas[0] == 1.0 / 40.0);
  CHECK(rc.study.kappas[1] == 0.0125);
  CHECK(rc.study.reference_kappa == 1.0 / 160.0);
  CHECK(rc.study.schemes.size() == 2);
  CHECK(rc.study.schemes[0] == WeightScheme::paac);
  CHECK(rc.study.solver.tol == 1e-10);
  CHECK(rc.study.solver.max_iter == 500);
  CHECK(rc.csv_path == "out.csv");
}

TEST_CASE("parse_run_config: builtin shortcut with overrides") {
  const RunConfig rc = parse_run_config(R"({"problem": "bar", "kappas": ["1/40"], "reference_kappa": "1/80"})");
  CHECK(rc.study.problem.delta() == 0.05);
  CHECK(rc.study.kappas.size() == 1);
  CHECK(rc.study.reference_kappa == 1.0 / 80.0);
  CHECK(rc.study.schemes.size() == 2);  // inherited from the builtin study

  CHECK_THROWS_AS(parse_run_config(R"({"problem": "nope"})"), UnknownProblem);
}

TEST_CASE("parse_run_config: errors carry the field path") {
  auto message_of = [](const char* text) {
    try {
      parse_run_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("NO ERROR");
  };

  CHECK(message_of(R"({"problem": "bar", "solver": {"tol": 2.0}})").find("solver.tol") !=
        std::string::npos);
  CHECK(message_of(R"({"domain": {"origin": [0,0], "extent": [1,1]}})").find("delta") !=
        std::string::npos);
  CHECK(message_of(R"({"problem": "bar", "schemes": ["XX"]})").find("schemes[0]") !=
        std::string::npos);
  CHECK(message_of(R"({"problem": "bar", "kappas": []})").find("kappas") != std::string::npos);
  CHECK(message_of("{ not json").find("config") != std::string::npos);

  // theta region errors name the field
  const char* bad_theta = R"({
    "domain": { "origin": [0,0], "extent": [1,1] }, "delta": 0.1,
    "theta": { "kind": "triangle" },
    "load": [0,0], "k": 1.0, "l": 4.0,
    "kappas": [0.02], "reference_kappa": 0.01, "schemes": ["FA"]
  })";
  CHECK(message_of(bad_theta).find("theta.kind") != std::string::npos);
}

TEST_CASE("parse_run_config: fraction strings") {
  const RunConfig rc = parse_run_config(
      R"({"problem": "inclusion", "kappas": ["1/60"], "reference_kappa": "1/120"})");
  CHECK(rc.study.kappas[0] == 1.0 / 60.0);
  CHECK(rc.study.problem.k_field({1.0, 0.5}) == 0.01);
}
