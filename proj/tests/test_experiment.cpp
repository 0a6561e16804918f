#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "helpers.hpp"

using namespace endolab;
using namespace endolab::testhelp;
using nlohmann::json;

namespace {

json minimalDoc() {
  return json{{"model", {{"matrix", {{3, 1}, {1, 1}}}}}, {"seed", 5}};
}

}  // namespace

TEST_CASE("config validation rejects malformed documents") {
  CHECK_THROWS_AS(parse_config(json{{"seed", 1}}), ConfigError);  // no model

  json noSeed = minimalDoc();
  noSeed.erase("seed");
  CHECK_THROWS_AS(parse_config(noSeed), ConfigError);

  json noMatrix = minimalDoc();
  noMatrix["model"].erase("matrix");
  CHECK_THROWS_AS(parse_config(noMatrix), ConfigError);

  json badThreshold = minimalDoc();
  badThreshold["thresholds"] = {{"conj_residual", -1.0}};
  CHECK_THROWS_AS(parse_config(badThreshold), ConfigError);

  CHECK_THROWS_AS(load_config("/nonexistent/file.json"), ConfigError);
}

TEST_CASE("threshold defaults are pinned and overridable") {
  auto cfg = parse_config(minimalDoc());
  CHECK(cfg.threshold("linear_spectrum") == 1e-10);
  CHECK(cfg.threshold("conj_residual") == 1e-6);
  CHECK(cfg.threshold("conj_order") == 1.8);
  CHECK(cfg.threshold("sum_sigma") == 3.0);
  CHECK(cfg.threshold("special_variance") == 1e-10);
  CHECK(cfg.threshold("generic_variance") == 1e-4);
  CHECK_THROWS_AS(cfg.threshold("no_such_threshold"), ConfigError);

  json doc = minimalDoc();
  doc["thresholds"] = {{"conj_residual", 1e-5}};
  auto cfg2 = parse_config(doc);
  CHECK(cfg2.threshold("conj_residual") == 1e-5);
  CHECK(cfg2.threshold("conj_order") == 1.8);
}

TEST_CASE("config hash is deterministic and content sensitive") {
  json doc = minimalDoc();
  CHECK(config_hash(doc) == config_hash(doc));
  CHECK(parse_config(doc).hash == config_hash(doc));

  json other = doc;
  other["seed"] = 6;
  CHECK(config_hash(doc) != config_hash(other));
}

TEST_CASE("run block overrides the defaults") {
  json doc = minimalDoc();
  doc["run"] = {{"orbits", 3},
                {"steps", 1234},
                {"grids", {16, 32}},
                {"wu_offsets", {0.05, 0.1}},
                {"expect", "special"}};
  auto cfg = parse_config(doc);
  CHECK(cfg.orbits == 3);
  CHECK(cfg.steps == 1234);
  REQUIRE(cfg.grids.size() == 2);
  CHECK(cfg.grids[1] == 32);
  REQUIRE(cfg.wu_offsets.size() == 2);
  CHECK(cfg.wu_offsets[0] == 0.05);
  CHECK(cfg.expect == "special");
  // untouched defaults survive
  CHECK(cfg.burn_in == 1000);
  CHECK(cfg.holder_kmin == 4);
}

TEST_CASE("model builder resolves every perturbation kind") {
  auto lin = build_model(parse_config(minimalDoc()));
  CHECK(lin.dim() == 2);
  CHECK(lin.perturbation().kind == PerturbationKind::None);

  CHECK(crossShear(0.1, 0.1).perturbation().kind == PerturbationKind::ShearChain);
  CHECK(manufactured(0.001).perturbation().kind ==
        PerturbationKind::ManufacturedConjugacy);
  CHECK(generic(0.01).perturbation().kind ==
        PerturbationKind::GenericDisplacement);

  json bad = minimalDoc();
  bad["model"]["perturbation"] = {{"kind", "sideways"}};
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
}

TEST_CASE("spectrum scenario writes a manifest and passes on a linear model") {
  namespace fs = std::filesystem;
  fs::path out = fs::temp_directory_path() / "endolab_test_spectrum";
  fs::remove_all(out);

  json doc = minimalDoc();
  doc["run"] = {{"orbits", 2}, {"steps", 2000}};
  doc["output"] = {{"dir", out.string()}};
  auto cfg = parse_config(doc);

  auto res = run_scenario("spectrum", cfg);
  CHECK(res.status == 0);
  CHECK_FALSE(res.lines.empty());
  for (const auto& line : res.lines) CHECK(line.rfind("FAIL", 0) != 0);

  CHECK(fs::exists(out / "spectrum.manifest"));
  std::ifstream in(out / "spectrum.manifest");
  std::string first;
  std::getline(in, first);
  CHECK(first == "scenario = spectrum");
  fs::remove_all(out);
}

TEST_CASE("unknown scenario names are configuration errors") {
  auto cfg = parse_config(minimalDoc());
  auto res = run_scenario("frobnicate", cfg);
  CHECK(res.status == 4);
  REQUIRE_FALSE(res.lines.empty());
  CHECK(res.lines[0].rfind("ERROR", 0) == 0);
}

TEST_CASE("fixture regeneration is stable across reruns") {
  namespace fs = std::filesystem;
  fs::path out = fs::temp_directory_path() / "endolab_test_fixtures";
  fs::remove_all(out);

  json doc = minimalDoc();
  doc["output"] = {{"dir", out.string()}};
  auto cfg = parse_config(doc);

  auto first = regenerate_fixtures(cfg);
  CHECK(first.status == 0);
  auto second = regenerate_fixtures(cfg);  // must agree with the stored manifest
  CHECK(second.status == 0);
  fs::remove_all(out);
}
