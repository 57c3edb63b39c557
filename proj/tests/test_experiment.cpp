#include <filesystem>
#include <fstream>
#include <numbers>

#include "doctest.h"
#include "frechet/error.hpp"
#include "frechet/experiment.hpp"

using namespace frechet;
namespace {

constexpr double kPi = std::numbers::pi;

RunRecord run(const std::string& scenario, const Json& tree = Json::object(),
              std::optional<std::uint64_t> seed = std::nullopt) {
  return run_scenario(ScenarioConfig::parse(scenario, tree, seed));
}

bool check_passed(const RunRecord& rec, const std::string& name) {
  for (const auto& c : rec.checks)
    if (c.name == name) return c.passed;
  FAIL("no check named " << name);
  return false;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidInput;
}

}  // namespace

TEST_CASE("scenario list") {
  const auto& list = scenario_list();
  REQUIRE(list.size() == 8);
  for (const auto& s : list) CHECK_FALSE(s.citation.empty());
  CHECK(code_of([] { run("bogus"); }) == ErrorCode::InvalidInput);
}

TEST_CASE("every scenario passes on its defaults") {
  for (const auto& s : scenario_list()) {
    CAPTURE(s.name);
    const RunRecord rec = run(s.name);
    CHECK(rec.ok());
    CHECK_FALSE(rec.checks.empty());
    for (const auto& c : rec.checks) CHECK_FALSE(c.citation.empty());
    CHECK(rec.version == std::string(kVersion));
  }
}

TEST_CASE("mean scenario") {
  const RunRecord rec = run("mean");
  const Json& m = rec.payload["means"][0];
  CHECK(m["value"].get<double>() == doctest::Approx(kPi * kPi / 4).epsilon(1e-12));
  CHECK(m["linearity_gap"].get<double>() < 1e-5);

  const RunRecord one = run("mean", {{"manifold", "sphere"}, {"measure", {{"atoms", {{0.6, 0.0, 0.8}}}}}});
  CHECK(one.ok());
  const Json& o = one.payload["means"][0];
  CHECK(std::abs(o["mean"]["coords"][0].get<double>() - 0.6) < 1e-9);
  CHECK(o["log_residual"].get<double>() < 1e-9);
  CHECK(o["linearity_gap"].get<double>() < 1e-9);

  const RunRecord eq = run("mean", {{"manifold", "sphere"}, {"measure", {{"equator_lattice", 100}}}});
  CHECK(eq.ok());
  REQUIRE(eq.payload["near_tie_count"] == 2);
  const double z0 = eq.payload["means"][0]["mean"]["coords"][2].get<double>();
  const double z1 = eq.payload["means"][1]["mean"]["coords"][2].get<double>();
  CHECK(std::abs(std::abs(z0) - 1.0) < 1e-6);
  CHECK(z0 * z1 < 0.0);
}

TEST_CASE("cut-mass scenario") {
  const RunRecord inside = run("cut-mass", {{"manifold", "sphere"},
                                            {"measure", {{"atoms", {{0.1, 0.0, 1.0}, {0.0, 0.1, 1.0}, {0.0, 0.0, 1.0}}}}},
                                            {"auto_fix", true}});
  CHECK(inside.ok());
  for (const auto& row : inside.payload["mean"]["cut_mass_profile"]["profile"]) CHECK(row["mass"] == 0.0);

  const RunRecord dy = run("cut-mass", {{"manifold", "circle"},
                                        {"measure", {{"dyadic", 12}}},
                                        {"solver", {{"epsilons", {1e-9, 1e-3}}}}});
  CHECK(dy.ok());
  CHECK(dy.payload["mean"]["cut_mass_profile"]["exact_mass"] == 0.0);
  CHECK(dy.payload["mean"]["cut_mass_profile"]["profile"][0]["epsilon"] == 1e-9);
}

TEST_CASE("circle-barrier scenario") {
  const RunRecord rec = run("circle-barrier", {{"barrier", {{"targets", {-1.0 / kPi, -1.0}}}}});
  CHECK(rec.ok());
  const Json& t0 = rec.payload["targets"][0];
  CHECK(t0["radius"].get<double>() == doctest::Approx(kPi));
  CHECK(t0["explicit"]["margin"].get<double>() >= 0.0);
  const Json& t1 = rec.payload["targets"][1];
  CHECK(t1["radius"].get<double>() == doctest::Approx(1.0));
  CHECK(t1["explicit"]["margin"].get<double>() >= 0.0);
  CHECK(t1["explicit"]["trace"].get<double>() == -2.0);

  CHECK(code_of([] { run("circle-barrier", {{"barrier", {{"targets", {1.0}}}}}); }) == ErrorCode::InvalidInput);
  CHECK(code_of([] { run("circle-barrier", {{"manifold", "sphere"}}); }) == ErrorCode::InvalidInput);
}

TEST_CASE("nowhere-smooth scenario") {
  const RunRecord two = run("nowhere-smooth", {{"measure", {{"dyadic", 2}}}});
  CHECK(two.ok());
  CHECK(two.payload["gaps"][0]["gap"].get<double>() >= 4 * kPi * 2.0 / 3.0 - 0.05);

  const RunRecord one = run("nowhere-smooth", {{"measure", {{"dyadic", 1}}}});
  CHECK(one.payload["gaps"][0]["gap"].get<double>() == doctest::Approx(4 * kPi).epsilon(1e-4));

  const RunRecord sph = run("nowhere-smooth", {{"manifold", "sphere"}, {"measure", {{"dyadic", 12}}}});
  CHECK(sph.ok());
  REQUIRE(sph.payload["gaps"].size() == 12);
  for (const auto& g : sph.payload["gaps"]) CHECK(g["gap"].get<double>() > 0.0);
  CHECK(check_passed(sph, "geometric-decay"));
}

TEST_CASE("sticky scenario") {
  for (const auto& bp : mean_battery()) {
    if (bp.problem.manifold().kind() != ManifoldKind::FlatTorus) continue;
    const RunRecord rec = run("sticky", {{"manifold", to_json(bp.problem.manifold())},
                                         {"measure", to_json(bp.problem.measure)}});
    CHECK(rec.ok());
    CHECK(std::abs(rec.payload["min_derivative"].get<double>()) <= 1e-5);
    break;
  }
  const RunRecord med = run("sticky", {{"manifold", "circle"},
                                       {"measure", {{"atoms", {{-0.3}, {0.0}, {0.3}}}}},
                                       {"exponent", 1.0}});
  CHECK(med.ok());
  CHECK(med.payload["atom_at_mean_mass"].get<double>() == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  const RunRecord one = run("sticky", {{"manifold", "sphere"}, {"measure", {{"atoms", {{0.0, 0.0, 1.0}}}}}});
  CHECK(one.ok());
  CHECK(one.payload["verdict"] == "nonsticky");
}

TEST_CASE("le-barden scenario reports budget exhaustion without failing") {
  const RunRecord rec = run("le-barden", {{"le_barden", {{"budget", 10}}}});
  CHECK(rec.ok());
  CHECK(rec.payload["found"] == false);
}

TEST_CASE("lemma suite") {
  Json corrupted = {{"manifold", "circle"}, {"measure", {{"atoms", {{0.0}, {1.0}}}, {"weights", {0.5, 0.6}}}}};
  try {
    run("lemma-suite", corrupted);
    FAIL("expected a plumbing error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidInput);
    CHECK(std::string(e.what()).find("auto_fix") != std::string::npos);
  }
  corrupted["auto_fix"] = true;
  const RunRecord fixed = run("lemma-suite", corrupted);
  CHECK(fixed.ok());
  CHECK_FALSE(fixed.warnings.empty());

  const RunRecord tight = run("lemma-suite", {{"tolerance_scale", 1e-3}});
  CHECK(tight.ok());
  CHECK(tight.payload["noisy_probes"].get<int>() > 0);
}

TEST_CASE("determinism") {
  for (const std::string s : {"mean", "nowhere-smooth", "lemma-suite"}) {
    CAPTURE(s);
    const RunRecord a = run(s, Json::object(), 7), b = run(s, Json::object(), 7);
    CHECK(a.config_hash == b.config_hash);
    CHECK(a.deterministic_json().dump() == b.deterministic_json().dump());
    CHECK_FALSE(a.deterministic_json().contains("wall_time_s"));
  }
}

TEST_CASE("config validation") {
  CHECK(code_of([] { ScenarioConfig::parse("mean", {{"colour", 1}}); }) == ErrorCode::InvalidInput);
  CHECK(code_of([] { ScenarioConfig::parse("mean", {{"solver", {{"stepsize", 0.1}}}}); }) == ErrorCode::InvalidInput);
  CHECK(code_of([] { ScenarioConfig::parse("mean", Json::array()); }) == ErrorCode::InvalidInput);

  const Json sampled = {{"manifold", "sphere"}, {"measure", {{"sampler", {{"kind", "uniform"}, {"count", 20}}}}}};
  CHECK(code_of([&] { run("mean", sampled); }) == ErrorCode::InvalidInput);
  CHECK(run("mean", sampled, 3).ok());
  Json seeded = sampled;
  seeded["seed"] = 3;
  CHECK(ScenarioConfig::parse("mean", seeded).hash() == ScenarioConfig::parse("mean", sampled, 3).hash());
  CHECK(ScenarioConfig::parse("mean", sampled, 3).hash() != ScenarioConfig::parse("mean", sampled, 4).hash());

  const auto cfg = ScenarioConfig::parse("mean", Json::object());
  const SolverParams p = cfg.solver();
  CHECK(p.step == 0.5);
  CHECK(p.grad_tolerance == 1e-9);
  CHECK(p.max_iterations == 10000);
  CHECK(cfg.schedule().steps.size() == 9);

  const auto missing = std::filesystem::temp_directory_path() / "frechet_lab_missing.json";
  std::filesystem::remove(missing);
  CHECK_THROWS_AS(ScenarioConfig::load("mean", missing), Error);
}

TEST_CASE("outputs") {
  const auto dir = std::filesystem::temp_directory_path() / "frechet_lab_test_out";
  std::filesystem::remove_all(dir);
  const RunRecord rec = run("nowhere-smooth");
  write_outputs(rec, dir);
  write_outputs(rec, dir);
  std::ifstream in(dir / "nowhere-smooth.jsonl");
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    const Json j = Json::parse(line);
    CHECK(j["scenario"] == "nowhere-smooth");
    CHECK(j.contains("wall_time_s"));
    ++lines;
  }
  CHECK(lines == 2);
  REQUIRE_FALSE(rec.tables.empty());
  for (const auto& t : rec.tables) {
    std::ifstream csv(dir / ("nowhere-smooth_" + t.name + ".csv"));
    REQUIRE(csv.good());
    std::string header;
    std::getline(csv, header);
    CHECK(header.find(t.header.front()) == 0);
  }
  std::filesystem::remove_all(dir);
}
