#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "frechet/error.hpp"
#include "frechet/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"frechet-lab: Frechet mean and nonsmooth calculus scenarios"};
  std::string scenario;
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool json = false;
  bool list = false;

  std::string names;
  for (const auto& s : frechet::scenario_list()) names += (names.empty() ? "" : ", ") + s.name;
  app.add_option("scenario", scenario, "Scenario to run (" + names + ")");
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Directory for JSON Lines and CSV output");
  app.add_option("--seed", seed, "Seed (overrides the config)");
  app.add_flag("--json", json, "Print the run record as one JSON line");
  app.add_flag("--list-scenarios", list, "List scenarios and exit");
  CLI11_PARSE(app, argc, argv);

  if (list) {
    for (const auto& s : frechet::scenario_list()) std::printf("%-16s %s\n", s.name.c_str(), s.citation.c_str());
    return 0;
  }
  if (scenario.empty()) {
    std::cerr << app.help();
    return 2;
  }

  try {
    const frechet::ScenarioConfig cfg =
        config_path.empty() ? frechet::ScenarioConfig::parse(scenario, frechet::Json::object(), seed)
                            : frechet::ScenarioConfig::load(scenario, config_path, seed);
    const frechet::RunRecord rec = frechet::run_scenario(cfg);
    for (const auto& w : rec.warnings) std::cerr << "warning: " << w << '\n';

    if (out_dir.empty())
      if (const auto* o = cfg.section("output"); o && o->contains("dir")) out_dir = (*o)["dir"].get<std::string>();
    if (!out_dir.empty()) frechet::write_outputs(rec, out_dir);

    if (json) {
      std::cout << rec.to_json().dump() << '\n';
    } else {
      std::printf("scenario %s  config %s  %.2fs\n", rec.scenario.c_str(), rec.config_hash.c_str(), rec.wall_time);
      for (const auto& c : rec.checks) {
        std::printf("  %s  %-24s %s", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.citation.c_str());
        if (!c.detail.empty()) std::printf(" [%s]", c.detail.c_str());
        if (c.noisy) std::printf(" (%d noisy probes)", c.noisy);
        std::printf("\n");
      }
      if (rec.checks.empty()) std::printf("  %s\n", rec.payload.dump().c_str());
    }
    if (!rec.ok()) {
      std::cerr << "failing checks:";
      for (const auto& c : rec.checks)
        if (!c.passed) std::cerr << ' ' << c.name << " (" << c.citation << ")";
      std::cerr << '\n';
      return 1;
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
