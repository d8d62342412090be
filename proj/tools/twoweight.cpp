#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "twoweight/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Two-weight constants and lemma checks on discrete measure pairs"};
  std::string scenario_path, out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::vector<std::string> suites;
  app.add_option("--scenario", scenario_path, "scenario JSON file")->required();
  app.add_option("--out", out_dir, "directory for report.json and report.md");
  app.add_option("--seed", seed, "corpus seed, overrides the scenario file");
  app.add_option("--suite", suites, "suite to run (repeatable), overrides the scenario file")
      ->check(CLI::IsMember(tw::cli::suite_names()));
  CLI11_PARSE(app, argc, argv);

  tw::cli::Scenario s;
  try {
    s = tw::cli::load_scenario(scenario_path);
    if (seed) {
      s.corpus.seed = *seed;
      s.source["corpus"]["seed"] = *seed;
    }
    if (!suites.empty()) {
      s.suites = suites;
      s.source["suites"] = suites;
      if (std::find(suites.begin(), suites.end(), "reversal-k1") != suites.end()) s = tw::cli::parse_scenario(s.source);
    }
  } catch (const tw::cli::ConfigError& e) {
    std::cerr << "invalid scenario: " << e.what() << "\n";
    return 2;
  }

  tw::cli::Report r;
  try {
    r = tw::cli::run_scenario(s);
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << "\n";
    return 3;
  }
  std::filesystem::create_directories(out_dir);
  std::ofstream(std::filesystem::path(out_dir) / "report.json") << r.json.dump(2) << "\n";
  const std::string md = tw::cli::markdown(r.json);
  std::ofstream(std::filesystem::path(out_dir) / "report.md") << md;
  std::cout << md;
  return r.ok ? 0 : 1;
}
