#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "subdivlab/io.hpp"
#include "subdivlab/oracle.hpp"

using namespace subdivlab;

int main(int argc, char** argv) {
  CLI::App app{"Subdivision-rule tilings and invariants for right-angled Artin groups"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  RunConfig cfg;
  std::string exports = "reports";
  double time_limit = 0;
  auto* run_cmd = app.add_subcommand("run", "Build tilings, extract the rule and compute invariants");
  run_cmd->add_option("input", cfg.input, "Defining graph JSON, or cube complex JSON in special mode")
      ->required()
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--mode", cfg.mode, "raag or special")
      ->check(CLI::IsMember({"raag", "special"}))
      ->capture_default_str();
  run_cmd->add_option("--levels,-N", cfg.levels, "Ball depth; tilings cover levels 0..N-1")
      ->check(CLI::Range(1, 64))
      ->capture_default_str();
  run_cmd->add_flag("--coalesce", cfg.coalesce, "Merge clique labels under graph automorphisms");
  run_cmd->add_option("--export", exports, "Comma list of tilings,dot,svg,reports")
      ->capture_default_str();
  run_cmd->add_option("--cap", cfg.element_cap, "Element limit for the ball")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  run_cmd->add_option("--time-limit", time_limit, "Seconds allowed for ball building")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--ends-window", cfg.ends_window, "Levels of stable component counts")
      ->check(CLI::Range(1, 64))
      ->capture_default_str();
  run_cmd->add_option("--cone-depth", cfg.cone_depth, "Depth of cone-type signatures")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  run_cmd->add_option("--seed", cfg.layout_seed, "Layout seed for SVG export")->capture_default_str();
  run_cmd->add_flag("--strict-cubes", cfg.strict_cubes, "Require declared 3-cubes in special mode");
  run_cmd->add_flag("!--no-cache", cfg.use_cache, "Do not read or write ball level caches");
  run_cmd->add_option("--out", cfg.out_dir, "Output directory")->capture_default_str();

  std::filesystem::path oracle_input;
  int oracle_levels = 3;
  auto* oracle_cmd = app.add_subcommand("oracle", "Print sphere sizes from brute-force enumeration only");
  oracle_cmd->add_option("input", oracle_input, "Defining graph JSON")->required()->check(CLI::ExistingFile);
  oracle_cmd->add_option("--levels,-N", oracle_levels, "Largest sphere radius")
      ->check(CLI::Range(0, 64))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitParse;
  }

  if (*run_cmd) {
    cfg.exports.clear();
    std::stringstream ss(exports);
    for (std::string item; std::getline(ss, item, ',');) {
      if (item.empty()) continue;
      if (item != "tilings" && item != "dot" && item != "svg" && item != "reports") {
        std::cerr << "error: unknown export \"" << item << "\"\n";
        return kExitParse;
      }
      cfg.exports.insert(item);
    }
    if (time_limit > 0) cfg.time_limit_seconds = time_limit;
    return run(cfg, std::cout);
  }

  try {
    auto g = DefiningGraph::load(oracle_input);
    auto sizes = oracle::sphere_sizes(g, oracle_levels);
    for (std::size_t n = 0; n < sizes.size(); ++n) std::cout << n << " " << sizes[n] << "\n";
    return kExitOk;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}
