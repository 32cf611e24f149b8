#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "mmpmbm/config.hpp"
#include "mmpmbm/errors.hpp"
#include "mmpmbm/report.hpp"

namespace {

using namespace mmpmbm;

std::vector<double> table_pd_columns() {
  return {0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95};
}

int run(int argc, char** argv) {
  CLI::App app{"Multiple-model PMBM filter: simulation campaigns and sweeps"};

  std::string config_path;
  std::string mode;
  std::string out_dir;
  std::int64_t seed = -1;
  int runs = -1;
  app.add_option("--config", config_path, "Config file (defaults: bundled scenario)");
  app.add_option("--mode", mode,
                 "single | sweep-pd | sweep-noise | validate-config");
  app.add_option("--seed", seed, "RNG seed override");
  app.add_option("--runs", runs, "Monte Carlo runs override");
  app.add_option("--out", out_dir, "Output directory override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) {
      cfg = load_run_config(config_path);
    } else {
      cfg.scenario = default_scenario();
    }
    if (!mode.empty()) cfg.mode = mode;
    if (seed >= 0) cfg.scenario.rng_seed = static_cast<std::uint64_t>(seed);
    if (runs >= 1) cfg.scenario.num_runs = runs;
    if (!out_dir.empty()) cfg.out_dir = out_dir;

    if (cfg.mode == "sweep-pd") {
      cfg.scenario.pd_sweep = table_pd_columns();
      cfg.scenario.sigma_sweep.resize(1);
    } else if (cfg.mode == "sweep-noise") {
      cfg.scenario.sigma_sweep = {5.0, 10.0, 15.0, 20.0, 25.0};
      cfg.scenario.pd_sweep.resize(1);
    } else if (cfg.mode != "single" && cfg.mode != "validate-config") {
      throw ConfigError("unknown mode: " + cfg.mode);
    }
    validate_run_config(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  if (cfg.mode == "validate-config") {
    std::cout << "config OK\n" << run_config_to_text(cfg);
    return 0;
  }

  if (const char* env = std::getenv("MMPMBM_THREADS")) {
    cfg.campaign.threads = std::max(1, std::atoi(env));
  }

  const CampaignResult result = run_monte_carlo(cfg.scenario, cfg.campaign);

  std::filesystem::create_directories(cfg.out_dir);
  const auto path = [&](const char* name) { return cfg.out_dir + "/" + name; };
  if (cfg.write_csv) write_records_csv(result, path("records.csv"));
  if (cfg.write_json) write_summary_json(result, path("summary.json"));
  if (cfg.write_svg) {
    write_ospa_svg(result, path("ospa.svg"));
    write_cardinality_svg(result, path("cardinality.svg"));
  }

  print_summary_table(result, std::cout);
  std::cout << "wall time: " << result.wall_seconds << " s\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
