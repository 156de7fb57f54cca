// Command-line driver for the sensing-allocation pipeline. Stages are
// independently re-runnable: each consumes the artifacts the previous
// stage left in the output directory.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "flowsense/flowsense.hpp"

namespace {

const char* kStages[] = {"ingest", "routes",    "attacks", "best-responses",
                         "cluster", "diffmatrix", "allocate", "simulate",
                         "report",  "all"};

int run_stage(const flowsense::ScenarioConfig& config, const std::string& stage,
              int jobs) {
  using namespace flowsense;
  if (stage == "all") {
    run_pipeline(config, jobs, std::cout);
    return 0;
  }
  config.validate();
  if (stage == "ingest")
    stage_ingest(config, std::cout);
  else if (stage == "routes")
    stage_routes(config, std::cout);
  else if (stage == "attacks")
    stage_attacks(config, std::cout);
  else if (stage == "best-responses")
    stage_best_responses(config, std::cout);
  else if (stage == "cluster")
    stage_cluster(config, std::cout);
  else if (stage == "diffmatrix")
    stage_diffmatrix(config, std::cout);
  else if (stage == "allocate")
    stage_allocate(config, std::cout);
  else if (stage == "simulate")
    stage_simulate(config, jobs, std::cout);
  else if (stage == "report")
    stage_report(config, std::cout);
  else
    return 64;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sensing resource allocation for traffic routing under "
               "data-poisoning attacks"};

  std::string config_path;
  std::string stage = "all";
  std::string out_dir;
  std::uint64_t seed_override = 0;
  int jobs = 1;

  app.add_option("--config", config_path, "Scenario config file (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--stage", stage, "Pipeline stage to run")
      ->check(CLI::IsMember(std::vector<std::string>(std::begin(kStages),
                                                     std::end(kStages))));
  app.add_option("--out", out_dir, "Output directory (overrides config)");
  auto* seed_opt =
      app.add_option("--seed", seed_override, "Master seed (overrides config)");
  app.add_option("--jobs", jobs, "Concurrent simulation workers")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    flowsense::ScenarioConfig config = flowsense::ScenarioConfig::load(config_path);
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (seed_opt->count() > 0) config.seed = seed_override;
    return run_stage(config, stage, jobs);
  } catch (const std::exception& e) {
    std::cerr << "[" << stage << "] error: " << e.what() << "\n";
    return 1;
  }
}
