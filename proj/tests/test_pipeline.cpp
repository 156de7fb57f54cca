#include "flowsense/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace flowsense;

namespace {

std::string data_path(const std::string& rel) {
  return std::string(FLOWSENSE_DATA_DIR) + "/" + rel;
}

ScenarioConfig toy_config(const std::string& out_dir, int trials = 24) {
  ScenarioConfig c;
  c.net_path = data_path("toy/toy_net.tntp");
  c.trips_path = data_path("toy/toy_trips.tntp");
  c.nodes_path = data_path("toy/toy_node.tntp");
  c.routes_per_od = 2;
  c.partition_file = data_path("toy/toy_partition.csv");
  c.mean_scale = 30.0;
  c.rel_std = 0.1;
  c.ambient_rho = 0.5;
  c.cluster_restarts = 16;
  c.n_c_max = 3;
  c.budgets = {1.0, 2.0, 4.0};
  c.trials = trials;
  c.seed = 7;
  c.solver_tol = 1e-9;
  c.out_dir = out_dir;
  return c;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct MeanCosts {
  std::map<std::pair<double, std::string>, double> sum;
  std::map<std::pair<double, std::string>, int> n;
  double mean(double budget, const std::string& arm) const {
    return sum.at({budget, arm}) / n.at({budget, arm});
  }
};

MeanCosts read_mean_costs(const std::string& results_csv) {
  MeanCosts mc;
  std::ifstream in(results_csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::vector<std::string> f;
    std::string field;
    while (std::getline(row, field, ',')) f.push_back(field);
    mc.sum[{std::stod(f[0]), f[2]}] += std::stod(f[5]);
    mc.n[{std::stod(f[0]), f[2]}] += 1;
  }
  return mc;
}

}  // namespace

TEST(EvaluateTrueCost, ZeroFlowCostsNothing) {
  const Network net = testutil::make_diamond();
  EXPECT_DOUBLE_EQ(
      evaluate_true_cost(net, {0, 0, 0, 0}, {1, 1, 1, 1}), 0.0);
}

TEST(EvaluateTrueCost, SingleLinkArithmetic) {
  Network net = testutil::make_parallel({{0, 0, 1, 1.0, 1.0, 1.0}}, 1.0);
  // y=1, f=0, b=1, w=1, c=1 -> 1 * (1 + 1) = 2
  EXPECT_DOUBLE_EQ(evaluate_true_cost(net, {1.0}, {0.0}), 2.0);
}

TEST(EvaluateTrueCost, MatchesSolverObjectiveAtKnownFlow) {
  const Network net = testutil::make_diamond();
  const std::vector<double> f = {1.0, 2.0, 0.5, 0.25};
  const auto sol = system_optimal(net, f, 1e-10);
  EXPECT_NEAR(evaluate_true_cost(net, sol.y, f), sol.objective,
              1e-9 * (1.0 + sol.objective));
}

TEST(EvaluateTrueCost, NeverBelowFreeFlowCost) {
  const Network net = testutil::make_diamond();
  const auto sol = system_optimal(net, {3, 3, 3, 3});
  double free_flow = 0.0;
  for (std::size_t j = 0; j < sol.y.size(); ++j)
    free_flow += sol.y[j] * net.links[j].b;
  EXPECT_GE(evaluate_true_cost(net, sol.y, {3, 3, 3, 3}), free_flow);
}

TEST(RandomBaseline, ZeroBudgetSelectsNothing) {
  Partition p;
  p.groups = {{0}, {1}};
  p.group_costs = {1.0, 1.0};
  RngStream rng(1, {2});
  const auto alloc = random_allocation_baseline(p, p.group_costs, 0.0, rng);
  EXPECT_EQ(alloc.x, (std::vector<int>{0, 0}));
  EXPECT_DOUBLE_EQ(alloc.cost, 0.0);
}

TEST(RandomBaseline, FullBudgetSelectsEverything) {
  Partition p;
  p.groups = {{0}, {1}, {2}};
  p.group_costs = {1.0, 2.0, 3.0};
  RngStream rng(1, {3});
  const auto alloc = random_allocation_baseline(p, p.group_costs, 6.0, rng);
  EXPECT_EQ(alloc.x, (std::vector<int>{1, 1, 1}));
}

TEST(RandomBaseline, FixedSeedReproduces) {
  Partition p;
  p.groups = {{0}, {1}, {2}, {3}};
  p.group_costs = {1.0, 1.0, 1.0, 1.0};
  RngStream a(9, {1}), b(9, {1});
  EXPECT_EQ(random_allocation_baseline(p, p.group_costs, 2.0, a).x,
            random_allocation_baseline(p, p.group_costs, 2.0, b).x);
}

TEST(RandomBaseline, MaximalFeasibleSubset) {
  Partition p;
  p.groups = {{0}, {1}, {2}};
  p.group_costs = {1.0, 2.0, 1.0};
  for (std::uint64_t s = 0; s < 16; ++s) {
    RngStream rng(s, {4});
    const auto alloc = random_allocation_baseline(p, p.group_costs, 2.0, rng);
    // no unselected group still fits within the leftover budget
    double leftover = 2.0 - alloc.cost;
    for (std::size_t j = 0; j < p.groups.size(); ++j)
      if (!alloc.x[j]) EXPECT_LT(leftover, p.group_costs[j]);
  }
}

TEST(Pipeline, ToyScenarioEndToEnd) {
  const std::string out = (std::filesystem::temp_directory_path() /
                           "flowsense_toy_pipeline").string();
  std::filesystem::remove_all(out);
  ScenarioConfig c = toy_config(out);
  std::ostringstream log;
  run_pipeline(c, 1, log);

  for (const char* name :
       {"network.json", "routes.json", "attacks.json", "best_responses.json",
        "clusters.json", "diffmatrix.json", "diffmatrix.csv",
        "allocations.json", "results.csv", "report.csv", "manifest.json"}) {
    EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(out) / name))
        << name;
  }

  // three distinct best responses -> three singleton clusters
  const json clusters = load_json(out + "/clusters.json");
  EXPECT_EQ(clusters.at("model").at("n_c").get<int>(), 3);
  EXPECT_EQ(clusters.at("pairs").at("cross").size(), 3u);

  // the budget-2 optimum is the unique pair of cheap informative groups
  const json allocations = load_json(out + "/allocations.json");
  EXPECT_EQ(allocations.at(1).at("allocation").at("x"),
            json(std::vector<int>{1, 1, 0}));
  EXPECT_GT(allocations.at(1).at("allocation").at("alpha").get<double>(), 0.0);

  const MeanCosts mc = read_mean_costs(out + "/results.csv");
  // informed sensing beats the random baseline at the binding budget
  EXPECT_LT(mc.mean(2.0, "optimized"), mc.mean(2.0, "random"));
  // full budget: both arms observe everything informative
  EXPECT_NEAR(mc.mean(4.0, "optimized"), mc.mean(4.0, "random"),
              1e-6 * mc.mean(4.0, "optimized"));
}

TEST(Pipeline, RerunIsByteIdentical) {
  const std::string out = (std::filesystem::temp_directory_path() /
                           "flowsense_toy_rerun").string();
  std::filesystem::remove_all(out);
  ScenarioConfig c = toy_config(out, 6);
  std::ostringstream log;
  run_pipeline(c, 1, log);
  std::map<std::string, std::string> first;
  for (const auto& entry : std::filesystem::directory_iterator(out))
    first[entry.path().filename().string()] = slurp(entry.path().string());
  run_pipeline(c, 1, log);
  for (const auto& [name, bytes] : first)
    EXPECT_EQ(bytes, slurp(out + "/" + name)) << name;
}

TEST(Pipeline, JobsDoNotChangeResults) {
  const std::string out1 = (std::filesystem::temp_directory_path() /
                            "flowsense_toy_jobs1").string();
  const std::string out2 = (std::filesystem::temp_directory_path() /
                            "flowsense_toy_jobs2").string();
  std::filesystem::remove_all(out1);
  std::filesystem::remove_all(out2);
  std::ostringstream log;
  ScenarioConfig c1 = toy_config(out1, 6);
  run_pipeline(c1, 1, log);
  ScenarioConfig c2 = toy_config(out2, 6);
  run_pipeline(c2, 2, log);
  EXPECT_EQ(slurp(out1 + "/results.csv"), slurp(out2 + "/results.csv"));
}

TEST(Pipeline, StagesAreIndependentlyRerunnable) {
  const std::string out = (std::filesystem::temp_directory_path() /
                           "flowsense_toy_stages").string();
  std::filesystem::remove_all(out);
  ScenarioConfig c = toy_config(out, 4);
  std::ostringstream log;
  run_pipeline(c, 1, log);
  const std::string before = slurp(out + "/allocations.json");
  stage_allocate(c, log);  // re-run one stage off the existing artifacts
  EXPECT_EQ(before, slurp(out + "/allocations.json"));
}

TEST(Pipeline, StageFailuresNameTheStage) {
  ScenarioConfig c = toy_config((std::filesystem::temp_directory_path() /
                                 "flowsense_toy_badnet").string());
  c.net_path = data_path("toy/does_not_exist.tntp");
  std::ostringstream log;
  try {
    run_pipeline(c, 1, log);
    FAIL() << "expected a stage-tagged failure";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("stage ingest"), std::string::npos);
  }
}

TEST(Pipeline, ConfigValidationCatchesBadInput) {
  ScenarioConfig c;
  EXPECT_THROW(c.validate(), ValidationError);
  c = toy_config("/tmp/x");
  c.budgets.clear();
  EXPECT_THROW(c.validate(), ValidationError);
  c = toy_config("/tmp/x");
  c.trials = 0;
  EXPECT_THROW(c.validate(), ValidationError);
}
