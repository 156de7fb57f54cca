#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "flowsense/allocate.hpp"
#include "flowsense/attack.hpp"
#include "flowsense/cluster.hpp"
#include "flowsense/errors.hpp"
#include "flowsense/network.hpp"
#include "flowsense/partition.hpp"
#include "flowsense/posterior.hpp"
#include "flowsense/routes.hpp"
#include "flowsense/serialize.hpp"
#include "flowsense/solver.hpp"
#include "flowsense/tntp.hpp"

namespace flowsense {

/// Everything the end-to-end experiment needs: input files, route and
/// attack parameters, clustering controls, the budget sweep and the
/// trial/seed plan.
struct ScenarioConfig {
  std::string net_path, trips_path, nodes_path;  // nodes_path may be empty
  int routes_per_od = 4;
  std::vector<std::pair<int, int>> od_filter;  // 1-based node ids; empty keeps all

  std::string partition_file;  // either a mapping file ...
  int synth_groups = 0;        // ... or a synthetic group count

  double mean_scale = 30.0;  // attack mean = mean_scale * capacity on zone links
  double rel_std = 0.1;      // attack std dev = rel_std * capacity on all links
  double ambient_rho = 0.5;  // ground-truth ambient flow = rho * capacity

  double cluster_epsilon = 0.0;  // <= 0 picks 1% of total demand
  int n_c_max = 0;               // 0 means the number of attack types
  int cluster_restarts = 32;

  std::vector<double> budgets;
  int trials = 8;
  std::uint64_t seed = 1;
  double solver_tol = 1e-8;
  int solver_max_iter = 10000;
  std::string out_dir;

  void validate() const {
    if (net_path.empty() || trips_path.empty())
      throw ValidationError("config: network net/trips paths are required");
    if (routes_per_od < 1) throw ValidationError("config: routes_per_od must be >= 1");
    if (partition_file.empty() && synth_groups < 1)
      throw ValidationError("config: either partition.file or partition.synth_groups is required");
    if (mean_scale <= 0.0 || rel_std <= 0.0)
      throw ValidationError("config: attack scales must be > 0");
    if (ambient_rho <= 0.0) throw ValidationError("config: ambient_rho must be > 0");
    if (budgets.empty()) throw ValidationError("config: budget list must be nonempty");
    for (double g : budgets)
      if (g < 0.0) throw ValidationError("config: budgets must be >= 0");
    if (trials < 1) throw ValidationError("config: trials must be >= 1");
    if (solver_tol <= 0.0) throw ValidationError("config: solver tol must be > 0");
    if (cluster_restarts < 1) throw ValidationError("config: cluster restarts must be >= 1");
    if (out_dir.empty()) throw ValidationError("config: out_dir is required");
  }

  json echo() const {
    json j;
    j["network"] = {{"net", net_path}, {"trips", trips_path}};
    if (!nodes_path.empty()) j["network"]["nodes"] = nodes_path;
    j["routes_per_od"] = routes_per_od;
    if (!od_filter.empty()) j["od_filter"] = od_filter;
    if (!partition_file.empty())
      j["partition"] = {{"file", partition_file}};
    else
      j["partition"] = {{"synth_groups", synth_groups}};
    j["attack"] = {{"mean_scale", mean_scale}, {"rel_std", rel_std}};
    j["ambient_rho"] = ambient_rho;
    j["cluster"] = {{"epsilon", cluster_epsilon},
                    {"n_c_max", n_c_max},
                    {"restarts", cluster_restarts}};
    j["budgets"] = budgets;
    j["trials"] = trials;
    j["seed"] = seed;
    j["solver"] = {{"tol", solver_tol}, {"max_iter", solver_max_iter}};
    j["out_dir"] = out_dir;
    return j;
  }

  /// Loads a config file; relative input paths resolve against the
  /// config file's directory.
  static ScenarioConfig load(const std::string& path) {
    const json j = load_json(path);
    const auto base = std::filesystem::path(path).parent_path();
    auto resolve = [&](const std::string& p) {
      if (p.empty()) return p;
      std::filesystem::path fp(p);
      return fp.is_absolute() ? p : (base / fp).string();
    };

    ScenarioConfig c;
    const json& net = j.at("network");
    c.net_path = resolve(net.at("net").get<std::string>());
    c.trips_path = resolve(net.at("trips").get<std::string>());
    if (net.contains("nodes")) c.nodes_path = resolve(net.at("nodes").get<std::string>());
    if (j.contains("routes_per_od")) j.at("routes_per_od").get_to(c.routes_per_od);
    if (j.contains("od_filter")) j.at("od_filter").get_to(c.od_filter);
    const json& part = j.at("partition");
    if (part.contains("file")) c.partition_file = resolve(part.at("file").get<std::string>());
    if (part.contains("synth_groups")) part.at("synth_groups").get_to(c.synth_groups);
    if (j.contains("attack")) {
      if (j.at("attack").contains("mean_scale")) j.at("attack").at("mean_scale").get_to(c.mean_scale);
      if (j.at("attack").contains("rel_std")) j.at("attack").at("rel_std").get_to(c.rel_std);
    }
    if (j.contains("ambient_rho")) j.at("ambient_rho").get_to(c.ambient_rho);
    if (j.contains("cluster")) {
      const json& cl = j.at("cluster");
      if (cl.contains("epsilon")) cl.at("epsilon").get_to(c.cluster_epsilon);
      if (cl.contains("n_c_max")) cl.at("n_c_max").get_to(c.n_c_max);
      if (cl.contains("restarts")) cl.at("restarts").get_to(c.cluster_restarts);
    }
    j.at("budgets").get_to(c.budgets);
    if (j.contains("trials")) j.at("trials").get_to(c.trials);
    if (j.contains("seed")) j.at("seed").get_to(c.seed);
    if (j.contains("solver")) {
      const json& s = j.at("solver");
      if (s.contains("tol")) s.at("tol").get_to(c.solver_tol);
      if (s.contains("max_iter")) s.at("max_iter").get_to(c.solver_max_iter);
    }
    if (j.contains("out_dir")) c.out_dir = resolve(j.at("out_dir").get<std::string>());
    return c;
  }
};

/// Ground-truth total cost sum_j y_j * phi_j(f_j + y_j) of a link-flow
/// assignment against the realized ambient flow.
inline double evaluate_true_cost(const Network& net, const std::vector<double>& y,
                                 const std::vector<double>& f_true) {
  if (y.size() != net.links.size() || f_true.size() != net.links.size())
    throw ValidationError("evaluate_true_cost: dimension mismatch");
  double total = 0.0;
  for (std::size_t j = 0; j < net.links.size(); ++j) {
    const Link& l = net.links[j];
    const double r = (f_true[j] + y[j]) / l.c;
    const double r2 = r * r;
    total += y[j] * (l.b + l.w * r2 * r2);
  }
  return total;
}

/// Uniformly random maximal feasible subset: shuffle the groups, then
/// greedily add every group the remaining budget affords. Fills the
/// divergence fields from M when provided.
inline Allocation random_allocation_baseline(const Partition& partition,
                                             const std::vector<double>& q,
                                             double gamma, RngStream& rng,
                                             const DifferenceMatrix* M = nullptr) {
  if (q.size() != partition.groups.size())
    throw ValidationError("random_allocation_baseline: cost vector size mismatch");
  std::vector<int> order(partition.groups.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::shuffle(order.begin(), order.end(), rng.engine());

  Allocation alloc;
  alloc.x.assign(partition.groups.size(), 0);
  double budget = gamma;
  for (int j : order) {
    if (q[j] <= budget) {
      alloc.x[j] = 1;
      budget -= q[j];
      alloc.cost += q[j];
    }
  }
  if (M) {
    alloc.u.assign(M->n_pairs(), 0.0);
    for (int j = 0; j < M->n_groups; ++j)
      if (alloc.x[j])
        for (int i = 0; i < M->n_pairs(); ++i) alloc.u[i] += M->m[i][j];
    alloc.alpha = alloc.u.empty() ? 0.0 : *std::min_element(alloc.u.begin(), alloc.u.end());
    alloc.avg = alloc.u.empty() ? 0.0
                                : std::accumulate(alloc.u.begin(), alloc.u.end(), 0.0) /
                                      static_cast<double>(alloc.u.size());
  }
  return alloc;
}

/// One simulated routing outcome (one arm of one trial).
struct EvaluationRecord {
  double budget = 0.0;
  int attack_type = 0;
  std::string arm;  // "optimized" or "random"
  int trial = 0;
  double objective = 0.0;  // optimal value of the post-sensing program
  double true_cost = 0.0;  // realized ground-truth cost of the solved flow
  double alpha = 0.0;      // max-min divergence of the arm's allocation
  std::vector<int> selected;
};

namespace pipeline_detail {

inline std::string artifact(const ScenarioConfig& c, const std::string& name) {
  return (std::filesystem::path(c.out_dir) / name).string();
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

inline void mark_stage(const ScenarioConfig& c, const std::string& stage) {
  const std::string path = artifact(c, "manifest.json");
  json m;
  if (std::filesystem::exists(path)) m = load_json(path);
  m["config"] = c.echo();
  char hex[32];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(fnv1a(c.echo().dump())));
  m["config_hash"] = std::string(hex);
  m["seed"] = c.seed;
  m["stages"][stage] = {{"version", 1}};
  save_json(path, m);
}

inline Network load_network_with_routes(const ScenarioConfig& c) {
  Network net = load_json(artifact(c, "network.json")).get<Network>();
  const json r = load_json(artifact(c, "routes.json"));
  r.at("routes").get_to(net.routes);
  r.at("od_of_route").get_to(net.od_of_route);
  net.validate();
  return net;
}

inline std::vector<double> ambient_flow(const ScenarioConfig& c, const Network& net) {
  std::vector<double> f(net.links.size());
  for (std::size_t j = 0; j < f.size(); ++j) f[j] = c.ambient_rho * net.links[j].c;
  return f;
}

// RNG stream tags
constexpr std::uint64_t kAttackDraw = 0xA11ACC;
constexpr std::uint64_t kRandomAlloc = 0x5A4D;

}  // namespace pipeline_detail

inline void stage_ingest(const ScenarioConfig& c, std::ostream& log) {
  std::ifstream net_file(c.net_path), trips_file(c.trips_path);
  if (!net_file) throw ValidationError("cannot open " + c.net_path);
  if (!trips_file) throw ValidationError("cannot open " + c.trips_path);
  Network net = parse_tntp(net_file, trips_file);
  if (!c.nodes_path.empty()) {
    std::ifstream node_file(c.nodes_path);
    if (!node_file) throw ValidationError("cannot open " + c.nodes_path);
    parse_tntp_nodes(node_file, net);
  }
  if (!c.od_filter.empty()) {
    std::vector<std::pair<int, int>> pairs;
    std::vector<double> demand;
    for (auto [o, d] : c.od_filter) {
      bool found = false;
      for (int i = 0; i < net.num_od(); ++i) {
        if (net.od_pairs[i] == std::make_pair(o - 1, d - 1)) {
          pairs.push_back(net.od_pairs[i]);
          demand.push_back(net.demand[i]);
          found = true;
          break;
        }
      }
      if (!found)
        throw ValidationError("od_filter pair (" + std::to_string(o) + ", " +
                              std::to_string(d) + ") has no positive demand");
    }
    net.od_pairs = std::move(pairs);
    net.demand = std::move(demand);
  }
  std::filesystem::create_directories(c.out_dir);
  save_json(pipeline_detail::artifact(c, "network.json"), json(net));
  pipeline_detail::mark_stage(c, "ingest");
  log << "[ingest] " << net.num_nodes << " nodes, " << net.num_links()
      << " links, " << net.num_od() << " OD pairs\n";
}

inline void stage_routes(const ScenarioConfig& c, std::ostream& log) {
  Network net = load_json(pipeline_detail::artifact(c, "network.json")).get<Network>();
  const RouteGenResult res = generate_routes(net, c.routes_per_od);
  json j{{"routes", net.routes},
         {"od_of_route", net.od_of_route},
         {"shortfall_warnings", res.shortfall_warnings}};
  save_json(pipeline_detail::artifact(c, "routes.json"), j);
  pipeline_detail::mark_stage(c, "routes");
  log << "[routes] " << net.num_routes() << " routes for " << net.num_od()
      << " OD pairs";
  if (res.shortfall_warnings > 0)
    log << " (warning: " << res.shortfall_warnings << " OD pairs short of k)";
  log << "\n";
}

inline void stage_attacks(const ScenarioConfig& c, std::ostream& log) {
  const Network net = load_json(pipeline_detail::artifact(c, "network.json")).get<Network>();
  Partition partition;
  if (!c.partition_file.empty()) {
    std::ifstream in(c.partition_file);
    if (!in) throw ValidationError("cannot open " + c.partition_file);
    partition = load_partition(in, net);
  } else {
    partition = synth_partition(net, c.synth_groups, c.seed);
  }
  const auto types =
      make_zone_attack_types(partition, net.capacities(), c.mean_scale, c.rel_std);
  json j{{"partition", partition}, {"types", types}};
  save_json(pipeline_detail::artifact(c, "attacks.json"), j);
  pipeline_detail::mark_stage(c, "attacks");
  log << "[attacks] " << types.size() << " zone attack types over "
      << partition.num_groups() << " subnetworks";
  if (!partition.unsensed.empty())
    log << " (warning: " << partition.unsensed.size() << " unsensed links)";
  log << "\n";
}

/// Best responses are hypothesis objects computed before any attack is
/// realized, so they share one attack-agnostic proxy for the attacked
/// flow: f_hat = f + mean over types of mu. Each type then interprets
/// that same f_hat through its own (mu, sigma).
inline void stage_best_responses(const ScenarioConfig& c, std::ostream& log) {
  const Network net = pipeline_detail::load_network_with_routes(c);
  const json attacks = load_json(pipeline_detail::artifact(c, "attacks.json"));
  const auto types = attacks.at("types").get<std::vector<AttackType>>();

  const std::vector<double> f = pipeline_detail::ambient_flow(c, net);
  std::vector<double> f_hat = f;
  for (const AttackType& t : types)
    for (std::size_t j = 0; j < f_hat.size(); ++j)
      f_hat[j] += t.mu[j] / static_cast<double>(types.size());

  int feasibility_warnings = 0;
  json flows = json::array();
  for (const AttackType& t : types) {
    feasibility_warnings += feasibility_violations(t, f_hat) > 0 ? 1 : 0;
    const RoutingSolution sol =
        best_response_flow(net, t, f_hat, c.solver_tol, c.solver_max_iter);
    flows.push_back(json{{"type", t.id},
                         {"z", sol.z},
                         {"objective", sol.objective},
                         {"gap", sol.gap},
                         {"iterations", sol.iterations}});
  }
  json j{{"f_ambient", f},
         {"f_hat", f_hat},
         {"flows", std::move(flows)},
         {"assumption1_warnings", feasibility_warnings}};
  save_json(pipeline_detail::artifact(c, "best_responses.json"), j);
  pipeline_detail::mark_stage(c, "best-responses");
  log << "[best-responses] " << types.size() << " best-response flows";
  if (feasibility_warnings > 0)
    log << " (warning: " << feasibility_warnings
        << " types exceed the observed flow somewhere; means clamped)";
  log << "\n";
}

inline void stage_cluster(const ScenarioConfig& c, std::ostream& log) {
  const Network net = pipeline_detail::load_network_with_routes(c);
  const json br = load_json(pipeline_detail::artifact(c, "best_responses.json"));
  std::vector<std::vector<double>> flows;
  for (const auto& f : br.at("flows")) flows.push_back(f.at("z").get<std::vector<double>>());

  double epsilon = c.cluster_epsilon;
  if (epsilon <= 0.0) {
    double total_demand = 0.0;
    for (double d : net.demand) total_demand += d;
    epsilon = 0.01 * total_demand;
  }
  const int n_c_max = c.n_c_max > 0 ? c.n_c_max : static_cast<int>(flows.size());
  const ClusterModel model =
      choose_n_c(flows, epsilon, n_c_max, c.cluster_restarts, c.seed);
  const PairSets pairs = pair_sets(model, static_cast<int>(flows.size()));
  json j{{"model", model}, {"pairs", pairs}};
  save_json(pipeline_detail::artifact(c, "clusters.json"), j);
  pipeline_detail::mark_stage(c, "cluster");
  log << "[cluster] n_c = " << model.n_c << ", |P| = " << pairs.cross.size()
      << ", |Q| = " << pairs.same.size() << ", epsilon = " << epsilon << "\n";
}

inline void stage_diffmatrix(const ScenarioConfig& c, std::ostream& log) {
  const json attacks = load_json(pipeline_detail::artifact(c, "attacks.json"));
  const auto types = attacks.at("types").get<std::vector<AttackType>>();
  const auto partition = attacks.at("partition").get<Partition>();
  const json clusters = load_json(pipeline_detail::artifact(c, "clusters.json"));
  const auto pairs = clusters.at("pairs").get<PairSets>();

  const DifferenceMatrix M = difference_matrix(types, partition, pairs.cross);
  json j{{"pair_index", M.pair_index},
         {"m", M.m},
         {"n_groups", M.n_groups},
         {"zero_variance_drops", M.zero_variance_drops}};
  save_json(pipeline_detail::artifact(c, "diffmatrix.json"), j);
  write_difference_matrix_csv(pipeline_detail::artifact(c, "diffmatrix.csv"), M);
  pipeline_detail::mark_stage(c, "diffmatrix");
  log << "[diffmatrix] " << M.n_pairs() << " pairs x " << M.n_groups << " groups";
  if (M.zero_variance_drops > 0)
    log << " (warning: " << M.zero_variance_drops
        << " zero-variance coordinates dropped by the pseudoinverse)";
  log << "\n";
}

inline DifferenceMatrix load_difference_matrix(const ScenarioConfig& c) {
  const json j = load_json(pipeline_detail::artifact(c, "diffmatrix.json"));
  DifferenceMatrix M;
  j.at("pair_index").get_to(M.pair_index);
  j.at("m").get_to(M.m);
  j.at("n_groups").get_to(M.n_groups);
  j.at("zero_variance_drops").get_to(M.zero_variance_drops);
  return M;
}

inline void stage_allocate(const ScenarioConfig& c, std::ostream& log) {
  const json attacks = load_json(pipeline_detail::artifact(c, "attacks.json"));
  const auto partition = attacks.at("partition").get<Partition>();
  const DifferenceMatrix M = load_difference_matrix(c);

  json out = json::array();
  for (double gamma : c.budgets) {
    Allocation alloc;
    if (gamma > 0.0) {
      alloc = solve_lexicographic(M, partition.group_costs, gamma);
    } else {
      alloc.x.assign(partition.groups.size(), 0);  // gamma = 0 baseline
      alloc.u.assign(M.n_pairs(), 0.0);
    }
    int selected = 0;
    for (int xj : alloc.x) selected += xj;
    log << "[allocate] gamma = " << gamma << ": " << selected
        << " subnetworks, alpha = " << alloc.alpha << ", avg = " << alloc.avg << "\n";
    out.push_back(json{{"gamma", gamma}, {"allocation", alloc}});
  }
  save_json(pipeline_detail::artifact(c, "allocations.json"), out);
  pipeline_detail::mark_stage(c, "allocate");
}

inline void write_records_csv(const std::string& path,
                              const std::vector<EvaluationRecord>& records) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << "budget,type,arm,trial,objective,true_cost,alpha,selected_count,selected\n";
  for (const EvaluationRecord& r : records) {
    out << fmt_double(r.budget) << "," << r.attack_type << "," << r.arm << ","
        << r.trial << "," << fmt_double(r.objective) << ","
        << fmt_double(r.true_cost) << "," << fmt_double(r.alpha) << ","
        << r.selected.size() << ",";
    for (std::size_t i = 0; i < r.selected.size(); ++i)
      out << (i ? ";" : "") << r.selected[i];
    out << "\n";
  }
}

/// Per (budget, type, trial): sample a ground-truth attack, observe it
/// on each arm's sensed links, weight the hypotheses and route. Both
/// arms face the same sampled attack, and attack draws are keyed by
/// (type, trial) only, so comparisons are paired across budgets too.
inline std::vector<EvaluationRecord> simulate_records(const ScenarioConfig& c,
                                                      int jobs) {
  const Network net = pipeline_detail::load_network_with_routes(c);
  const json attacks = load_json(pipeline_detail::artifact(c, "attacks.json"));
  const auto types = attacks.at("types").get<std::vector<AttackType>>();
  const auto partition = attacks.at("partition").get<Partition>();
  const DifferenceMatrix M = load_difference_matrix(c);
  const json allocations = load_json(pipeline_detail::artifact(c, "allocations.json"));
  const std::vector<double> f_true = pipeline_detail::ambient_flow(c, net);

  std::vector<Allocation> optimized;
  for (const auto& entry : allocations) optimized.push_back(entry.at("allocation").get<Allocation>());
  if (optimized.size() != c.budgets.size())
    throw ValidationError("simulate: allocations.json does not match the budget list");

  const int n_a = static_cast<int>(types.size());
  const int n_b = static_cast<int>(c.budgets.size());
  const std::size_t cells = static_cast<std::size_t>(n_b) * n_a * c.trials;
  std::vector<EvaluationRecord> records(cells * 2);

  auto run_cell = [&](std::size_t cell) {
    const int bi = static_cast<int>(cell / (static_cast<std::size_t>(n_a) * c.trials));
    const int rem = static_cast<int>(cell % (static_cast<std::size_t>(n_a) * c.trials));
    const int ti = rem / c.trials;
    const int trial = rem % c.trials;
    const double gamma = c.budgets[bi];

    RngStream attack_rng(c.seed, {pipeline_detail::kAttackDraw,
                                  static_cast<std::uint64_t>(ti),
                                  static_cast<std::uint64_t>(trial)});
    const std::vector<double> a = sample_attack(types[ti], attack_rng);
    std::vector<double> f_hat(f_true.size());
    for (std::size_t j = 0; j < f_hat.size(); ++j) f_hat[j] = f_true[j] + a[j];

    RngStream alloc_rng(c.seed, {pipeline_detail::kRandomAlloc,
                                 static_cast<std::uint64_t>(bi),
                                 static_cast<std::uint64_t>(ti),
                                 static_cast<std::uint64_t>(trial)});
    const Allocation random_alloc = random_allocation_baseline(
        partition, partition.group_costs, gamma, alloc_rng, &M);

    const Allocation* arms[2] = {&optimized[bi], &random_alloc};
    const char* arm_names[2] = {"optimized", "random"};
    for (int arm = 0; arm < 2; ++arm) {
      const Allocation& alloc = *arms[arm];
      Observation obs;
      obs.sensed = sensed_links(alloc, partition);
      obs.o.reserve(obs.sensed.rows.size());
      for (int l : obs.sensed.rows) obs.o.push_back(a[l]);
      const PosteriorWeights w = likelihood_weights(obs, types);
      const RoutingSolution sol = post_sensing_routing(
          net, f_hat, obs, w, types, c.solver_tol, c.solver_max_iter);

      EvaluationRecord r;
      r.budget = gamma;
      r.attack_type = ti;
      r.arm = arm_names[arm];
      r.trial = trial;
      r.objective = sol.objective;
      r.true_cost = evaluate_true_cost(net, sol.y, f_true);
      r.alpha = alloc.alpha;
      for (std::size_t g = 0; g < alloc.x.size(); ++g)
        if (alloc.x[g]) r.selected.push_back(static_cast<int>(g));
      records[cell * 2 + arm] = std::move(r);
    }
  };

  if (jobs <= 1) {
    for (std::size_t cell = 0; cell < cells; ++cell) run_cell(cell);
  } else {
    std::vector<std::thread> workers;
    for (int w = 0; w < jobs; ++w)
      workers.emplace_back([&, w]() {
        for (std::size_t cell = w; cell < cells; cell += jobs) run_cell(cell);
      });
    for (auto& t : workers) t.join();
  }
  return records;
}

inline void stage_simulate(const ScenarioConfig& c, int jobs, std::ostream& log) {
  const auto records = simulate_records(c, jobs);
  write_records_csv(pipeline_detail::artifact(c, "results.csv"), records);
  pipeline_detail::mark_stage(c, "simulate");
  log << "[simulate] " << records.size() << " records ("
      << c.budgets.size() << " budgets x " << records.size() / 2 / c.budgets.size() / c.trials
      << " types x " << c.trials << " trials x 2 arms)\n";
}

/// Aggregates results.csv into per-(budget, arm) means. The
/// mean_objective column is the optimal value of the post-sensing
/// program (the quantity the budget sweep is judged on);
/// mean_true_cost is the realized ground-truth cost.
inline void stage_report(const ScenarioConfig& c, std::ostream& log) {
  std::ifstream in(pipeline_detail::artifact(c, "results.csv"));
  if (!in) throw ValidationError("cannot read results.csv (run simulate first)");
  std::string line;
  std::getline(in, line);  // header

  struct Agg {
    double objective = 0.0, true_cost = 0.0;
    int n = 0;
  };
  std::map<std::pair<double, std::string>, Agg> by_budget_arm;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() < 7) throw ParseError("malformed results row: " + line);
    const double budget = std::stod(fields[0]);
    const std::string& arm = fields[2];
    Agg& agg = by_budget_arm[{budget, arm}];
    agg.objective += std::stod(fields[4]);
    agg.true_cost += std::stod(fields[5]);
    agg.n += 1;
  }

  std::ofstream out(pipeline_detail::artifact(c, "report.csv"));
  out << "budget,arm,samples,mean_objective,mean_true_cost\n";
  for (const auto& [key, agg] : by_budget_arm) {
    out << fmt_double(key.first) << "," << key.second << "," << agg.n << ","
        << fmt_double(agg.objective / agg.n) << ","
        << fmt_double(agg.true_cost / agg.n) << "\n";
    log << "[report] gamma = " << key.first << " " << key.second
        << ": mean objective = " << agg.objective / agg.n
        << ", mean true cost = " << agg.true_cost / agg.n << "\n";
  }
  pipeline_detail::mark_stage(c, "report");
}

/// All stages in order: ingest, routes, attacks, best-responses,
/// cluster, diffmatrix, allocate, simulate, report. A stage failure
/// aborts with the stage name prefixed to the diagnostic.
inline void run_pipeline(const ScenarioConfig& c, int jobs, std::ostream& log) {
  c.validate();
  auto guarded = [&](const char* name, auto&& stage) {
    try {
      stage();
    } catch (const std::exception& e) {
      throw ValidationError("stage " + std::string(name) + ": " + e.what());
    }
  };
  guarded("ingest", [&] { stage_ingest(c, log); });
  guarded("routes", [&] { stage_routes(c, log); });
  guarded("attacks", [&] { stage_attacks(c, log); });
  guarded("best-responses", [&] { stage_best_responses(c, log); });
  guarded("cluster", [&] { stage_cluster(c, log); });
  guarded("diffmatrix", [&] { stage_diffmatrix(c, log); });
  guarded("allocate", [&] { stage_allocate(c, log); });
  guarded("simulate", [&] { stage_simulate(c, jobs, log); });
  guarded("report", [&] { stage_report(c, log); });
}

}  // namespace flowsense
