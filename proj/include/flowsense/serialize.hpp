#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "flowsense/allocate.hpp"
#include "flowsense/attack.hpp"
#include "flowsense/cluster.hpp"
#include "flowsense/errors.hpp"
#include "flowsense/network.hpp"
#include "flowsense/posterior.hpp"
#include "flowsense/solver.hpp"

namespace flowsense {

using json = nlohmann::json;

// ---- network ----

inline void to_json(json& j, const Link& l) {
  j = json{{"tail", l.tail}, {"head", l.head}, {"b", l.b}, {"c", l.c}, {"w", l.w}};
}

inline void from_json(const json& j, Link& l) {
  j.at("tail").get_to(l.tail);
  j.at("head").get_to(l.head);
  j.at("b").get_to(l.b);
  j.at("c").get_to(l.c);
  j.at("w").get_to(l.w);
}

inline void to_json(json& j, const Network& n) {
  j = json{{"num_nodes", n.num_nodes},
           {"first_thru_node", n.first_thru_node},
           {"links", n.links},
           {"od_pairs", n.od_pairs},
           {"demand", n.demand},
           {"routes", n.routes},
           {"od_of_route", n.od_of_route}};
  if (!n.node_x.empty()) {
    j["node_x"] = n.node_x;
    j["node_y"] = n.node_y;
  }
}

inline void from_json(const json& j, Network& n) {
  j.at("num_nodes").get_to(n.num_nodes);
  j.at("first_thru_node").get_to(n.first_thru_node);
  j.at("links").get_to(n.links);
  for (std::size_t i = 0; i < n.links.size(); ++i) n.links[i].id = static_cast<int>(i);
  j.at("od_pairs").get_to(n.od_pairs);
  j.at("demand").get_to(n.demand);
  j.at("routes").get_to(n.routes);
  j.at("od_of_route").get_to(n.od_of_route);
  if (j.contains("node_x")) {
    j.at("node_x").get_to(n.node_x);
    j.at("node_y").get_to(n.node_y);
  } else {
    n.node_x.clear();
    n.node_y.clear();
  }
  n.validate();
}

// ---- partition ----

inline void to_json(json& j, const Partition& p) {
  j = json{{"groups", p.groups},
           {"group_costs", p.group_costs},
           {"unsensed", p.unsensed}};
}

inline void from_json(const json& j, Partition& p) {
  j.at("groups").get_to(p.groups);
  j.at("group_costs").get_to(p.group_costs);
  j.at("unsensed").get_to(p.unsensed);
}

// ---- attack types (sparse mu, dense sigma) ----

inline void to_json(json& j, const AttackType& t) {
  json mu = json::array();
  for (std::size_t l = 0; l < t.mu.size(); ++l)
    if (t.mu[l] != 0.0) mu.push_back(json::array({l, t.mu[l]}));
  j = json{{"id", t.id},
           {"num_links", t.mu.size()},
           {"mu_sparse", std::move(mu)},
           {"sigma", t.sigma}};
}

inline void from_json(const json& j, AttackType& t) {
  j.at("id").get_to(t.id);
  const std::size_t n = j.at("num_links").get<std::size_t>();
  t.mu.assign(n, 0.0);
  for (const auto& entry : j.at("mu_sparse"))
    t.mu.at(entry.at(0).get<std::size_t>()) = entry.at(1).get<double>();
  j.at("sigma").get_to(t.sigma);
  t.validate();
}

// ---- clustering ----

inline void to_json(json& j, const ClusterModel& m) {
  j = json{{"centers", m.centers},
           {"epsilon", m.epsilon},
           {"members", m.members},
           {"n_c", m.n_c}};
}

inline void from_json(const json& j, ClusterModel& m) {
  j.at("centers").get_to(m.centers);
  j.at("epsilon").get_to(m.epsilon);
  j.at("members").get_to(m.members);
  j.at("n_c").get_to(m.n_c);
}

inline void to_json(json& j, const PairSets& p) {
  j = json{{"cross", p.cross}, {"same", p.same}, {"unassigned", p.unassigned}};
}

inline void from_json(const json& j, PairSets& p) {
  j.at("cross").get_to(p.cross);
  j.at("same").get_to(p.same);
  j.at("unassigned").get_to(p.unassigned);
}

// ---- allocation / routing ----

inline void to_json(json& j, const Allocation& a) {
  j = json{{"x", a.x}, {"u", a.u}, {"alpha", a.alpha}, {"avg", a.avg}, {"cost", a.cost}};
}

inline void from_json(const json& j, Allocation& a) {
  j.at("x").get_to(a.x);
  j.at("u").get_to(a.u);
  j.at("alpha").get_to(a.alpha);
  j.at("avg").get_to(a.avg);
  j.at("cost").get_to(a.cost);
}

inline void to_json(json& j, const RoutingSolution& s) {
  j = json{{"z", s.z},
           {"y", s.y},
           {"objective", s.objective},
           {"gap", s.gap},
           {"iterations", s.iterations}};
}

inline void from_json(const json& j, RoutingSolution& s) {
  j.at("z").get_to(s.z);
  j.at("y").get_to(s.y);
  j.at("objective").get_to(s.objective);
  j.at("gap").get_to(s.gap);
  j.at("iterations").get_to(s.iterations);
}

inline void to_json(json& j, const Observation& o) {
  j = json{{"sensed", o.sensed.rows}, {"o", o.o}};
}

inline void from_json(const json& j, Observation& o) {
  j.at("sensed").get_to(o.sensed.rows);
  j.at("o").get_to(o.o);
}

// ---- files ----

inline void save_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << j.dump(1) << "\n";
}

inline json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read " + path);
  return json::parse(in);
}

/// Shortest round-trip decimal text for a double (reuses the JSON
/// serializer so CSV output is deterministic).
inline std::string fmt_double(double v) { return json(v).dump(); }

/// pair ids x group ids, one row per cross-cluster pair.
inline void write_difference_matrix_csv(const std::string& path,
                                        const DifferenceMatrix& M) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << "type_p,type_q";
  for (int g = 0; g < M.n_groups; ++g) out << ",g" << g;
  out << "\n";
  for (int i = 0; i < M.n_pairs(); ++i) {
    out << M.pair_index[i].first << "," << M.pair_index[i].second;
    for (int g = 0; g < M.n_groups; ++g) out << "," << fmt_double(M.m[i][g]);
    out << "\n";
  }
}

}  // namespace flowsense
