#pragma once

#include <algorithm>
#include <limits>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "flowsense/errors.hpp"
#include "flowsense/network.hpp"

namespace flowsense {
namespace detail {

struct PathCandidate {
  double cost;
  std::vector<int> links;
  // (cost, lexicographic link sequence) ordering makes the k-shortest
  // enumeration deterministic under cost ties.
  bool operator<(const PathCandidate& o) const {
    if (cost != o.cost) return cost < o.cost;
    return links < o.links;
  }
};

class ShortestPathEngine {
 public:
  explicit ShortestPathEngine(const Network& net) : net_(net) {
    out_.resize(net.num_nodes);
    for (const Link& l : net.links) out_[l.tail].push_back(l.id);
    for (auto& lst : out_) std::sort(lst.begin(), lst.end());
    banned_link_.assign(net.num_links(), 0);
    banned_node_.assign(net.num_nodes, 0);
  }

  // Dijkstra over free-flow cost b with (cost, lexicographic link
  // sequence) label order, so cost ties resolve to the smallest link-id
  // sequence (exact for positive costs). Nodes below first_thru_node
  // may appear only as endpoints (they are zone centroids).
  bool shortest(int origin, int dest, std::vector<int>& path_links,
                double& cost) const {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(net_.num_nodes, inf);
    std::vector<int> pred(net_.num_nodes, -1);

    auto rebuild = [&](int v, std::vector<int>& out) {
      out.clear();
      while (v != origin) {
        out.push_back(pred[v]);
        v = net_.links[pred[v]].tail;
      }
      std::reverse(out.begin(), out.end());
    };
    std::vector<int> current, candidate;

    using Entry = std::pair<double, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> pq;
    dist[origin] = 0.0;
    pq.emplace(0.0, origin);
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (d > dist[u]) continue;
      for (int lid : out_[u]) {
        if (banned_link_[lid]) continue;
        const Link& l = net_.links[lid];
        const int v = l.head;
        if (banned_node_[v]) continue;
        if (v != dest && v < net_.first_thru_node) continue;
        const double nd = d + l.b;
        if (nd < dist[v]) {
          dist[v] = nd;
          pred[v] = lid;
          pq.emplace(nd, v);
        } else if (nd == dist[v] && pred[v] != -1 && pred[v] != lid) {
          rebuild(u, candidate);
          candidate.push_back(lid);
          rebuild(v, current);
          if (candidate < current) {
            pred[v] = lid;
            pq.emplace(nd, v);  // re-relax downstream with the better label
          }
        }
      }
    }
    if (dist[dest] == inf) return false;
    rebuild(dest, path_links);
    cost = dist[dest];
    return true;
  }

  void ban_link(int l) { banned_link_[l] = 1; }
  void ban_node(int n) { banned_node_[n] = 1; }
  void clear_bans() {
    std::fill(banned_link_.begin(), banned_link_.end(), 0);
    std::fill(banned_node_.begin(), banned_node_.end(), 0);
  }

 private:
  const Network& net_;
  std::vector<std::vector<int>> out_;
  mutable std::vector<char> banned_link_;
  mutable std::vector<char> banned_node_;
};

}  // namespace detail

/// Yen's algorithm: up to k shortest loop-free paths from origin to
/// dest under free-flow cost, in (cost, lexicographic link-id) order.
inline std::vector<std::vector<int>> k_shortest_paths(const Network& net,
                                                      int origin, int dest,
                                                      int k) {
  if (k < 1) throw ValidationError("k_shortest_paths: k must be >= 1");
  detail::ShortestPathEngine engine(net);

  auto path_cost = [&](const std::vector<int>& links) {
    double c = 0.0;
    for (int l : links) c += net.links[l].b;
    return c;
  };

  std::vector<detail::PathCandidate> accepted;
  {
    std::vector<int> links;
    double cost = 0.0;
    if (!engine.shortest(origin, dest, links, cost)) return {};
    accepted.push_back({path_cost(links), std::move(links)});
  }

  std::set<detail::PathCandidate> candidates;
  std::set<std::vector<int>> known;
  known.insert(accepted[0].links);

  while (static_cast<int>(accepted.size()) < k) {
    const std::vector<int>& prev = accepted.back().links;
    for (std::size_t i = 0; i < prev.size(); ++i) {
      const int spur_node = net.links[prev[i]].tail;
      const std::vector<int> root(prev.begin(), prev.begin() + i);

      engine.clear_bans();
      for (const auto& p : accepted) {
        if (p.links.size() > i &&
            std::equal(root.begin(), root.end(), p.links.begin()))
          engine.ban_link(p.links[i]);
      }
      for (const auto& c : candidates) {
        if (c.links.size() > i &&
            std::equal(root.begin(), root.end(), c.links.begin()))
          engine.ban_link(c.links[i]);
      }
      for (int lid : root) engine.ban_node(net.links[lid].tail);

      std::vector<int> spur;
      double spur_cost = 0.0;
      if (!engine.shortest(spur_node, dest, spur, spur_cost)) continue;

      std::vector<int> full = root;
      full.insert(full.end(), spur.begin(), spur.end());
      if (known.insert(full).second)
        candidates.insert({path_cost(full), std::move(full)});
    }
    if (candidates.empty()) break;
    accepted.push_back(*candidates.begin());
    candidates.erase(candidates.begin());
  }
  // Yen's generation order can interleave equal-cost paths; the output
  // contract is (cost, lexicographic link sequence) order.
  std::sort(accepted.begin(), accepted.end());
  std::vector<std::vector<int>> out;
  out.reserve(accepted.size());
  for (auto& p : accepted) out.push_back(std::move(p.links));
  return out;
}

struct RouteGenResult {
  int shortfall_warnings = 0;  // OD pairs with fewer than k loop-free paths
};

/// Enumerates the k shortest loop-free paths for every OD pair and
/// fills net.routes / net.od_of_route (the sparse F and H).
inline RouteGenResult generate_routes(Network& net, int k) {
  if (k < 1) throw ValidationError("generate_routes: k must be >= 1");
  net.routes.clear();
  net.od_of_route.clear();
  RouteGenResult result;
  for (int i = 0; i < net.num_od(); ++i) {
    const auto [o, d] = net.od_pairs[i];
    auto paths = k_shortest_paths(net, o, d, k);
    if (paths.empty())
      throw ValidationError("OD pair (" + std::to_string(o + 1) + ", " +
                            std::to_string(d + 1) + ") is disconnected");
    if (static_cast<int>(paths.size()) < k) ++result.shortfall_warnings;
    for (auto& p : paths) {
      net.routes.push_back(std::move(p));
      net.od_of_route.push_back(i);
    }
  }
  net.validate();
  return result;
}

}  // namespace flowsense
