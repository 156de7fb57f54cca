#pragma once

#include <string>
#include <utility>
#include <vector>

#include "flowsense/errors.hpp"

namespace flowsense {

/// Directed road segment with quartic (BPR) cost parameters.
/// b is the free-flow travel cost, c the nominal capacity and w the
/// congestion weight, so the link cost is b + w*((f+y)/c)^4.
struct Link {
  int id = 0;
  int tail = 0;
  int head = 0;
  double b = 0.0;
  double c = 1.0;
  double w = 0.0;
};

/// Transportation graph plus demands, enumerated routes and the two
/// incidence structures. The link-route incidence F is stored by its
/// columns (each route is its link-id sequence) and the route-OD
/// incidence H by od_of_route (each column of H has exactly one 1).
/// Immutable by convention once routes are generated; safe to share
/// read-only across solver tasks.
struct Network {
  int num_nodes = 0;
  int first_thru_node = 0;  // nodes below this index are zone centroids
  std::vector<Link> links;

  std::vector<std::pair<int, int>> od_pairs;  // 0-based (origin, destination)
  std::vector<double> demand;                 // one entry per OD pair, >= 0

  std::vector<std::vector<int>> routes;  // link-id sequences
  std::vector<int> od_of_route;          // route j serves od_of_route[j]

  std::vector<double> node_x, node_y;  // optional coordinates

  int num_links() const { return static_cast<int>(links.size()); }
  int num_routes() const { return static_cast<int>(routes.size()); }
  int num_od() const { return static_cast<int>(od_pairs.size()); }
  bool has_coordinates() const {
    return !node_x.empty() && node_x.size() == node_y.size() &&
           static_cast<int>(node_x.size()) == num_nodes;
  }

  std::vector<double> capacities() const {
    std::vector<double> c(links.size());
    for (std::size_t j = 0; j < links.size(); ++j) c[j] = links[j].c;
    return c;
  }

  std::vector<std::vector<int>> routes_of_od() const {
    std::vector<std::vector<int>> by_od(od_pairs.size());
    for (int r = 0; r < num_routes(); ++r) by_od[od_of_route[r]].push_back(r);
    return by_od;
  }

  void validate() const {
    for (const Link& l : links) {
      if (l.tail == l.head) throw ValidationError("link " + std::to_string(l.id) + ": self loop");
      if (l.c <= 0.0) throw ValidationError("link " + std::to_string(l.id) + ": capacity must be > 0");
      if (l.b < 0.0) throw ValidationError("link " + std::to_string(l.id) + ": negative travel cost");
      if (l.w <= 0.0) throw ValidationError("link " + std::to_string(l.id) + ": congestion weight must be > 0");
      if (l.tail < 0 || l.tail >= num_nodes || l.head < 0 || l.head >= num_nodes)
        throw ValidationError("link " + std::to_string(l.id) + ": node id out of range");
    }
    if (demand.size() != od_pairs.size())
      throw ValidationError("demand/od_pairs size mismatch");
    for (double d : demand)
      if (d < 0.0) throw ValidationError("negative demand");
    if (od_of_route.size() != routes.size())
      throw ValidationError("od_of_route/routes size mismatch");
    for (const auto& route : routes) {
      if (route.empty()) throw ValidationError("empty route");
      for (std::size_t i = 0; i < route.size(); ++i) {
        if (route[i] < 0 || route[i] >= num_links())
          throw ValidationError("route references unknown link");
        if (i > 0 && links[route[i - 1]].head != links[route[i]].tail)
          throw ValidationError("route is not a connected path");
      }
    }
  }
};

/// y = F z: accumulates route flows onto links.
inline std::vector<double> link_flow(const Network& net,
                                     const std::vector<double>& z) {
  if (z.size() != net.routes.size())
    throw ValidationError("link_flow: route flow has wrong dimension");
  std::vector<double> y(net.links.size(), 0.0);
  for (std::size_t r = 0; r < z.size(); ++r)
    for (int l : net.routes[r]) y[l] += z[r];
  return y;
}

/// F^T v: per-route totals of a per-link quantity (costs, gradients).
inline std::vector<double> route_totals(const Network& net,
                                        const std::vector<double>& per_link) {
  if (per_link.size() != net.links.size())
    throw ValidationError("route_totals: per-link vector has wrong dimension");
  std::vector<double> t(net.routes.size(), 0.0);
  for (std::size_t r = 0; r < net.routes.size(); ++r)
    for (int l : net.routes[r]) t[r] += per_link[l];
  return t;
}

// Dense incidence builders, mainly for tests and exports.
inline std::vector<std::vector<double>> dense_link_route_incidence(const Network& net) {
  std::vector<std::vector<double>> F(net.num_links(), std::vector<double>(net.num_routes(), 0.0));
  for (int r = 0; r < net.num_routes(); ++r)
    for (int l : net.routes[r]) F[l][r] = 1.0;
  return F;
}

inline std::vector<std::vector<double>> dense_route_od_incidence(const Network& net) {
  std::vector<std::vector<double>> H(net.num_od(), std::vector<double>(net.num_routes(), 0.0));
  for (int r = 0; r < net.num_routes(); ++r) H[net.od_of_route[r]][r] = 1.0;
  return H;
}

/// Disjoint link groups (the sensing subnetworks) with per-group
/// allocation costs. Links in no group are listed as unsensed and are
/// excluded from allocation.
struct Partition {
  std::vector<std::vector<int>> groups;
  std::vector<double> group_costs;
  std::vector<int> unsensed;

  int num_groups() const { return static_cast<int>(groups.size()); }

  void validate(int num_links) const {
    if (group_costs.size() != groups.size())
      throw ValidationError("partition: cost/group size mismatch");
    for (double q : group_costs)
      if (q <= 0.0) throw ValidationError("partition: group cost must be > 0");
    std::vector<char> seen(num_links, 0);
    std::size_t covered = 0;
    for (const auto& g : groups) {
      for (int l : g) {
        if (l < 0 || l >= num_links)
          throw ValidationError("partition: link id out of range");
        if (seen[l]) throw ValidationError("partition: link " + std::to_string(l) + " mapped twice");
        seen[l] = 1;
        ++covered;
      }
    }
    for (int l : unsensed) {
      if (l < 0 || l >= num_links)
        throw ValidationError("partition: unsensed link id out of range");
      if (seen[l]) throw ValidationError("partition: unsensed link also grouped");
      ++covered;
    }
    if (covered != static_cast<std::size_t>(num_links))
      throw ValidationError("partition: groups + unsensed must cover all links");
  }
};

}  // namespace flowsense
