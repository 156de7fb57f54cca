#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "flowsense/errors.hpp"
#include "flowsense/network.hpp"
#include "flowsense/rng.hpp"
#include "flowsense/tntp.hpp"

namespace flowsense {

/// Reads a `link_id,group_id[,cost]` or `node_id,group_id[,cost]`
/// mapping (the header row names the key column). Node-keyed files
/// assign each link by its tail node. Group ids may be arbitrary
/// nonnegative integers; groups are indexed in sorted id order. Links
/// that receive no group become the reserved unsensed set.
inline Partition load_partition(std::istream& in, const Network& net) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("partition file is empty");
  std::istringstream header(line);
  std::string key_col;
  std::getline(header, key_col, ',');
  key_col = detail::trim(key_col);
  bool node_keyed;
  if (key_col == "link_id")
    node_keyed = false;
  else if (key_col == "node_id")
    node_keyed = true;
  else
    throw ParseError("partition header must start with link_id or node_id, got: " + key_col);

  std::map<long, std::pair<long, double>> by_key;  // key -> (group, cost)
  while (std::getline(in, line)) {
    line = detail::trim(line);
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string key_s, group_s, cost_s;
    std::getline(row, key_s, ',');
    if (!std::getline(row, group_s, ',')) throw ParseError("partition row missing group: " + line);
    const bool has_cost = static_cast<bool>(std::getline(row, cost_s, ','));
    long key = 0, group = 0;
    double cost = 1.0;
    try {
      key = std::stol(detail::trim(key_s));
      group = std::stol(detail::trim(group_s));
      if (has_cost) cost = std::stod(detail::trim(cost_s));
    } catch (const std::exception&) {
      throw ParseError("malformed partition row: " + line);
    }
    if (group < 0) throw ParseError("negative group id: " + line);
    if (cost <= 0.0) throw ValidationError("group cost must be > 0: " + line);
    if (!by_key.emplace(key, std::make_pair(group, cost)).second)
      throw ValidationError("key " + std::to_string(key) + " mapped twice");
  }

  // Resolve every link to a group id (or none).
  std::vector<long> group_of_link(net.num_links(), -1);
  std::map<long, double> group_cost;
  for (const Link& l : net.links) {
    const long key = node_keyed ? l.tail : l.id;
    auto it = by_key.find(key);
    if (it == by_key.end()) continue;
    group_of_link[l.id] = it->second.first;
    auto [pos, inserted] = group_cost.emplace(it->second.first, it->second.second);
    if (!inserted && pos->second != it->second.second)
      throw ValidationError("group " + std::to_string(it->second.first) +
                            " has inconsistent costs");
  }
  if (!node_keyed) {
    for (const auto& [key, val] : by_key)
      if (key < 0 || key >= net.num_links())
        throw ValidationError("link id " + std::to_string(key) + " out of range");
  }

  Partition p;
  std::map<long, int> dense;  // sorted group id -> dense index
  for (const auto& [gid, cost] : group_cost) {
    dense[gid] = p.num_groups();
    p.groups.emplace_back();
    p.group_costs.push_back(cost);
  }
  for (int l = 0; l < net.num_links(); ++l) {
    if (group_of_link[l] < 0)
      p.unsensed.push_back(l);
    else
      p.groups[dense[group_of_link[l]]].push_back(l);
  }
  p.validate(net.num_links());
  return p;
}

/// Synthesizes a spatial partition by k-means on link midpoints.
/// Clusters that come up empty are re-seeded from the farthest member
/// of the largest cluster. Deterministic given the seed.
inline Partition synth_partition(const Network& net, int n_g,
                                 std::uint64_t seed) {
  if (n_g < 1) throw ValidationError("synth_partition: n_g must be >= 1");
  if (!net.has_coordinates())
    throw ValidationError("synth_partition: node coordinates are required");
  const int n_l = net.num_links();
  if (n_g > n_l)
    throw ValidationError("synth_partition: more groups than links");

  std::vector<std::pair<double, double>> mid(n_l);
  for (const Link& l : net.links)
    mid[l.id] = {0.5 * (net.node_x[l.tail] + net.node_x[l.head]),
                 0.5 * (net.node_y[l.tail] + net.node_y[l.head])};

  auto dist2 = [&](const std::pair<double, double>& a,
                   const std::pair<double, double>& b) {
    const double dx = a.first - b.first, dy = a.second - b.second;
    return dx * dx + dy * dy;
  };

  RngStream rng(seed, {0x70617274u /*"part"*/});
  std::vector<std::pair<double, double>> centers;
  centers.push_back(mid[rng.index(mid.size())]);
  while (static_cast<int>(centers.size()) < n_g) {
    double total = 0.0;
    std::vector<double> nearest(n_l);
    for (int i = 0; i < n_l; ++i) {
      double d = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) d = std::min(d, dist2(mid[i], c));
      nearest[i] = d;
      total += d;
    }
    int pick = n_l - 1;
    if (total <= 0.0) {
      pick = static_cast<int>(rng.index(mid.size()));
    } else {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      for (int i = 0; i < n_l; ++i) {
        acc += nearest[i];
        if (acc >= target) {
          pick = i;
          break;
        }
      }
    }
    centers.push_back(mid[pick]);
  }

  std::vector<int> assign(n_l, 0);
  auto assign_all = [&]() {
    for (int i = 0; i < n_l; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (int c = 0; c < n_g; ++c) {
        const double d = dist2(mid[i], centers[c]);
        if (d < best) {
          best = d;
          assign[i] = c;
        }
      }
    }
  };
  assign_all();
  for (int iter = 0; iter < 128; ++iter) {
    // re-seed empty clusters from the largest one
    for (bool changed = true; changed;) {
      changed = false;
      std::vector<int> count(n_g, 0);
      for (int a : assign) ++count[a];
      for (int c = 0; c < n_g; ++c) {
        if (count[c] > 0) continue;
        const int big = static_cast<int>(
            std::max_element(count.begin(), count.end()) - count.begin());
        int far = -1;
        double far_d = -1.0;
        for (int i = 0; i < n_l; ++i)
          if (assign[i] == big && dist2(mid[i], centers[big]) > far_d) {
            far_d = dist2(mid[i], centers[big]);
            far = i;
          }
        centers[c] = mid[far];
        assign[far] = c;
        changed = true;
      }
    }
    std::vector<std::pair<double, double>> sums(n_g, {0.0, 0.0});
    std::vector<int> count(n_g, 0);
    for (int i = 0; i < n_l; ++i) {
      sums[assign[i]].first += mid[i].first;
      sums[assign[i]].second += mid[i].second;
      ++count[assign[i]];
    }
    for (int c = 0; c < n_g; ++c)
      if (count[c] > 0)
        centers[c] = {sums[c].first / count[c], sums[c].second / count[c]};
    std::vector<int> prev = assign;
    assign_all();
    if (assign == prev) break;
  }
  // final empty-cluster sweep
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<int> count(n_g, 0);
    for (int a : assign) ++count[a];
    for (int c = 0; c < n_g; ++c) {
      if (count[c] > 0) continue;
      const int big = static_cast<int>(
          std::max_element(count.begin(), count.end()) - count.begin());
      int far = -1;
      double far_d = -1.0;
      for (int i = 0; i < n_l; ++i)
        if (assign[i] == big && dist2(mid[i], centers[big]) > far_d) {
          far_d = dist2(mid[i], centers[big]);
          far = i;
        }
      assign[far] = c;
      changed = true;
    }
  }

  Partition p;
  p.groups.assign(n_g, {});
  p.group_costs.assign(n_g, 1.0);
  for (int i = 0; i < n_l; ++i) p.groups[assign[i]].push_back(i);
  p.validate(n_l);
  return p;
}

}  // namespace flowsense
