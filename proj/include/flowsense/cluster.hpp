#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "flowsense/errors.hpp"
#include "flowsense/rng.hpp"

namespace flowsense {

inline double l1_distance(const std::vector<double>& a,
                          const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d;
}

struct KMediansResult {
  std::vector<std::vector<double>> centers;
  std::vector<int> assignment;  // nearest center per point, ties to lowest index
  double objective = 0.0;       // sum of L1 distances to assigned centers
  bool degenerate = false;      // fewer distinct points than centers
};

namespace detail {

inline std::vector<int> assign_nearest_l1(
    const std::vector<std::vector<double>>& points,
    const std::vector<std::vector<double>>& centers) {
  std::vector<int> a(points.size(), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centers.size(); ++c) {
      const double d = l1_distance(points[i], centers[c]);
      if (d < best) {
        best = d;
        a[i] = static_cast<int>(c);
      }
    }
  }
  return a;
}

// Coordinate-wise median; even counts take the midpoint of the two
// central values (the L1 minimizer is then the whole interval).
inline std::vector<double> coordinate_median(
    const std::vector<std::vector<double>>& points,
    const std::vector<int>& members) {
  const std::size_t dim = points[members[0]].size();
  std::vector<double> center(dim);
  std::vector<double> column(members.size());
  for (std::size_t d = 0; d < dim; ++d) {
    for (std::size_t i = 0; i < members.size(); ++i) column[i] = points[members[i]][d];
    std::sort(column.begin(), column.end());
    const std::size_t n = column.size();
    center[d] = (n % 2 == 1) ? column[n / 2]
                             : 0.5 * (column[n / 2 - 1] + column[n / 2]);
  }
  return center;
}

}  // namespace detail

/// L1 k-medians by alternating minimization with k-means++-style
/// seeding, run `restarts` times; returns the best run. Deterministic
/// given the seed.
inline KMediansResult k_medians(const std::vector<std::vector<double>>& points,
                                int n_c, int restarts, std::uint64_t seed) {
  if (points.empty()) throw ValidationError("k_medians: no points");
  if (n_c < 1) throw ValidationError("k_medians: n_c must be >= 1");
  if (restarts < 1) throw ValidationError("k_medians: restarts must be >= 1");
  const int n = static_cast<int>(points.size());

  int distinct = 0;
  {
    std::vector<std::vector<double>> sorted = points;
    std::sort(sorted.begin(), sorted.end());
    distinct = static_cast<int>(
        std::unique(sorted.begin(), sorted.end()) - sorted.begin());
  }

  KMediansResult best;
  best.objective = std::numeric_limits<double>::infinity();
  for (int run = 0; run < restarts; ++run) {
    RngStream rng(seed, {0x6b6d6564u /*"kmed"*/, static_cast<std::uint64_t>(run)});

    // Seeding: first center uniform, then proportional to distance to
    // the nearest chosen center.
    std::vector<std::vector<double>> centers;
    centers.push_back(points[rng.index(points.size())]);
    std::vector<double> nearest(n, 0.0);
    while (static_cast<int>(centers.size()) < n_c) {
      double total = 0.0;
      for (int i = 0; i < n; ++i) {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& c : centers) d = std::min(d, l1_distance(points[i], c));
        nearest[i] = d;
        total += d;
      }
      int pick;
      if (total <= 0.0) {
        pick = static_cast<int>(rng.index(points.size()));
      } else {
        const double target = rng.uniform() * total;
        double acc = 0.0;
        pick = n - 1;
        for (int i = 0; i < n; ++i) {
          acc += nearest[i];
          if (acc >= target) {
            pick = i;
            break;
          }
        }
      }
      centers.push_back(points[pick]);
    }

    std::vector<int> assignment = detail::assign_nearest_l1(points, centers);
    for (int iter = 0; iter < 256; ++iter) {
      for (int c = 0; c < n_c; ++c) {
        std::vector<int> members;
        for (int i = 0; i < n; ++i)
          if (assignment[i] == c) members.push_back(i);
        if (!members.empty())
          centers[c] = detail::coordinate_median(points, members);
        // empty clusters keep their center
      }
      std::vector<int> next = detail::assign_nearest_l1(points, centers);
      const bool fixed_point = (next == assignment);
      assignment = std::move(next);
      if (fixed_point) break;
    }

    double objective = 0.0;
    for (int i = 0; i < n; ++i)
      objective += l1_distance(points[i], centers[assignment[i]]);
    if (objective < best.objective) {
      best.centers = std::move(centers);
      best.assignment = std::move(assignment);
      best.objective = objective;
    }
  }
  best.degenerate = (n_c > distinct);
  return best;
}

/// Clusters with an explicit membership radius: every member i of
/// cluster j satisfies ||point_i - center_j||_1 <= epsilon.
struct ClusterModel {
  std::vector<std::vector<double>> centers;
  double epsilon = 0.0;
  std::vector<std::vector<int>> members;  // disjoint point-id sets
  int n_c = 0;
};

/// Smallest n_c in 1..n_c_max whose k-medians centers cover every
/// point within epsilon; members are assigned to the nearest center.
inline ClusterModel choose_n_c(const std::vector<std::vector<double>>& points,
                               double epsilon, int n_c_max, int restarts,
                               std::uint64_t seed) {
  if (epsilon <= 0.0) throw ValidationError("choose_n_c: epsilon must be > 0");
  if (n_c_max < 1) throw ValidationError("choose_n_c: n_c_max must be >= 1");
  std::vector<int> uncovered;
  for (int n_c = 1; n_c <= n_c_max; ++n_c) {
    KMediansResult run = k_medians(points, n_c, restarts, seed);
    uncovered.clear();
    for (std::size_t i = 0; i < points.size(); ++i)
      if (l1_distance(points[i], run.centers[run.assignment[i]]) > epsilon)
        uncovered.push_back(static_cast<int>(i));
    if (uncovered.empty()) {
      ClusterModel model;
      model.centers = std::move(run.centers);
      model.epsilon = epsilon;
      model.n_c = n_c;
      model.members.resize(n_c);
      for (std::size_t i = 0; i < points.size(); ++i)
        model.members[run.assignment[i]].push_back(static_cast<int>(i));
      return model;
    }
  }
  std::string ids;
  for (int i : uncovered) ids += (ids.empty() ? "" : ", ") + std::to_string(i);
  throw ValidationError("choose_n_c: no n_c <= " + std::to_string(n_c_max) +
                        " covers all points within epsilon; uncovered: " + ids);
}

/// Cross-cluster pairs P and same-cluster pairs Q over assigned types,
/// both in lexicographic order. Types outside every cluster are
/// reported separately and excluded from both sets.
struct PairSets {
  std::vector<std::pair<int, int>> cross;  // P: rows of the difference matrix
  std::vector<std::pair<int, int>> same;   // Q
  std::vector<int> unassigned;
};

inline PairSets pair_sets(const ClusterModel& model, int n_a) {
  std::vector<int> cluster_of(n_a, -1);
  for (std::size_t c = 0; c < model.members.size(); ++c) {
    for (int i : model.members[c]) {
      if (i < 0 || i >= n_a) throw ValidationError("pair_sets: member id out of range");
      if (cluster_of[i] != -1)
        throw ValidationError("pair_sets: type " + std::to_string(i) +
                              " belongs to two clusters (epsilon too large)");
      cluster_of[i] = static_cast<int>(c);
    }
  }
  PairSets out;
  for (int i = 0; i < n_a; ++i)
    if (cluster_of[i] == -1) out.unassigned.push_back(i);
  for (int i = 0; i < n_a; ++i) {
    if (cluster_of[i] == -1) continue;
    for (int j = i + 1; j < n_a; ++j) {
      if (cluster_of[j] == -1) continue;
      if (cluster_of[i] == cluster_of[j])
        out.same.emplace_back(i, j);
      else
        out.cross.emplace_back(i, j);
    }
  }
  return out;
}

}  // namespace flowsense
