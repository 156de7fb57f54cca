#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "flowsense/attack.hpp"
#include "flowsense/errors.hpp"
#include "flowsense/network.hpp"

namespace flowsense {

/// Pairwise divergence of attack types per candidate subnetwork:
/// row i = cross-cluster pair (p, q), column j = subnetwork j, entry
/// (xi_p - xi_q)^T (Lambda_p + Lambda_q)^+ (xi_p - xi_q) restricted to
/// the subnetwork's links. Covariances are diagonal, so the entry is a
/// per-link sum; links with zero summed variance but distinct means
/// are annihilated by the pseudoinverse and counted as drops.
struct DifferenceMatrix {
  std::vector<std::vector<double>> m;
  std::vector<std::pair<int, int>> pair_index;
  int n_groups = 0;
  int zero_variance_drops = 0;

  int n_pairs() const { return static_cast<int>(m.size()); }
};

inline DifferenceMatrix difference_matrix(
    const std::vector<AttackType>& types, const Partition& partition,
    const std::vector<std::pair<int, int>>& pairs) {
  if (pairs.empty()) throw ValidationError("difference_matrix: empty pair set");
  for (int j = 0; j < partition.num_groups(); ++j)
    if (partition.groups[j].empty())
      throw ValidationError("difference_matrix: group " + std::to_string(j) + " is empty");

  DifferenceMatrix out;
  out.n_groups = partition.num_groups();
  out.pair_index = pairs;
  out.m.assign(pairs.size(), std::vector<double>(out.n_groups, 0.0));
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto [p, q] = pairs[i];
    const AttackType& tp = types.at(p);
    const AttackType& tq = types.at(q);
    for (int j = 0; j < out.n_groups; ++j) {
      double acc = 0.0;
      for (int l : partition.groups[j]) {
        const double gap = tp.mu[l] - tq.mu[l];
        const double var = tp.sigma[l] * tp.sigma[l] + tq.sigma[l] * tq.sigma[l];
        if (var == 0.0) {
          if (gap != 0.0) ++out.zero_variance_drops;
          continue;
        }
        acc += gap * gap / var;
      }
      out.m[i][j] = acc;
    }
  }
  return out;
}

namespace detail {

// Per-row fractional-knapsack bound: the best value reachable from
// the columns >= first_free within the remaining budget, relaxing the
// last item. Upper-bounds every 0/1 completion.
struct KnapsackBounds {
  const std::vector<std::vector<double>>* m = nullptr;
  const std::vector<double>* q = nullptr;
  std::vector<std::vector<int>> row_order;  // per row, by value/cost desc

  void init(const std::vector<std::vector<double>>& mat,
            const std::vector<double>& cost) {
    m = &mat;
    q = &cost;
    row_order.resize(mat.size());
    const int n_g = static_cast<int>(cost.size());
    for (std::size_t i = 0; i < mat.size(); ++i) {
      row_order[i].resize(n_g);
      std::iota(row_order[i].begin(), row_order[i].end(), 0);
      std::stable_sort(row_order[i].begin(), row_order[i].end(),
                       [&](int a, int b) {
                         return mat[i][a] / cost[a] > mat[i][b] / cost[b];
                       });
    }
  }

  double row_bound(std::size_t i, int first_free, double base,
                   double budget) const {
    double value = base;
    for (int j : row_order[i]) {
      if (j < first_free) continue;
      const double mj = (*m)[i][j];
      if (mj <= 0.0) break;  // sorted by ratio; the rest add nothing
      const double cj = (*q)[j];
      if (cj <= budget) {
        value += mj;
        budget -= cj;
      } else {
        value += mj * (budget / cj);
        break;
      }
    }
    return value;
  }
};

}  // namespace detail

struct MaxMinResult {
  double alpha = 0.0;
  std::vector<int> x;  // one deterministic maximizer
};

/// Exact max-min allocation: maximize min_i (Mx)_i over binary x with
/// q^T x <= gamma, by best-bound pruned depth-first search. The bound
/// at a node is the row-wise fractional-knapsack relaxation minimized
/// over rows, which dominates every feasible completion.
inline MaxMinResult solve_max_min(const DifferenceMatrix& M,
                                  const std::vector<double>& q, double gamma) {
  const int n_p = M.n_pairs();
  const int n_g = M.n_groups;
  if (n_p < 1)
    throw ValidationError("solve_max_min: empty pair set, nothing to distinguish");
  if (static_cast<int>(q.size()) != n_g)
    throw ValidationError("solve_max_min: cost vector dimension mismatch");
  for (double c : q)
    if (c <= 0.0) throw ValidationError("solve_max_min: costs must be > 0");
  if (gamma <= 0.0) throw ValidationError("solve_max_min: budget must be > 0");

  detail::KnapsackBounds bounds;
  bounds.init(M.m, q);

  auto row_min = [&](const std::vector<double>& rows) {
    double v = rows[0];
    for (double r : rows) v = std::min(v, r);
    return v;
  };

  // Greedy incumbent: repeatedly add the affordable column that
  // maximizes the resulting minimum (ties to the total, then index).
  std::vector<int> inc_x(n_g, 0);
  {
    std::vector<double> rows(n_p, 0.0);
    double budget = gamma;
    while (true) {
      int best_j = -1;
      double best_min = -1.0, best_sum = -1.0;
      for (int j = 0; j < n_g; ++j) {
        if (inc_x[j] || q[j] > budget) continue;
        double mn = std::numeric_limits<double>::infinity(), sm = 0.0;
        for (int i = 0; i < n_p; ++i) {
          const double v = rows[i] + M.m[i][j];
          mn = std::min(mn, v);
          sm += v;
        }
        if (mn > best_min || (mn == best_min && sm > best_sum)) {
          best_min = mn;
          best_sum = sm;
          best_j = j;
        }
      }
      if (best_j < 0) break;
      inc_x[best_j] = 1;
      budget -= q[best_j];
      for (int i = 0; i < n_p; ++i) rows[i] += M.m[i][best_j];
    }
  }

  MaxMinResult best;
  best.x = inc_x;
  {
    std::vector<double> rows(n_p, 0.0);
    for (int j = 0; j < n_g; ++j)
      if (inc_x[j])
        for (int i = 0; i < n_p; ++i) rows[i] += M.m[i][j];
    best.alpha = row_min(rows);
  }

  std::vector<int> path(n_g, 0);
  // Row accumulators are rebuilt on each 1-branch (no subtract-back),
  // so leaf values are exact ascending-order column sums.
  auto dfs = [&](auto&& self, int j, double spent,
                 const std::vector<double>& rows) -> void {
    if (j == n_g) {
      const double alpha = row_min(rows);
      if (alpha > best.alpha) {
        best.alpha = alpha;
        best.x.assign(path.begin(), path.end());
      }
      return;
    }
    double ub = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_p; ++i)
      ub = std::min(ub, bounds.row_bound(i, j, rows[i], gamma - spent));
    if (ub <= best.alpha) return;

    if (q[j] <= gamma - spent) {
      std::vector<double> taken(rows);
      for (int i = 0; i < n_p; ++i) taken[i] += M.m[i][j];
      path[j] = 1;
      self(self, j + 1, spent + q[j], taken);
      path[j] = 0;
    }
    self(self, j + 1, spent, rows);
  };
  std::vector<double> zero_rows(n_p, 0.0);
  dfs(dfs, 0, 0.0, zero_rows);
  return best;
}

/// Budgeted sensing plan with its aggregated divergences.
struct Allocation {
  std::vector<int> x;     // binary selection over subnetworks
  std::vector<double> u;  // u = M x
  double alpha = 0.0;     // min_i u_i
  double avg = 0.0;       // mean(u)
  double cost = 0.0;      // q^T x
};

/// Lexicographic allocation: exact max-min value alpha first, then the
/// exact maximum of the average divergence subject to
/// Mx >= (alpha - 1e-9 (1 + alpha)) * 1. Average ties resolve toward
/// lower-indexed subnetworks: the search tries selecting each column
/// before skipping it, in index order, and keeps the first optimum it
/// reaches (equal-column instances therefore pick the lowest index).
inline Allocation solve_lexicographic(const DifferenceMatrix& M,
                                      const std::vector<double>& q,
                                      double gamma) {
  const MaxMinResult stage1 = solve_max_min(M, q, gamma);
  const double alpha_bar = stage1.alpha - 1e-9 * (1.0 + stage1.alpha);
  const int n_p = M.n_pairs();
  const int n_g = M.n_groups;

  std::vector<double> colsum(n_g, 0.0);
  for (int j = 0; j < n_g; ++j)
    for (int i = 0; i < n_p; ++i) colsum[j] += M.m[i][j];

  detail::KnapsackBounds row_bounds;
  row_bounds.init(M.m, q);
  detail::KnapsackBounds avg_bounds;
  std::vector<std::vector<double>> colsum_row(1, colsum);
  avg_bounds.init(colsum_row, q);

  bool have_incumbent = false;
  double best_sum = -std::numeric_limits<double>::infinity();
  std::vector<int> best_x;
  std::vector<int> path(n_g, 0);

  auto dfs = [&](auto&& self, int j, double spent, double sum_sel,
                 const std::vector<double>& rows) -> void {
    if (j == n_g) {
      double mn = std::numeric_limits<double>::infinity();
      for (int i = 0; i < n_p; ++i) mn = std::min(mn, rows[i]);
      if (mn >= alpha_bar && sum_sel > best_sum) {
        best_sum = sum_sel;
        best_x.assign(path.begin(), path.end());
        have_incumbent = true;
      }
      return;
    }
    if (have_incumbent &&
        avg_bounds.row_bound(0, j, sum_sel, gamma - spent) <= best_sum)
      return;
    for (int i = 0; i < n_p; ++i)
      if (row_bounds.row_bound(i, j, rows[i], gamma - spent) < alpha_bar)
        return;  // no completion can reach the max-min floor

    // Select-first: later leaves can only tie with a higher-indexed
    // selection pattern, so pruning on <= incumbent keeps the
    // deterministic tie-break intact.
    if (q[j] <= gamma - spent) {
      std::vector<double> taken(rows);
      for (int i = 0; i < n_p; ++i) taken[i] += M.m[i][j];
      path[j] = 1;
      self(self, j + 1, spent + q[j], sum_sel + colsum[j], taken);
      path[j] = 0;
    }
    self(self, j + 1, spent, sum_sel, rows);
  };
  std::vector<double> zero_rows(n_p, 0.0);
  dfs(dfs, 0, 0.0, 0.0, zero_rows);

  if (!have_incumbent) {
    // The stage-1 maximizer is always feasible; reaching this would be a bug.
    best_x = stage1.x;
  }

  Allocation out;
  out.x = best_x;
  out.u.assign(n_p, 0.0);
  for (int j = 0; j < n_g; ++j)
    if (out.x[j])
      for (int i = 0; i < n_p; ++i) out.u[i] += M.m[i][j];
  out.alpha = *std::min_element(out.u.begin(), out.u.end());
  out.avg = std::accumulate(out.u.begin(), out.u.end(), 0.0) / n_p;
  out.cost = 0.0;
  for (int j = 0; j < n_g; ++j)
    if (out.x[j]) out.cost += q[j];
  return out;
}

}  // namespace flowsense
