#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "flowsense/attack.hpp"
#include "flowsense/cost.hpp"
#include "flowsense/errors.hpp"
#include "flowsense/network.hpp"

namespace flowsense {

/// Separable routing objective sum_j sum_k zeta[j][k] * y_j^k.
struct LinkObjective {
  std::vector<PolyCoeffs> link;

  double value(const std::vector<double>& y) const {
    double total = 0.0;
    for (std::size_t j = 0; j < link.size(); ++j) total += link[j].eval(y[j]);
    return total;
  }

  std::vector<double> gradient(const std::vector<double>& y) const {
    std::vector<double> g(link.size());
    for (std::size_t j = 0; j < link.size(); ++j) g[j] = link[j].derivative(y[j]);
    return g;
  }
};

struct RoutingSolution {
  std::vector<double> z;  // route flows
  std::vector<double> y;  // link flows, y = F z
  double objective = 0.0;
  double gap = 0.0;  // Frank-Wolfe duality gap at the returned iterate
  int iterations = 0;
};

namespace detail {

// Univariate restriction h(t) = sum_j P_j(y_j + t*e_j), kept as the
// coefficients of t^1..t^5 (the constant is irrelevant for the search).
struct SegmentPoly {
  double coef[6] = {0, 0, 0, 0, 0, 0};

  void add_link(const PolyCoeffs& p, double y, double e) {
    if (e == 0.0) return;
    static constexpr double binom[6][6] = {
        {1, 0, 0, 0, 0, 0},  {1, 1, 0, 0, 0, 0},  {1, 2, 1, 0, 0, 0},
        {1, 3, 3, 1, 0, 0},  {1, 4, 6, 4, 1, 0},  {1, 5, 10, 10, 5, 1}};
    for (int k = 1; k <= 5; ++k) {
      if (p.zeta[k] == 0.0) continue;
      double e_pow = 1.0;
      // (y + e t)^k expanded; m = 0 term dropped.
      for (int m = 1; m <= k; ++m) {
        e_pow *= e;
        double y_pow = 1.0;
        for (int i = 0; i < k - m; ++i) y_pow *= y;
        coef[m] += p.zeta[k] * binom[k][m] * y_pow * e_pow;
      }
    }
  }

  double d1(double t) const {
    double acc = 5.0 * coef[5];
    for (int m = 4; m >= 1; --m) acc = acc * t + m * coef[m];
    return acc;
  }

  double d2(double t) const {
    double acc = 20.0 * coef[5];
    for (int m = 4; m >= 2; --m) acc = acc * t + m * (m - 1) * coef[m];
    return acc;
  }
};

// Exact line search for the convex quintic restriction on [0, 1]:
// bisection-safeguarded Newton on the (quartic, nondecreasing)
// derivative. Throws on detected negative curvature.
inline double exact_line_search(const SegmentPoly& h) {
  double scale = 1.0;
  for (int i = 0; i <= 4; ++i) scale = std::max(scale, std::abs(h.d2(0.25 * i)));
  for (int i = 0; i <= 4; ++i)
    if (h.d2(0.25 * i) < -1e-9 * scale)
      throw SolverError("negative curvature along line search: objective is not convex");

  if (h.d1(0.0) >= 0.0) return 0.0;
  if (h.d1(1.0) <= 0.0) return 1.0;
  double lo = 0.0, hi = 1.0, t = 0.5;
  for (int it = 0; it < 200; ++it) {
    const double g = h.d1(t);
    if (g > 0.0)
      hi = t;
    else
      lo = t;
    const double curv = h.d2(t);
    double next = (curv > 0.0) ? t - g / curv : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) < 1e-16) return next;
    t = next;
  }
  return t;
}

}  // namespace detail

/// Frank-Wolfe over route flows on {Hz = d, z >= 0}. Starts from the
/// all-demand-on-first-route vertex; the linear minimization oracle is
/// a per-OD argmin over route costs (ties to the lowest route index)
/// and the step is an exact line search on the polynomial restriction.
/// Terminates when the duality gap drops below tol * max(1, |objective|).
inline RoutingSolution solve(const Network& net, const LinkObjective& obj,
                             double tol = 1e-8, int max_iter = 10000) {
  if (tol <= 0.0) throw ValidationError("solve: tol must be > 0");
  if (obj.link.size() != net.links.size())
    throw ValidationError("solve: objective/network dimension mismatch");
  const auto by_od = net.routes_of_od();
  for (int i = 0; i < net.num_od(); ++i)
    if (by_od[i].empty())
      throw SolverError("infeasible: OD pair " + std::to_string(i) + " has no route");

  double y_max = 0.0;
  for (double d : net.demand) y_max += d;
  for (std::size_t j = 0; j < obj.link.size(); ++j) {
    if (obj.link[j].zeta[5] <= 0.0)
      throw SolverError("link " + std::to_string(j) + ": leading coefficient must be positive");
    if (!convex_on_range(obj.link[j], y_max))
      throw SolverError("link " + std::to_string(j) + ": objective is not convex on the feasible range");
  }

  std::vector<double> z(net.num_routes(), 0.0);
  for (int i = 0; i < net.num_od(); ++i) z[by_od[i][0]] = net.demand[i];

  RoutingSolution sol;
  for (int it = 1; it <= max_iter; ++it) {
    std::vector<double> y = link_flow(net, z);
    const double value = obj.value(y);
    const std::vector<double> g = obj.gradient(y);
    const std::vector<double> route_cost = route_totals(net, g);

    // Linear minimization oracle over the product of scaled simplices.
    std::vector<int> best(net.num_od());
    for (int i = 0; i < net.num_od(); ++i) {
      int arg = by_od[i][0];
      for (int r : by_od[i])
        if (route_cost[r] < route_cost[arg]) arg = r;
      best[i] = arg;
    }

    double gap = 0.0;
    for (int r = 0; r < net.num_routes(); ++r) gap += route_cost[r] * z[r];
    for (int i = 0; i < net.num_od(); ++i) gap -= net.demand[i] * route_cost[best[i]];

    sol.z = z;
    sol.y = std::move(y);
    sol.objective = value;
    sol.gap = std::max(gap, 0.0);
    sol.iterations = it;
    if (gap <= tol * std::max(1.0, std::abs(value))) return sol;

    std::vector<double> s(net.num_routes(), 0.0);
    for (int i = 0; i < net.num_od(); ++i) s[best[i]] = net.demand[i];
    const std::vector<double> y_s = link_flow(net, s);

    detail::SegmentPoly h;
    for (std::size_t j = 0; j < obj.link.size(); ++j)
      h.add_link(obj.link[j], sol.y[j], y_s[j] - sol.y[j]);
    const double t = detail::exact_line_search(h);
    if (t <= 0.0) return sol;  // numerically stalled: no progress possible

    for (int r = 0; r < net.num_routes(); ++r) z[r] = (1.0 - t) * z[r] + t * s[r];
  }
  return sol;
}

/// Objective of the type-i best response: per-link expected cost with
/// mu_tilde = mu_j - f_hat_j, clamped at zero so the hypothesized true
/// traffic f_hat - mu stays nonnegative (the planner cannot un-observe
/// more flow than was reported; keeps the program convex).
inline LinkObjective best_response_objective(const Network& net,
                                             const AttackType& type,
                                             const std::vector<double>& f_hat) {
  if (f_hat.size() != net.links.size() || type.mu.size() != net.links.size())
    throw ValidationError("best_response_objective: dimension mismatch");
  LinkObjective obj;
  obj.link.resize(net.links.size());
  for (std::size_t j = 0; j < net.links.size(); ++j) {
    ExpectedCostParams p;
    p.b = net.links[j].b;
    p.w = net.links[j].w;
    p.c = net.links[j].c;
    p.mu_tilde = std::min(type.mu[j] - f_hat[j], 0.0);
    p.sigma = type.sigma[j];
    obj.link[j] = poly_coefficients(p);
  }
  return obj;
}

inline RoutingSolution best_response_flow(const Network& net,
                                          const AttackType& type,
                                          const std::vector<double>& f_hat,
                                          double tol = 1e-8,
                                          int max_iter = 10000) {
  return solve(net, best_response_objective(net, type, f_hat), tol, max_iter);
}

/// System-optimal objective for a known ambient flow f (sigma = 0).
inline LinkObjective system_objective(const Network& net,
                                      const std::vector<double>& f) {
  if (f.size() != net.links.size())
    throw ValidationError("system_objective: dimension mismatch");
  LinkObjective obj;
  obj.link.resize(net.links.size());
  for (std::size_t j = 0; j < net.links.size(); ++j) {
    ExpectedCostParams p;
    p.b = net.links[j].b;
    p.w = net.links[j].w;
    p.c = net.links[j].c;
    p.mu_tilde = -f[j];
    p.sigma = 0.0;
    obj.link[j] = poly_coefficients(p);
  }
  return obj;
}

inline RoutingSolution system_optimal(const Network& net,
                                      const std::vector<double>& f,
                                      double tol = 1e-8, int max_iter = 10000) {
  return solve(net, system_objective(net, f), tol, max_iter);
}

}  // namespace flowsense
