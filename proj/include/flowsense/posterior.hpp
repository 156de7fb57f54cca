#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "flowsense/allocate.hpp"
#include "flowsense/attack.hpp"
#include "flowsense/errors.hpp"
#include "flowsense/network.hpp"
#include "flowsense/solver.hpp"

namespace flowsense {

/// Attack values observed on the sensed links: o = E a.
struct Observation {
  SelectionMatrix sensed;
  std::vector<double> o;

  void validate(int num_links) const {
    sensed.validate(num_links);
    if (o.size() != sensed.rows.size())
      throw ValidationError("observation: o size does not match sensed links");
  }
};

struct PosteriorWeights {
  std::vector<double> omega;  // nonnegative, sums to 1
};

/// Sorted union of the links of the selected subnetworks.
inline SelectionMatrix sensed_links(const Allocation& alloc,
                                    const Partition& partition) {
  if (alloc.x.size() != partition.groups.size())
    throw ValidationError("sensed_links: allocation/partition size mismatch");
  SelectionMatrix sel;
  for (std::size_t j = 0; j < alloc.x.size(); ++j)
    if (alloc.x[j] > 0)
      sel.rows.insert(sel.rows.end(), partition.groups[j].begin(),
                      partition.groups[j].end());
  std::sort(sel.rows.begin(), sel.rows.end());
  return sel;
}

/// Type weights proportional to the Gaussian likelihood of the
/// observation, evaluated in log space and normalized with the
/// log-sum-exp shift. An empty observation yields uniform weights.
inline PosteriorWeights likelihood_weights(const Observation& obs,
                                           const std::vector<AttackType>& types) {
  const int n_a = static_cast<int>(types.size());
  if (n_a < 1) throw ValidationError("likelihood_weights: no attack types");
  if (obs.o.size() != obs.sensed.rows.size())
    throw ValidationError("likelihood_weights: observation size mismatch");
  PosteriorWeights out;
  if (obs.sensed.rows.empty()) {
    out.omega.assign(n_a, 1.0 / n_a);
    return out;
  }

  constexpr double log_two_pi = 1.8378770664093453;
  std::vector<double> logw(n_a, 0.0);
  for (int i = 0; i < n_a; ++i) {
    const AttackType& t = types[i];
    double acc = 0.0;
    for (std::size_t k = 0; k < obs.sensed.rows.size(); ++k) {
      const int l = obs.sensed.rows[k];
      const double s2 = t.sigma.at(l) * t.sigma.at(l);
      if (s2 <= 0.0)
        throw ValidationError("likelihood_weights: zero variance on sensed link " +
                              std::to_string(l));
      const double r = obs.o[k] - t.mu[l];
      acc += r * r / s2 + std::log(s2) + log_two_pi;
    }
    logw[i] = -0.5 * acc;
  }

  const double shift = *std::max_element(logw.begin(), logw.end());
  double total = 0.0;
  out.omega.resize(n_a);
  for (int i = 0; i < n_a; ++i) {
    out.omega[i] = std::exp(logw[i] - shift);
    total += out.omega[i];
  }
  for (double& w : out.omega) w /= total;
  return out;
}

/// Mixed objective of the post-sensing routing program: sensed links
/// use the exact cost at the revealed ambient flow f_hat - a, unsensed
/// links the omega-weighted combination of the per-type expected
/// costs. mu_tilde is clamped at zero exactly as in
/// best_response_objective, so the one-hot / empty-observation case
/// collapses to the corresponding best response.
inline LinkObjective post_sensing_objective(const Network& net,
                                            const std::vector<double>& f_hat,
                                            const Observation& obs,
                                            const PosteriorWeights& weights,
                                            const std::vector<AttackType>& types) {
  if (f_hat.size() != net.links.size())
    throw ValidationError("post_sensing_objective: f_hat dimension mismatch");
  if (weights.omega.size() != types.size())
    throw ValidationError("post_sensing_objective: omega/type count mismatch");
  obs.validate(net.num_links());
  double total = 0.0;
  for (double w : weights.omega) {
    if (w < 0.0) throw ValidationError("post_sensing_objective: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-6)
    throw ValidationError("post_sensing_objective: weights must sum to 1");

  std::vector<double> observed_attack(net.links.size(), 0.0);
  std::vector<char> is_sensed(net.links.size(), 0);
  for (std::size_t k = 0; k < obs.sensed.rows.size(); ++k) {
    is_sensed[obs.sensed.rows[k]] = 1;
    observed_attack[obs.sensed.rows[k]] = obs.o[k];
  }

  LinkObjective obj;
  obj.link.resize(net.links.size());
  for (std::size_t j = 0; j < net.links.size(); ++j) {
    ExpectedCostParams p;
    p.b = net.links[j].b;
    p.w = net.links[j].w;
    p.c = net.links[j].c;
    if (is_sensed[j]) {
      p.mu_tilde = std::min(observed_attack[j] - f_hat[j], 0.0);
      p.sigma = 0.0;
      obj.link[j] = poly_coefficients(p);
    } else {
      PolyCoeffs mixed;
      for (std::size_t i = 0; i < types.size(); ++i) {
        p.mu_tilde = std::min(types[i].mu[j] - f_hat[j], 0.0);
        p.sigma = types[i].sigma[j];
        const PolyCoeffs ci = poly_coefficients(p);
        for (int k = 1; k <= 5; ++k) mixed.zeta[k] += weights.omega[i] * ci.zeta[k];
      }
      obj.link[j] = mixed;
    }
  }
  return obj;
}

inline RoutingSolution post_sensing_routing(const Network& net,
                                            const std::vector<double>& f_hat,
                                            const Observation& obs,
                                            const PosteriorWeights& weights,
                                            const std::vector<AttackType>& types,
                                            double tol = 1e-8,
                                            int max_iter = 10000) {
  return solve(net, post_sensing_objective(net, f_hat, obs, weights, types),
               tol, max_iter);
}

}  // namespace flowsense
