#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "flowsense/errors.hpp"
#include "flowsense/network.hpp"
#include "flowsense/rng.hpp"

namespace flowsense {

/// One Gaussian attack hypothesis: per-link means and standard
/// deviations of the additive falsification a.
struct AttackType {
  int id = 0;
  std::vector<double> mu;
  std::vector<double> sigma;

  void validate() const {
    if (mu.size() != sigma.size())
      throw ValidationError("attack type " + std::to_string(id) + ": mu/sigma size mismatch");
    for (double s : sigma)
      if (s <= 0.0)
        throw ValidationError("attack type " + std::to_string(id) + ": sigma must be > 0");
  }
};

/// Ordered subset of link ids acting as a 0/1 selection matrix
/// (one row per selected link).
struct SelectionMatrix {
  std::vector<int> rows;  // strictly increasing link ids

  int size() const { return static_cast<int>(rows.size()); }

  void validate(int num_links) const {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i] < 0 || rows[i] >= num_links)
        throw ValidationError("selection: link id out of range");
      if (i > 0 && rows[i] <= rows[i - 1])
        throw ValidationError("selection: link ids must be strictly increasing");
    }
  }
};

/// Projection S a ~ N(xi, Lambda) of an attack type onto a selected
/// link set; covariances are diagonal throughout.
struct ProjectedGaussian {
  std::vector<double> xi;
  std::vector<double> lambda_diag;  // variances, sigma^2 per selected link
};

/// Builds the zone-localized attack set: type i inflates the links of
/// group i by mean_scale * capacity, with std dev rel_std * capacity on
/// every link.
inline std::vector<AttackType> make_zone_attack_types(
    const Partition& partition, const std::vector<double>& capacity,
    double mean_scale, double rel_std) {
  // mean_scale 0 is tolerated: it yields indistinguishable all-zero
  // hypotheses, which the difference matrix downstream flags as 0.
  if (mean_scale < 0.0) throw ValidationError("mean_scale must be >= 0");
  if (rel_std <= 0.0) throw ValidationError("rel_std must be > 0");
  const int n_l = static_cast<int>(capacity.size());
  std::vector<AttackType> types;
  types.reserve(partition.groups.size());
  for (int i = 0; i < partition.num_groups(); ++i) {
    if (partition.groups[i].empty())
      throw ValidationError("group " + std::to_string(i) +
                            " is empty: zero-information hypothesis");
    AttackType t;
    t.id = i;
    t.mu.assign(n_l, 0.0);
    t.sigma.resize(n_l);
    for (int l : partition.groups[i]) {
      if (l < 0 || l >= n_l) throw ValidationError("group link id out of range");
      t.mu[l] = mean_scale * capacity[l];
    }
    for (int l = 0; l < n_l; ++l) t.sigma[l] = rel_std * capacity[l];
    t.validate();
    types.push_back(std::move(t));
  }
  return types;
}

/// Independent per-link Gaussian draw of one attack vector.
/// force_mean returns mu exactly (the sigma -> 0 limit).
inline std::vector<double> sample_attack(const AttackType& type, RngStream& rng,
                                         bool force_mean = false) {
  std::vector<double> a(type.mu.size());
  if (force_mean) {
    std::copy(type.mu.begin(), type.mu.end(), a.begin());
    return a;
  }
  for (std::size_t j = 0; j < a.size(); ++j)
    a[j] = rng.gaussian(type.mu[j], type.sigma[j]);
  return a;
}

/// Restriction of a type onto a selected link set: xi = S mu and
/// Lambda = S diag(sigma (.) sigma) S^T, kept as its diagonal.
inline ProjectedGaussian project(const AttackType& type, const SelectionMatrix& sel) {
  if (sel.rows.empty()) throw ValidationError("project: empty selection");
  sel.validate(static_cast<int>(type.mu.size()));
  ProjectedGaussian g;
  g.xi.reserve(sel.rows.size());
  g.lambda_diag.reserve(sel.rows.size());
  for (int l : sel.rows) {
    g.xi.push_back(type.mu[l]);
    g.lambda_diag.push_back(type.sigma[l] * type.sigma[l]);
  }
  return g;
}

/// Number of links where mu exceeds the attacked ambient flow f_hat,
/// i.e. where the hypothesis would imply negative true traffic. Used
/// to surface feasibility warnings rather than hard errors.
inline int feasibility_violations(const AttackType& type,
                                  const std::vector<double>& f_hat) {
  int count = 0;
  for (std::size_t j = 0; j < type.mu.size() && j < f_hat.size(); ++j)
    if (type.mu[j] > f_hat[j]) ++count;
  return count;
}

}  // namespace flowsense
