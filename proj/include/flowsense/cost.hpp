#pragma once

#include <array>
#include <cmath>

namespace flowsense {

/// Per-link parameters of the expected quartic (BPR) cost under a
/// Gaussian attack hypothesis N(mu, sigma^2) on the reported flow.
/// mu_tilde is the attack mean minus the reported ambient flow; for a
/// link whose true ambient flow f is known exactly, set sigma = 0 and
/// mu_tilde = -f.
struct ExpectedCostParams {
  double b = 0.0;         // nominal travel cost at zero volume
  double w = 0.0;         // congestion weight
  double c = 1.0;         // nominal capacity, > 0
  double mu_tilde = 0.0;  // shifted attack mean
  double sigma = 0.0;     // attack std dev, >= 0
};

/// Coefficients zeta[1..5] of the per-link objective contribution
/// sum_k zeta[k] * y^k, identically equal to y * psi(y). zeta[0] is
/// kept zero so indices match the exponent.
struct PolyCoeffs {
  std::array<double, 6> zeta{};

  double eval(double y) const {
    // Horner; capacities run to ~1e4 so the nested form matters.
    double acc = zeta[5];
    for (int k = 4; k >= 1; --k) acc = acc * y + zeta[k];
    return acc * y;
  }

  double derivative(double y) const {
    double acc = 5.0 * zeta[5];
    for (int k = 4; k >= 1; --k) acc = acc * y + k * zeta[k];
    return acc;
  }

  double second_derivative(double y) const {
    double acc = 20.0 * zeta[5];
    for (int k = 4; k >= 2; --k) acc = acc * y + k * (k - 1) * zeta[k];
    return acc;
  }
};

/// Plain BPR link cost b + w*((f+y)/c)^4 for deterministic ambient flow f.
inline double bpr_cost(double y, double f, const ExpectedCostParams& p) {
  const double r = (f + y) / p.c;
  const double r2 = r * r;
  return p.b + p.w * r2 * r2;
}

/// Expected link cost psi(y) = E[phi(y + f_hat - a)] with
/// a ~ N(mu, sigma^2). Uses the exact Gaussian fourth moment:
/// for m = y - mu_tilde, E[X^4] = m^4 + 6 m^2 sigma^2 + 3 sigma^4.
inline double expected_link_cost(double y, const ExpectedCostParams& p) {
  const double m = y - p.mu_tilde;
  const double m2 = m * m;
  const double s2 = p.sigma * p.sigma;
  const double c2 = p.c * p.c;
  const double c4 = c2 * c2;
  return p.b + (p.w / c4) * (m2 * m2 + 6.0 * m2 * s2 + 3.0 * s2 * s2);
}

/// Expands y * psi(y) into polynomial coefficients. The identity
/// sum_k zeta[k] y^k == y * expected_link_cost(y) holds for all y.
inline PolyCoeffs poly_coefficients(const ExpectedCostParams& p) {
  const double mt = p.mu_tilde;
  const double mt2 = mt * mt;
  const double s2 = p.sigma * p.sigma;
  const double c2 = p.c * p.c;
  const double wc4 = p.w / (c2 * c2);

  PolyCoeffs out;
  out.zeta[1] = p.b + wc4 * (mt2 * mt2 + 6.0 * mt2 * s2 + 3.0 * s2 * s2);
  out.zeta[2] = -4.0 * wc4 * (mt2 * mt + 3.0 * mt * s2);
  out.zeta[3] = 6.0 * wc4 * (mt2 + s2);
  out.zeta[4] = -4.0 * wc4 * mt;
  out.zeta[5] = wc4;
  return out;
}

/// d/dy [y * psi(y)], the marginal total cost used as the gradient of
/// the routing objective.
inline double objective_derivative(double y, const ExpectedCostParams& p) {
  return poly_coefficients(p).derivative(y);
}

/// True if the polynomial is convex on [0, y_max] up to a small
/// relative slack. The second derivative is a cubic, so its extrema
/// are located exactly from the roots of the (quadratic) third
/// derivative and no sampling grid is needed.
inline bool convex_on_range(const PolyCoeffs& poly, double y_max) {
  double candidates[4] = {0.0, y_max, -1.0, -1.0};
  const double qa = 60.0 * poly.zeta[5];
  const double qb = 24.0 * poly.zeta[4];
  const double qc = 6.0 * poly.zeta[3];
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc >= 0.0 && qa != 0.0) {
    const double sq = std::sqrt(disc);
    candidates[2] = (-qb - sq) / (2.0 * qa);
    candidates[3] = (-qb + sq) / (2.0 * qa);
  }
  double lo = 0.0;
  double scale = 1.0;
  for (double y : candidates) {
    if (y < 0.0 || y > y_max) continue;
    const double dd = poly.second_derivative(y);
    lo = std::min(lo, dd);
    scale = std::max(scale, std::abs(dd));
  }
  return lo >= -1e-9 * scale;
}

}  // namespace flowsense
