#pragma once

#include <cmath>
#include <limits>

#include "rho/density.hpp"
#include "rho/quadrature.hpp"

namespace rho {

/// The bounded increasing link u -> (u-1)/sqrt(1+u^2) on [0, +inf],
/// with psi(+inf) = 1. Rejects negative and NaN arguments.
double psi(double u);

/// sqrt(t'(x)/t(x)) on the extended half-line, with 0/0 -> 1 and
/// (positive)/0 -> +inf, so that psi of the result follows the conventions.
double likelihood_ratio_sqrt(const CoordinateDensity& t, const CoordinateDensity& t_prime,
                             const Obs& x);

/// psi(sqrt(b2/a2)) computed from the square roots a = sqrt(t(x)),
/// b = sqrt(t'(x)): (b - a)/sqrt(a^2 + b^2), and 0 when both vanish.
/// Algebraically identical to psi(likelihood_ratio_sqrt(...)).
inline double psi_of_sqrt_pair(double a, double b) {
  const double den = a * a + b * b;
  double r = 0.0;
  if (den != 0.0) r = (b - a) / std::sqrt(den);
  return r;
}

struct AffinityOptions {
  double tol = 1e-9;
  long max_intervals = 100000;
};

/// Hellinger affinity rho(t, u) = integral of sqrt(t u). Uses closed-form
/// hooks when both densities expose one; otherwise exact summation (discrete)
/// or adaptive quadrature with tail-truncation accounting.
double hellinger_affinity(const CoordinateDensity& t, const CoordinateDensity& u,
                          const AffinityOptions& opt = {});

/// h^2(t, u) = 1 - rho(t, u).
double hellinger_sq(const CoordinateDensity& t, const CoordinateDensity& u,
                    const AffinityOptions& opt = {});

/// Sum of per-coordinate h^2 over a product pair; ranges over [0, n].
double product_hellinger_sq(const ProductDensity& t, const ProductDensity& u,
                            const AffinityOptions& opt = {});

/// rho(t, r) with r = (t + t')/2.
double mixture_affinity(const CoordinateDensity& t, const CoordinateDensity& t_prime,
                        const AffinityOptions& opt = {});

/// One coordinate's contribution to the deterministic part of the criterion
/// statistic: (1/2) [rho(t', r) - rho(t, r)], exactly zero for pairs with the
/// mixture symmetry property.
double deterministic_term(const CoordinateDensity& t, const CoordinateDensity& t_prime,
                          const AffinityOptions& opt = {});

/// Kullback-Leibler divergence of t from u; +inf when t is not absolutely
/// continuous w.r.t. u on the evaluation grid. Diagnostic only.
double kl_divergence(const CoordinateDensity& t, const CoordinateDensity& u,
                     const AffinityOptions& opt = {});

/// Integral / sum of the density; equals 1 for a valid density.
double total_mass(const CoordinateDensity& t, const AffinityOptions& opt = {});

/// Initial subdivision points for integrals against the given densities over
/// [lo, hi]: their kinks, their high-mass cores, and a geometric ladder from
/// the cores out to the window ends so heavy tails are never skipped over.
std::vector<double> integration_seeds(const std::vector<const CoordinateDensity*>& ds, double lo,
                                      double hi);

}  // namespace rho
