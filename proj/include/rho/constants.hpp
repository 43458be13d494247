#pragma once

#include <cmath>

namespace rho {

/// Numerical constants used by the estimation criterion and the penalties.
/// They are interdependent; only kappa is a free choice.
struct Constants {
  double c0;        // (1 - 1/sqrt(2)) / 8
  double c1;        // 2 (7 + 4 sqrt(2))
  double c1_prime;  // 2 (c1 - 1)
  double c2;        // 1 + 1/sqrt(2)
  double kappa;     // 357
  double c3;        // 8 c2 kappa
  double c4;        // 2.5 c3

  static const Constants& get() {
    static const Constants k = [] {
      Constants c;
      const double r2 = std::sqrt(2.0);
      c.c0 = (1.0 - 1.0 / r2) / 8.0;
      c.c1 = 2.0 * (7.0 + 4.0 * r2);
      c.c1_prime = 2.0 * (c.c1 - 1.0);
      c.c2 = 1.0 + 1.0 / r2;
      c.kappa = 357.0;
      c.c3 = 8.0 * c.c2 * c.kappa;
      c.c4 = 2.5 * c.c3;
      return c;
    }();
    return k;
  }

  /// Slack used when forming the near-minimizer set of the criterion.
  static double criterion_slack() { return get().kappa / 10.0; }
};

}  // namespace rho
