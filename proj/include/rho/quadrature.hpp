#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rho {

/// Thrown when an integral cannot be resolved to the requested tolerance
/// within the interval budget. Carries the best value and its error estimate.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double value, double error_estimate)
      : std::runtime_error(what), value(value), error_estimate(error_estimate) {}
  double value;
  double error_estimate;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;   // accumulated error estimate, incl. any truncation bound
  long intervals = 0;
};

struct QuadOptions {
  double abs_tol = 1e-9;
  long max_intervals = 100000;
  bool throw_on_failure = true;
};

/// Adaptive Gauss-Kronrod (G7,K15) on a finite interval.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadOptions& opt = {});

/// Same, but the initial subdivision is forced at the given breakpoints
/// (support endpoints, density kinks). Breakpoints outside (a,b) are ignored.
QuadResult integrate_with_breakpoints(const std::function<double(double)>& f, double a, double b,
                                      const std::vector<double>& breakpoints,
                                      const QuadOptions& opt = {});

}  // namespace rho
