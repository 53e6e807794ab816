#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace gphit {

// Thrown when an iterative numerical procedure fails to reach its tolerance.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int subdivisions = 0;
};

// Adaptive Gauss-Kronrod (G7,K15) on [a, b]. Stops when the summed error
// estimate is below max(abs_tol, rel_tol * |value|). Throws numerical_error
// if the interval budget is exhausted first.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol = 1e-12, double rel_tol = 1e-10,
                     int max_intervals = 4000);

// Integral over [a, +inf) of a nonnegative, eventually-decreasing integrand.
// Integrates dyadically widening chunks and extrapolates the geometric tail.
QuadResult integrate_decaying(const std::function<double(double)>& f, double a,
                              double abs_tol = 1e-13, double rel_tol = 1e-10);

} // namespace gphit
