#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gphit {

// Summation with a fixed pairwise reduction tree, so results do not depend on
// thread count or accumulation order at call sites.
double pairwise_sum(std::span<const double> values);

struct WilsonInterval {
  double p_hat = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

// 95% Wilson score interval by default (z = Phi^{-1}(0.975)).
WilsonInterval wilson_interval(std::size_t hits, std::size_t trials,
                               double z = 1.959963984540054);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

// Slope of log(y) against log(x); all entries must be positive.
double loglog_slope(std::span<const double> x, std::span<const double> y);

// Least squares with caller-supplied regressor columns (row-major design
// matrix, n rows, k columns). Returns the k coefficients. Small k only.
std::vector<double> fit_least_squares(std::size_t n, std::size_t k,
                                      std::span<const double> design,
                                      std::span<const double> y);

// Fits v ~ A * L^p + B over p by profiling: for each candidate p the (A, B)
// pair is solved linearly, and p minimizes the residual. Used to read off the
// exponent of kernels/potentials that behave like a power of log(1/x) with an
// additive offset from the finite integration window. L entries must be > 1.
struct PowerOffsetFit {
  double exponent = 0.0;
  double scale = 0.0;
  double offset = 0.0;
  double rms_residual = 0.0;
};

PowerOffsetFit fit_power_with_offset(std::span<const double> L,
                                     std::span<const double> v,
                                     double p_min = 0.02, double p_max = 8.0);

} // namespace gphit
