#pragma once

// Independent oracles used to freeze expected values. Everything here is
// deliberately written against different algorithms than the library under
// test: plain adaptive Simpson instead of Gauss-Kronrod, closed forms,
// Jacobi eigenvalues instead of Cholesky pivots.

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace oracle {

inline double simpson_panel(const std::function<double(double)>& f, double a,
                            double b) {
  const double c = 0.5 * (a + b);
  return (b - a) * (f(a) + 4.0 * f(c) + f(b)) / 6.0;
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double eps, double whole, int depth) {
  const double c = 0.5 * (a + b);
  const double left = simpson_panel(f, a, c);
  const double right = simpson_panel(f, c, b);
  const double diff = left + right - whole;
  if (depth <= 0 || std::fabs(diff) < 15.0 * eps)
    return left + right + diff / 15.0;
  return adaptive_simpson(f, a, c, 0.5 * eps, left, depth - 1) +
         adaptive_simpson(f, c, b, 0.5 * eps, right, depth - 1);
}

inline double integrate_simpson(const std::function<double(double)>& f, double a,
                                double b, double eps = 1e-10) {
  return adaptive_simpson(f, a, b, eps, simpson_panel(f, a, b), 48);
}

// Standard normal CDF.
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// I = int_0^{1/2} y^{-1/2} (log(1/y))^{-1/2} dy = 2 sqrt(2 pi) (1 - Phi(sqrt(log 2)))
inline double i_half_closed_form() {
  return 2.0 * std::sqrt(2.0 * M_PI) * (1.0 - norm_cdf(std::sqrt(std::log(2.0))));
}

inline double i_half_adaptive_simpson() {
  // Integrate away from the singular endpoint and add the analytic stub
  // int_0^a ~ via the substitution-free tail handled by shrinking a.
  const auto f = [](double y) {
    return 1.0 / (std::sqrt(y) * std::sqrt(std::log(1.0 / y)));
  };
  double total = 0.0;
  double hi = 0.5;
  for (int k = 0; k < 60; ++k) {
    const double lo = hi / 16.0;
    total += integrate_simpson(f, lo, hi, 1e-12);
    hi = lo;
    if (hi < 1e-40) break;
  }
  return total;
}

// P(Brownian motion hits 0 during [a,b] starting from B(0)=0): arcsine law.
inline double bm_zero_hit_probability(double a, double b) {
  return 1.0 - (2.0 / M_PI) * std::asin(std::sqrt(a / b));
}

// Reflection-principle tail bound: P(sup_{[0,b]} |W| >= u) <= 4 P(W(b) >= u).
inline double bm_sup_tail_bound(double b, double u) {
  return 4.0 * (1.0 - norm_cdf(u / std::sqrt(b)));
}

// Logarithmic potential of the arcsine (equilibrium) measure on [0,1] at a
// point x = (1 - cos s)/2: U(x) = int log(1/|x - y|) dmu(y), integrated in
// the angle variable where the measure is uniform. The equilibrium property
// says U is identically log 4 on the support, so the K0-energy is 1 + log 4.
inline double arcsine_log_potential(double s) {
  const auto f = [s](double t) {
    return std::log(2.0 / std::fabs(std::cos(t) - std::cos(s)));
  };
  const double gap = 1e-12;  // integrable log singularity pinched at t = s
  return (integrate_simpson(f, 0.0, s - gap, 1e-9) +
          integrate_simpson(f, s + gap, M_PI, 1e-9)) /
         M_PI;
}

// Midpoint-rule estimate of the K0 double integral; converges like log(n)/n,
// good enough as a coarse cross-check of the potential identity above.
inline double arcsine_k0_energy(int n = 4000) {
  double sum = 0.0;
  const double h = M_PI / n;
  for (int i = 0; i < n; ++i) {
    const double ti = (i + 0.5) * h;
    for (int j = 0; j < n; ++j) {
      const double tj = (j + 0.5) * h;
      const double d = 0.5 * std::fabs(std::cos(ti) - std::cos(tj));
      if (d > 0.0) sum += 1.0 + std::log(1.0 / d);
    }
  }
  return sum / (static_cast<double>(n) * n);
}

// Smallest eigenvalue by cyclic Jacobi; fine for the modest matrices in tests.
inline double smallest_eigenvalue_jacobi(std::vector<double> a, std::size_t n,
                                         int sweeps = 60) {
  for (int s = 0; s < sweeps; ++s) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::fabs(a[p * n + q]);
    if (off < 1e-14) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (std::fabs(apq) < 1e-300) continue;
        const double theta = 0.5 * std::atan2(2.0 * apq, a[q * n + q] - a[p * n + p]);
        const double c = std::cos(theta), t = std::sin(theta);
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - t * akq;
          a[k * n + q] = t * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - t * aqk;
          a[q * n + k] = t * apk + c * aqk;
        }
      }
    }
  }
  double lam = a[0];
  for (std::size_t i = 1; i < n; ++i) lam = std::min(lam, a[i * n + i]);
  return lam;
}

} // namespace oracle
