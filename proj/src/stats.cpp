#include "gphit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gphit {

double pairwise_sum(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n <= 32) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

WilsonInterval wilson_interval(std::size_t hits, std::size_t trials, double z) {
  if (trials == 0) throw std::invalid_argument("wilson_interval: zero trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(hits) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  double lo = std::max(0.0, center - half);
  double hi = std::min(1.0, center + half);
  if (hits == 0) lo = 0.0;
  if (hits == trials) hi = 1.0;
  return {p, lo, hi};
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line: need >= 2 matching points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  if (det == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LineFit f;
  f.slope = (n * sxy - sx * sy) / det;
  f.intercept = (sy - f.slope * sx) / n;
  double rss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.slope * x[i] + f.intercept);
    rss += r * r;
  }
  f.rms_residual = std::sqrt(rss / n);
  return f;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0.0 || y[i] <= 0.0)
      throw std::domain_error("loglog_slope: nonpositive sample");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return fit_line(lx, ly).slope;
}

std::vector<double> fit_least_squares(std::size_t n, std::size_t k,
                                      std::span<const double> design,
                                      std::span<const double> y) {
  if (design.size() != n * k || y.size() != n || n < k)
    throw std::invalid_argument("fit_least_squares: shape mismatch");
  // Normal equations with Gaussian elimination; k is tiny here.
  std::vector<double> ata(k * k, 0.0), aty(k, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < k; ++i) {
      aty[i] += design[r * k + i] * y[r];
      for (std::size_t j = 0; j < k; ++j)
        ata[i * k + j] += design[r * k + i] * design[r * k + j];
    }
  }
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < k; ++r)
      if (std::fabs(ata[r * k + col]) > std::fabs(ata[piv * k + col])) piv = r;
    if (ata[piv * k + col] == 0.0)
      throw std::invalid_argument("fit_least_squares: singular system");
    if (piv != col) {
      for (std::size_t j = 0; j < k; ++j) std::swap(ata[piv * k + j], ata[col * k + j]);
      std::swap(aty[piv], aty[col]);
    }
    for (std::size_t r = 0; r < k; ++r) {
      if (r == col) continue;
      const double f = ata[r * k + col] / ata[col * k + col];
      for (std::size_t j = col; j < k; ++j) ata[r * k + j] -= f * ata[col * k + j];
      aty[r] -= f * aty[col];
    }
  }
  std::vector<double> beta(k);
  for (std::size_t i = 0; i < k; ++i) beta[i] = aty[i] / ata[i * k + i];
  return beta;
}

namespace {

double power_offset_rss(std::span<const double> L, std::span<const double> v,
                        double p, double* scale, double* offset) {
  const std::size_t n = L.size();
  std::vector<double> design(n * 2);
  for (std::size_t i = 0; i < n; ++i) {
    design[i * 2] = std::pow(L[i], p);
    design[i * 2 + 1] = 1.0;
  }
  const auto beta = fit_least_squares(n, 2, design, v);
  double rss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = v[i] - (beta[0] * design[i * 2] + beta[1]);
    rss += r * r;
  }
  if (scale) *scale = beta[0];
  if (offset) *offset = beta[1];
  return rss;
}

} // namespace

PowerOffsetFit fit_power_with_offset(std::span<const double> L,
                                     std::span<const double> v, double p_min,
                                     double p_max) {
  if (L.size() != v.size() || L.size() < 4)
    throw std::invalid_argument("fit_power_with_offset: need >= 4 points");
  for (double l : L)
    if (l <= 1.0) throw std::domain_error("fit_power_with_offset: L must be > 1");

  // Coarse scan in log(p), then golden-section refinement.
  const int coarse = 160;
  double best_p = p_min, best_rss = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= coarse; ++i) {
    const double p =
        p_min * std::pow(p_max / p_min, static_cast<double>(i) / coarse);
    const double rss = power_offset_rss(L, v, p, nullptr, nullptr);
    if (rss < best_rss) {
      best_rss = rss;
      best_p = p;
    }
  }
  const double step = std::pow(p_max / p_min, 1.0 / coarse);
  double lo = best_p / step, hi = best_p * step;
  const double gr = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = power_offset_rss(L, v, c, nullptr, nullptr);
  double fd = power_offset_rss(L, v, d, nullptr, nullptr);
  for (int it = 0; it < 80; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = power_offset_rss(L, v, c, nullptr, nullptr);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = power_offset_rss(L, v, d, nullptr, nullptr);
    }
  }
  PowerOffsetFit fit;
  fit.exponent = 0.5 * (a + b);
  const double rss =
      power_offset_rss(L, v, fit.exponent, &fit.scale, &fit.offset);
  fit.rms_residual = std::sqrt(rss / static_cast<double>(L.size()));
  return fit;
}

} // namespace gphit
