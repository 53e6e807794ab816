#include "gphit/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace gphit {

namespace {

// Kronrod-15 abscissae on [-1, 1] (positive half) and weights; the embedded
// Gauss-7 rule reuses the odd-index nodes. Standard QUADPACK constants.
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {0.129484966168870, 0.279705391489277,
                           0.381830050505119, 0.417959183673469};

struct Panel {
  double a, b, value, err;
  bool operator<(const Panel& o) const { return err < o.err; }
};

Panel evaluate_panel(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double resk = kWgk[7] * f(c);
  double resg = kWg[3] * f(c);
  for (int j = 0; j < 7; ++j) {
    const double fa = f(c - h * kXgk[j]);
    const double fb = f(c + h * kXgk[j]);
    resk += kWgk[j] * (fa + fb);
    if (j % 2 == 1) resg += kWg[j / 2] * (fa + fb);
  }
  Panel p;
  p.a = a;
  p.b = b;
  p.value = resk * h;
  p.err = std::fabs((resk - resg) * h);
  return p;
}

} // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol, double rel_tol, int max_intervals) {
  if (!(a <= b)) throw std::invalid_argument("integrate: a > b");
  if (a == b) return {0.0, 0.0, 0};
  std::priority_queue<Panel> panels;
  panels.push(evaluate_panel(f, a, b));
  double total = panels.top().value;
  double total_err = panels.top().err;
  int count = 1;
  while (total_err > std::max(abs_tol, rel_tol * std::fabs(total))) {
    if (count >= max_intervals)
      throw numerical_error(
          "integrate: interval budget exhausted, error estimate " +
          std::to_string(total_err));
    Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b)
      throw numerical_error("integrate: interval collapsed before tolerance");
    Panel left = evaluate_panel(f, worst.a, mid);
    Panel right = evaluate_panel(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.err + right.err - worst.err;
    panels.push(left);
    panels.push(right);
    ++count;
  }
  return {total, total_err, count};
}

QuadResult integrate_decaying(const std::function<double(double)>& f, double a,
                              double abs_tol, double rel_tol) {
  // Chunks [a + 2^k - 1, a + 2^{k+1} - 1); ratios of consecutive chunk values
  // estimate the geometric tail once the integrand settles into decay.
  double total = 0.0, err = 0.0;
  double prev_chunk = -1.0;
  double lo = a;
  double width = 1.0;
  for (int k = 0; k < 64; ++k) {
    const QuadResult chunk = integrate(f, lo, lo + width, abs_tol, rel_tol, 2000);
    total += chunk.value;
    err += chunk.error_estimate;
    const double tol = std::max(abs_tol, rel_tol * std::fabs(total));
    if (prev_chunk > 0.0 && chunk.value >= 0.0 && chunk.value < prev_chunk) {
      const double ratio = chunk.value / prev_chunk;
      if (ratio < 0.9) {
        const double tail = chunk.value * ratio / (1.0 - ratio);
        if (tail < tol) {
          total += tail;
          err += tail;
          return {total, err, k};
        }
      }
    }
    if (std::fabs(chunk.value) < tol * 1e-3) return {total, err, k};
    prev_chunk = chunk.value;
    lo += width;
    width *= 2.0;
  }
  throw numerical_error("integrate_decaying: tail did not settle");
}

} // namespace gphit
