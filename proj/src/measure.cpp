#include "gphit/measure.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "gphit/stats.hpp"

namespace gphit {

namespace {

double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return std::sqrt(s);
}

double kernel_at(const KernelOrGauge& kernel, double r) {
  if (r <= 0.0) return kernel.limit_at_zero();
  return kernel(r);
}

} // namespace

DiscreteMeasure::DiscreteMeasure(std::vector<std::vector<double>> pts,
                                 std::vector<double> w,
                                 std::vector<double> radii)
    : points(std::move(pts)), weights(std::move(w)), cell_radius(std::move(radii)) {
  if (points.size() != weights.size() || points.size() != cell_radius.size())
    throw std::invalid_argument("DiscreteMeasure: length mismatch");
  if (points.empty()) throw std::invalid_argument("DiscreteMeasure: empty");
  const std::size_t dim = points.front().size();
  double wsum = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != dim)
      throw std::invalid_argument("DiscreteMeasure: mixed dimensions");
    if (weights[i] < 0.0)
      throw std::invalid_argument("DiscreteMeasure: negative weight");
    wsum += weights[i];
  }
  if (std::fabs(wsum - 1.0) > 1e-12)
    throw std::invalid_argument("DiscreteMeasure: weights must sum to 1");
}

EnergyBreakdown energy_breakdown(const DiscreteMeasure& mu,
                                 const KernelOrGauge& kernel, Exec exec) {
  if (kernel.kind() != KernelOrGauge::Kind::CapacityKernel)
    throw std::invalid_argument("energy: needs a capacity kernel");
  const std::size_t n = mu.size();
  std::vector<double> row_off(n, 0.0), diag(n, 0.0);

  // Each row is summed by one thread in index order, then rows are combined
  // with a fixed pairwise tree: results do not depend on the thread count.
  if (exec == Exec::OpenMP) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t si = 0; si < static_cast<std::ptrdiff_t>(n); ++si) {
      const std::size_t i = static_cast<std::size_t>(si);
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        acc += mu.weights[i] * mu.weights[j] *
               kernel_at(kernel, distance(mu.points[i], mu.points[j]));
      }
      row_off[i] = acc;
      diag[i] = mu.weights[i] * mu.weights[i] *
                kernel_at(kernel, mu.cell_radius[i]);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        acc += mu.weights[i] * mu.weights[j] *
               kernel_at(kernel, distance(mu.points[i], mu.points[j]));
      }
      row_off[i] = acc;
      diag[i] = mu.weights[i] * mu.weights[i] *
                kernel_at(kernel, mu.cell_radius[i]);
    }
  }
  EnergyBreakdown e;
  e.off_diagonal = pairwise_sum(row_off);
  e.diagonal = pairwise_sum(diag);
  e.total = e.off_diagonal + e.diagonal;
  return e;
}

double energy(const DiscreteMeasure& mu, const KernelOrGauge& kernel, Exec exec) {
  return energy_breakdown(mu, kernel, exec).total;
}

CapacityResult capacity_estimate(const std::vector<std::vector<double>>& points,
                                 const std::vector<double>& cell_radius,
                                 const KernelOrGauge& kernel, double tol,
                                 std::size_t max_iterations, Exec exec) {
  const std::size_t n = points.size();
  if (n == 0) throw std::invalid_argument("capacity_estimate: no points");
  if (cell_radius.size() != n)
    throw std::invalid_argument("capacity_estimate: radius length mismatch");
  if (kernel.kind() != KernelOrGauge::Kind::CapacityKernel)
    throw std::invalid_argument("capacity_estimate: needs a capacity kernel");

  // Dense symmetric kernel matrix Q; Q_ii prices the atom's own cell.
  std::vector<double> Q(n * n);
  bool finite = true;
  if (exec == Exec::OpenMP) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t si = 0; si < static_cast<std::ptrdiff_t>(n); ++si) {
      const std::size_t i = static_cast<std::size_t>(si);
      for (std::size_t j = i; j < n; ++j) {
        const double v = (i == j) ? kernel_at(kernel, cell_radius[i])
                                  : kernel_at(kernel, distance(points[i], points[j]));
        Q[i * n + j] = v;
        Q[j * n + i] = v;
      }
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        const double v = (i == j) ? kernel_at(kernel, cell_radius[i])
                                  : kernel_at(kernel, distance(points[i], points[j]));
        Q[i * n + j] = v;
        Q[j * n + i] = v;
      }
    }
  }
  for (double v : Q)
    if (!std::isfinite(v)) finite = false;

  CapacityResult res;
  if (!finite) {
    // Unbounded kernel with a zero cell: every admissible measure has
    // infinite energy here, so the capacity is 1/inf = 0.
    res.capacity = 0.0;
    res.min_energy = std::numeric_limits<double>::infinity();
    return res;
  }

  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<double> grad(n, 0.0);  // (Qw)_i
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += Q[i * n + j] * w[j];
    grad[i] = acc;
  }

  double gap = std::numeric_limits<double>::infinity();
  std::size_t it = 0;
  for (; it < max_iterations; ++it) {
    // Linear minimization over the simplex: all mass on the smallest gradient.
    std::size_t best = 0;
    double best_g = grad[0];
    double wg = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      wg += w[i] * grad[i];
      if (grad[i] < best_g) {
        best_g = grad[i];
        best = i;
      }
    }
    gap = 2.0 * (wg - best_g);
    if (gap <= tol) break;

    // Exact line search toward e_best for the quadratic form.
    // f((1-s)w + s e) has optimum s = (wg - best_g) / (wg - 2 best_g + Q_ee).
    const double qee = Q[best * n + best];
    const double denom = wg - 2.0 * grad[best] + qee;
    double s = denom > 0.0 ? (wg - grad[best]) / denom : 1.0;
    s = std::min(1.0, std::max(1e-12, s));

    for (std::size_t i = 0; i < n; ++i) {
      w[i] *= (1.0 - s);
      grad[i] = (1.0 - s) * grad[i] + s * Q[i * n + best];
    }
    w[best] += s;
  }
  res.converged = gap <= tol;
  res.iterations = it;
  res.duality_gap = gap;

  // Renormalize against drift and report through the honest energy path.
  double wsum = 0.0;
  for (double x : w) wsum += x;
  for (double& x : w) x /= wsum;
  DiscreteMeasure eq(points, w, cell_radius);
  const EnergyBreakdown e = energy_breakdown(eq, kernel, exec);
  res.equilibrium = std::move(eq);
  res.min_energy = e.total;
  res.off_diagonal_energy = e.off_diagonal;
  res.capacity = std::isinf(e.total) ? 0.0 : 1.0 / e.total;
  return res;
}

void chebyshev_segment(std::size_t n, double lo, double hi,
                       std::vector<std::vector<double>>& points,
                       std::vector<double>& cell_radius) {
  if (n < 2) throw std::invalid_argument("chebyshev_segment: need n >= 2");
  points.assign(n, {0.0});
  std::vector<double> xs(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double theta = M_PI * (static_cast<double>(k) + 0.5) / static_cast<double>(n);
    xs[k] = lo + (hi - lo) * 0.5 * (1.0 - std::cos(theta));
  }
  for (std::size_t k = 0; k < n; ++k) points[k][0] = xs[k];
  cell_radius.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double left = (k == 0) ? (xs[0] - lo) : 0.5 * (xs[k] - xs[k - 1]);
    const double right = (k + 1 == n) ? (hi - xs[n - 1]) : 0.5 * (xs[k + 1] - xs[k]);
    cell_radius[k] = 0.5 * (left + right);
  }
}

} // namespace gphit
