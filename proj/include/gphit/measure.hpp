#pragma once

#include <cstddef>
#include <vector>

#include "gphit/exec.hpp"
#include "gphit/potential.hpp"

namespace gphit {

// Weighted point set standing in for a probability measure; each atom carries
// the radius of the cell it represents, which prices the diagonal of the
// discrete energy.
struct DiscreteMeasure {
  std::vector<std::vector<double>> points;
  std::vector<double> weights;
  std::vector<double> cell_radius;

  DiscreteMeasure() = default;
  DiscreteMeasure(std::vector<std::vector<double>> pts, std::vector<double> w,
                  std::vector<double> radii);

  std::size_t size() const { return points.size(); }
};

struct EnergyBreakdown {
  double total = 0.0;         // off-diagonal + diagonal cells
  double off_diagonal = 0.0;  // transfinite-diameter style estimate
  double diagonal = 0.0;
};

// E(mu) = sum_{i != j} w_i w_j K(|x_i - x_j|) + sum_i w_i^2 K(cell_radius_i).
// Unbounded kernels with a zero cell radius yield an infinite total (no throw).
EnergyBreakdown energy_breakdown(const DiscreteMeasure& mu,
                                 const KernelOrGauge& kernel,
                                 Exec exec = Exec::OpenMP);
double energy(const DiscreteMeasure& mu, const KernelOrGauge& kernel,
              Exec exec = Exec::OpenMP);

struct CapacityResult {
  double capacity = 0.0;  // 1 / min energy, with 1/inf = 0
  DiscreteMeasure equilibrium;
  double min_energy = 0.0;
  double off_diagonal_energy = 0.0;  // at the minimizer
  bool converged = false;
  std::size_t iterations = 0;
  double duality_gap = 0.0;
};

// Minimizes the quadratic energy over the weight simplex by Frank-Wolfe with
// exact line search, keeping the gradient incrementally. Stops at the duality
// gap tolerance or the iteration cap, whichever first.
CapacityResult capacity_estimate(const std::vector<std::vector<double>>& points,
                                 const std::vector<double>& cell_radius,
                                 const KernelOrGauge& kernel, double tol = 1e-8,
                                 std::size_t max_iterations = 100000,
                                 Exec exec = Exec::OpenMP);

// Chebyshev-clustered points on [lo, hi] with Voronoi cell radii; the natural
// discretization of a segment for equilibrium-measure work.
void chebyshev_segment(std::size_t n, double lo, double hi,
                       std::vector<std::vector<double>>& points,
                       std::vector<double>& cell_radius);

} // namespace gphit
