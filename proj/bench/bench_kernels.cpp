// Timing harness for the data-parallel kernels: path sampling, the energy
// double sum, and per-path hit detection. Each kernel runs in its serial
// reference form and with OpenMP; outputs must match bit for bit.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <omp.h>
#include <vector>

#include "gphit/hitting.hpp"
#include "gphit/measure.hpp"
#include "gphit/potential.hpp"
#include "gphit/simulate.hpp"
#include "gphit/variance.hpp"

using namespace gphit;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(const char* name, double serial_s, double omp_s, bool identical) {
  std::printf("%-18s serial %8.3f s   openmp %8.3f s   speedup %5.2fx   %s\n",
              name, serial_s, omp_s, serial_s / omp_s,
              identical ? "bit-identical" : "MISMATCH");
}

} // namespace

int main(int argc, char** argv) {
  bool quick = false;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--quick") == 0) quick = true;

  const std::size_t n_paths = quick ? 2000 : 20000;
  const std::size_t m = quick ? 512 : 2048;
  const std::size_t energy_n = quick ? 512 : 1500;

  std::printf("threads available: %d\n", omp_get_max_threads());

  // Path sampling through the non-constant Volterra factor (true convolution).
  const auto model = VarianceModel::power_log(0.3, 0.0);
  const auto times = uniform_grid(0.3, m);
  const auto factor = volterra_factor(model, times);
  auto t0 = Clock::now();
  const auto serial = sample_paths(factor, 1, n_paths, 7, Exec::Serial);
  const double sample_serial = seconds_since(t0);
  t0 = Clock::now();
  const auto parallel = sample_paths(factor, 1, n_paths, 7, Exec::OpenMP);
  const double sample_omp = seconds_since(t0);
  report("sample_paths", sample_serial, sample_omp,
         serial.values == parallel.values);

  // Energy double sum.
  std::vector<std::vector<double>> pts;
  std::vector<double> rad;
  chebyshev_segment(energy_n, 0.0, 1.0, pts, rad);
  std::vector<double> w(energy_n, 1.0 / static_cast<double>(energy_n));
  DiscreteMeasure mu(pts, w, rad);
  const auto k0 = newtonian_kernel(0.0);
  t0 = Clock::now();
  double e_serial = 0.0;
  for (int rep = 0; rep < 5; ++rep) e_serial = energy(mu, k0, Exec::Serial);
  const double energy_serial = seconds_since(t0);
  t0 = Clock::now();
  double e_omp = 0.0;
  for (int rep = 0; rep < 5; ++rep) e_omp = energy(mu, k0, Exec::OpenMP);
  const double energy_omp = seconds_since(t0);
  report("energy", energy_serial, energy_omp, e_serial == e_omp);

  // MC hit estimation end to end (sampling + detection + reduction).
  ProcessSpec spec(VarianceModel::power_log(0.5, 0.0), 1);
  const auto target = TargetSet::point({0.0}, 1.0);
  const int grid_k = quick ? 9 : 11;
  t0 = Clock::now();
  const auto est_serial = mc_hit_probability(spec, target, 0.1, 0.2, grid_k,
                                             n_paths, 7, 3.0, Exec::Serial);
  const double hit_serial = seconds_since(t0);
  t0 = Clock::now();
  const auto est_omp = mc_hit_probability(spec, target, 0.1, 0.2, grid_k,
                                          n_paths, 7, 3.0, Exec::OpenMP);
  const double hit_omp = seconds_since(t0);
  report("mc_hit", hit_serial, hit_omp,
         est_serial.p_lower == est_omp.p_lower &&
             est_serial.p_upper == est_omp.p_upper);
  std::printf("mc_hit bracket: [%.5f, %.5f]\n", est_omp.p_lower, est_omp.p_upper);
  return 0;
}
