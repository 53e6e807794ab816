#include "doctest.h"

#include <cmath>
#include <omp.h>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "gphit/simulate.hpp"
#include "gphit/stats.hpp"
#include "oracle_helpers.hpp"

using namespace gphit;

namespace {
VarianceModel bm() { return VarianceModel::power_log(0.5, 0.0); }
}

TEST_CASE("volterra factor: Brownian case is the running-sum factor") {
  const auto times = uniform_grid(0.2, 64);
  const auto f = volterra_factor(bm(), times);
  CHECK(f.is_toeplitz());
  const double sqrt_dt = std::sqrt(0.2 / 64);
  for (std::size_t i = 1; i <= 64; ++i)
    for (std::size_t j = 1; j <= i; ++j)
      CHECK(f.entry(i, j) == doctest::Approx(sqrt_dt).epsilon(1e-9));

  // L L^T = min(t_i, t_j)
  const auto s = surface_from_factor(f);
  for (std::size_t i = 1; i <= 64; i += 7)
    for (std::size_t j = 1; j <= 64; j += 5)
      CHECK(s.cov(i, j) ==
            doctest::Approx(std::min(times[i], times[j])).epsilon(1e-12));
}

TEST_CASE("volterra factor: row sums of squares telescope to gamma^2") {
  for (const auto& model :
       {bm(), VarianceModel::power_log(0.3, 0.0), VarianceModel::power_log(0.7, 1.0),
        VarianceModel::power_log(0.0, -1.0)}) {
    const auto times = uniform_grid(model.r_max() * 0.9, 128);
    const auto f = volterra_factor(model, times);
    for (std::size_t i = 1; i <= 128; i += 13) {
      double ss = 0.0;
      for (std::size_t j = 1; j <= i; ++j) ss += f.entry(i, j) * f.entry(i, j);
      CHECK(ss == doctest::Approx(model.gamma_sq(times[i])).epsilon(1e-13));
    }
  }
}

TEST_CASE("volterra covariance tracks the continuous moving-average kernel") {
  // Oracle: Sigma(s,t) = int_0^s k(t-u) k(s-u) du with k(v) = sqrt((gamma^2)'(v))
  // = sqrt(2H) v^{H-1/2}, by adaptive Simpson independent of the factor code.
  for (double H : {0.3, 0.7}) {
    const auto model = VarianceModel::power_log(H, 0.0);
    const auto times = uniform_grid(0.3, 256);
    const auto s = surface_from_factor(volterra_factor(model, times));
    for (std::size_t i : {std::size_t(32), std::size_t(128), std::size_t(200)}) {
      for (std::size_t j : {std::size_t(64), std::size_t(160), std::size_t(256)}) {
        if (j <= i) continue;
        const double ti = times[i], tj = times[j];
        const double exact = oracle::integrate_simpson(
            [&](double u) {
              return 2.0 * H * std::pow(ti - u, H - 0.5) * std::pow(tj - u, H - 0.5);
            },
            ti * 1e-9, ti * (1.0 - 1e-9), 1e-11);
        CHECK(s.cov(i, j) == doctest::Approx(exact).epsilon(0.01));
      }
    }
  }
}

TEST_CASE("grids must be strictly increasing from zero") {
  CHECK_THROWS_AS(volterra_factor(bm(), {0.0, 0.1, 0.05}), std::invalid_argument);
  CHECK_THROWS_AS(volterra_factor(bm(), {0.1, 0.2}), std::invalid_argument);
  CHECK_THROWS_AS(volterra_factor(bm(), {0.0, 0.1, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(volterra_factor(bm(), uniform_grid(0.9, 8)),
                  std::invalid_argument);  // beyond r_max
}

TEST_CASE("exact covariance: fBm surface matches the analytic formula") {
  for (double H : {0.3, 0.5, 0.7}) {
    const auto model = VarianceModel::power_log(H, 0.0);
    const auto times = uniform_grid(0.3, 64);
    const auto s = exact_covariance(model, times);
    CHECK_FALSE(s.not_pd);
    for (std::size_t i = 1; i <= 64; i += 5) {
      CHECK(s.cov(i, i) == doctest::Approx(model.gamma_sq(times[i])).epsilon(1e-13));
      for (std::size_t j = 1; j <= 64; j += 7) {
        const double expect =
            0.5 * (std::pow(times[i], 2 * H) + std::pow(times[j], 2 * H) -
                   std::pow(std::fabs(times[i] - times[j]), 2 * H));
        CHECK(s.cov(i, j) == doctest::Approx(expect).epsilon(1e-12));
      }
    }
    // Self-similar cancellation: Sigma(t, 2t) = gamma^2(2t) / 2.
    CHECK(s.cov(16, 32) == doctest::Approx(0.5 * model.gamma_sq(times[32])));
  }
}

TEST_CASE("exact covariance: PD flag agrees with an eigenvalue oracle") {
  for (const auto& model :
       {VarianceModel::power_log(0.5, 1.0), VarianceModel::power_log(0.7, -0.5),
        VarianceModel::power_log(0.35, 0.5)}) {
    const std::size_t m = 48;
    const auto times = uniform_grid(model.r_max() * 0.9, m);
    const auto s = exact_covariance(model, times);
    double trace = 0.0;
    for (std::size_t i = 1; i <= m; ++i) trace += s.cov(i, i);
    const double lam = oracle::smallest_eigenvalue_jacobi(s.sigma, m);
    if (s.not_pd)
      CHECK(lam < 0.0);
    else
      CHECK(lam >= -1e-9 * trace);
  }
}

TEST_CASE("verify_commensurability: exact fBm sits at one, Volterra within two") {
  for (double H : {0.3, 0.5, 0.7}) {
    const auto model = VarianceModel::power_log(H, 0.0);
    const auto times = uniform_grid(0.3, 128);
    const auto exact = exact_covariance(model, times);
    CHECK(verify_commensurability(exact, model) <= 1.0 + 1e-9);
    const auto vol = surface_from_factor(volterra_factor(model, times));
    CHECK(verify_commensurability(vol, model) <= 2.05);
    CHECK(verify_commensurability(vol, model) >= 1.0);
  }
  // Degenerate surfaces are rejected.
  CovarianceSurface degenerate;
  degenerate.times = {0.0, 0.1, 0.2};
  degenerate.sigma = {1.0, 1.0, 1.0, 1.0};
  CHECK_THROWS_AS(verify_commensurability(degenerate, bm()), std::domain_error);
}

TEST_CASE("sampling: determinism, moments, and thread independence") {
  const auto times = uniform_grid(0.2, 128);
  const auto f = volterra_factor(bm(), times);

  const auto e1 = sample_paths(f, 2, 500, 42);
  const auto e2 = sample_paths(f, 2, 500, 42);
  CHECK(e1.values == e2.values);  // bit-identical

  const auto serial = sample_paths(f, 2, 500, 42, Exec::Serial);
  CHECK(serial.values == e1.values);

  const auto other = sample_paths(f, 2, 500, 43);
  CHECK(other.values != e1.values);

  for (int threads : {1, 4, 16}) {
    omp_set_num_threads(threads);
    const auto e = sample_paths(f, 2, 500, 42);
    CHECK(e.values == e1.values);
  }
  omp_set_num_threads(1);

  // Paths start at zero; empty ensembles are fine.
  for (std::size_t p = 0; p < 10; ++p) CHECK(e1.at(p, 0, 0) == 0.0);
  CHECK(sample_paths(f, 1, 0, 1).values.empty());
}

TEST_CASE("sampling: ensemble mean and variance track gamma^2") {
  const auto times = uniform_grid(0.2, 32);
  const auto f = volterra_factor(bm(), times);
  const std::size_t n = 20000;
  const auto e = sample_paths(f, 1, n, 2024);
  for (std::size_t i = 8; i <= 32; i += 8) {
    std::vector<double> vals(n);
    for (std::size_t p = 0; p < n; ++p) vals[p] = e.at(p, 0, i);
    const double mean = pairwise_sum(vals) / static_cast<double>(n);
    const double g = bm().gamma(times[i]);
    CHECK(std::fabs(mean) <= 4.0 * g / std::sqrt(static_cast<double>(n)));
    std::vector<double> sq(n);
    for (std::size_t p = 0; p < n; ++p) sq[p] = vals[p] * vals[p];
    const double var = pairwise_sum(sq) / static_cast<double>(n);
    const double se = g * g * std::sqrt(2.0 / static_cast<double>(n));
    CHECK(std::fabs(var - g * g) <= 5.0 * se);
  }
}

TEST_CASE("sampling: empirical covariance within five standard errors") {
  const auto times = uniform_grid(0.2, 12);
  const auto f = volterra_factor(VarianceModel::power_log(0.7, 0.0), times);
  const auto s = surface_from_factor(f);
  const std::size_t n = 100000;
  const auto e = sample_paths(f, 1, n, 7);
  for (std::size_t i = 1; i <= 12; i += 3) {
    for (std::size_t j = i; j <= 12; j += 4) {
      std::vector<double> prod(n);
      for (std::size_t p = 0; p < n; ++p)
        prod[p] = e.at(p, 0, i) * e.at(p, 0, j);
      const double emp = pairwise_sum(prod) / static_cast<double>(n);
      const double se =
          std::sqrt(s.cov(i, i) * s.cov(j, j) + s.cov(i, j) * s.cov(i, j)) /
          std::sqrt(static_cast<double>(n));
      CHECK(std::fabs(emp - s.cov(i, j)) <= 5.0 * se);
    }
  }
}

TEST_CASE("conditional variance profile") {
  // Brownian: Var(B_t | B_s) = t - s exactly, so the ratio is one.
  const auto times = uniform_grid(0.3, 128);
  const auto s = exact_covariance(bm(), times);
  const auto prof = conditional_variance_profile(s, bm(), 0.1, 0.3);
  CHECK(prof.min_ratio == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(prof.min_ratio >= prof.lnd_constant);
  CHECK(prof.epsilon > 0.0);

  // fBm H = 0.7 on [1/4, 1/3]: the lemma constant gamma^4(a)/(2 ell gamma^4(b)).
  const auto model = VarianceModel::power_log(0.7, 0.0);
  const auto times2 = uniform_grid(1.0 / 3.0, 256);
  const auto s2 = exact_covariance(model, times2);
  const auto prof2 = conditional_variance_profile(s2, model, 0.25, 1.0 / 3.0);
  const double expect_const = std::pow(0.75, 2.8) / 2.0;
  CHECK(prof2.lnd_constant == doctest::Approx(expect_const).epsilon(1e-6));
  CHECK(prof2.min_ratio >= prof2.lnd_constant);
  CHECK(prof2.epsilon > 0.0);
}

TEST_CASE("binary ensemble round trip") {
  const auto times = uniform_grid(0.2, 16);
  const auto f = volterra_factor(bm(), times);
  const auto e = sample_paths(f, 2, 37, 99);
  std::stringstream buf;
  write_ensemble(buf, e);
  const auto back = read_ensemble(buf, times);
  CHECK(back.n_paths == 37);
  CHECK(back.dim == 2);
  CHECK(back.seed == 99);
  CHECK(back.values == e.values);
}

TEST_CASE("process spec json and admissibility") {
  ProcessSpec spec(bm(), 3, Construction::StationaryIncrementExact, 1.0);
  const auto back = ProcessSpec::from_json(spec.to_json());
  CHECK(back.dim == 3);
  CHECK(back.construction == Construction::StationaryIncrementExact);
  CHECK_THROWS_AS(ProcessSpec(VarianceModel::power_log(1.0, 0.0), 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(ProcessSpec(bm(), 0), std::invalid_argument);
}
