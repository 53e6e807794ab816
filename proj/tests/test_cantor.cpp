#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "gphit/cantor.hpp"
#include "gphit/measure.hpp"

using namespace gphit;

TEST_CASE("cantor_build: middle thirds") {
  const auto spec = CantorSpec::constant(1.0 / 3.0);
  const auto level2 = cantor_build(spec, 2);
  REQUIRE(level2.size() == 4);
  const double expect[4][2] = {
      {0.0, 1.0 / 9}, {2.0 / 9, 1.0 / 3}, {2.0 / 3, 7.0 / 9}, {8.0 / 9, 1.0}};
  for (int i = 0; i < 4; ++i) {
    CHECK(level2[i].lo == doctest::Approx(expect[i][0]).epsilon(1e-15));
    CHECK(level2[i].hi == doctest::Approx(expect[i][1]).epsilon(1e-15));
  }
  CHECK(spec.dimension() == doctest::Approx(std::log(2.0) / std::log(3.0)));

  CHECK(cantor_build(spec, 0).size() == 1);
  CHECK_THROWS_AS(cantor_build(spec, 40), std::length_error);
  CHECK_THROWS_AS(CantorSpec::constant(0.5), std::invalid_argument);
  CHECK_THROWS_AS(CantorSpec::constant(0.0), std::invalid_argument);
}

TEST_CASE("cantor_build: sequence ratios give product lengths") {
  int calls = 0;
  const auto spec = CantorSpec::from_ratios(
      [&calls](int n) {
        ++calls;
        return 0.2 + 0.02 * (n % 3);
      },
      1, "wobble");
  const auto level = cantor_build(spec, 5);
  double len = 1.0;
  for (int n = 1; n <= 5; ++n) len *= 0.2 + 0.02 * (n % 3);
  for (const auto& iv : level)
    CHECK(iv.hi - iv.lo == doctest::Approx(len).epsilon(1e-13));
  CHECK(spec.log_level_length(5) == doctest::Approx(std::log(len)).epsilon(1e-12));
}

TEST_CASE("capacity series: critical, corrected, and slightly-fat ratios") {
  // alpha = 1/2 critical family (e.g. d = 2, H = 2/3): q = 2^{-1/alpha} = 1/4.
  const double alpha = 0.5;
  const auto spec = CantorSpec::constant(0.25, 2);

  // Critical kernel x^{-alpha}: terms are identically one.
  const auto crit = KernelOrGauge::power_log_kernel(1.0, -alpha, 0.0);
  const auto r1 = cantor_capacity_series(spec, crit, 64);
  CHECK(r1.verdict == SeriesVerdict::Diverges);
  for (double lt : r1.log_terms) CHECK(lt == doctest::Approx(0.0).epsilon(1e-12));

  // Log-corrected kernel with exponent -2 (beta'/H = 2): terms ~ n^{-2}.
  const auto corrected = KernelOrGauge::power_log_kernel(1.0, -alpha, -2.0);
  const auto r2 = cantor_capacity_series(spec, corrected, 64);
  CHECK(r2.verdict == SeriesVerdict::Converges);
  CHECK(r2.tail_exponent == doctest::Approx(-2.0).epsilon(0.01));

  // Slightly-fat ratios with c = 2 under the critical kernel: terms ~ n^{-2}.
  const auto fat = CantorSpec::slightly_fat(2.0, alpha, 2);
  const auto r3 = cantor_capacity_series(fat, crit, 64);
  CHECK(r3.verdict == SeriesVerdict::Converges);
  CHECK(r3.tail_exponent == doctest::Approx(-2.0).epsilon(0.05));

  // Symbolic verdicts agree with the numeric ones on the constant family.
  CHECK(cantor_series_verdict_symbolic(spec, crit) == SeriesVerdict::Diverges);
  CHECK(cantor_series_verdict_symbolic(spec, corrected) == SeriesVerdict::Converges);
  CHECK_THROWS_AS(cantor_series_verdict_symbolic(fat, crit), std::invalid_argument);

  CHECK_THROWS_AS(cantor_capacity_series(spec, crit, 4), std::invalid_argument);
}

TEST_CASE("capacity series: deep levels stay in log space") {
  const auto spec = CantorSpec::constant(1.0 / 3.0);
  const auto k = KernelOrGauge::power_log_kernel(1.0, -2.0, 0.0);
  const auto r = cantor_capacity_series(spec, k, 520);
  // a_n = 2^{-n} 3^{2n} = 4.5^n; by level 520 the terms overflow while
  // their logs stay finite.
  CHECK(std::isfinite(r.log_terms.back()));
  CHECK(r.verdict == SeriesVerdict::Diverges);
  CHECK(std::isinf(r.partial_sums.back()));
}

TEST_CASE("series/premeasure duality on the critical family") {
  // With q = 2^{-1/alpha}, kernel 1/phi-tilde = x^{-alpha} log^{-lambda}:
  // converges iff lambda > 1 (terms n^{-lambda}).
  const double alpha = 0.5;
  const auto spec = CantorSpec::constant(0.25, 2);
  const double H = 2.0 / 3.0;
  for (double beta_prime : {0.5 * H, 1.5 * H}) {
    const auto k =
        KernelOrGauge::power_log_kernel(1.0, -alpha, -beta_prime / H);
    const auto r = cantor_capacity_series(spec, k, 64);
    if (beta_prime / H > 1.0)
      CHECK(r.verdict == SeriesVerdict::Converges);
    else
      CHECK(r.verdict == SeriesVerdict::Diverges);
  }
}

TEST_CASE("discrete capacities track the series verdict across depths") {
  // Below the dimension exponent the middle-thirds set carries positive
  // capacity: level estimates stabilize. Above it they collapse geometrically.
  const auto spec = CantorSpec::constant(1.0 / 3.0);
  for (double beta : {0.4, 0.9}) {
    const auto kernel = newtonian_kernel(beta);
    std::vector<double> caps;
    for (int level : {6, 8, 10}) {
      const auto ivs = cantor_build(spec, level);
      std::vector<std::vector<double>> pts;
      std::vector<double> rad;
      for (const auto& iv : ivs) {
        pts.push_back({0.5 * (iv.lo + iv.hi)});
        rad.push_back(0.5 * (iv.hi - iv.lo));
      }
      caps.push_back(capacity_estimate(pts, rad, kernel, 1e-8, 60000).capacity);
    }
    const auto verdict = cantor_capacity_series(spec, kernel, 48).verdict;
    if (beta < spec.dimension()) {
      CHECK(verdict == SeriesVerdict::Converges);  // positive capacity
      CHECK(caps[2] / caps[0] > 0.85);
    } else {
      CHECK(verdict == SeriesVerdict::Diverges);  // null capacity
      CHECK(caps[2] / caps[0] < 0.40);
    }
  }
}

TEST_CASE("hausdorff premeasure: dimension gauge is exactly flat") {
  const auto spec = CantorSpec::constant(1.0 / 3.0);
  const auto gauge = KernelOrGauge::power_log_gauge(
      1.0, std::log(2.0) / std::log(3.0), 0.0);
  const auto pm = hausdorff_premeasure(spec, gauge, 20);
  REQUIRE(pm.values.size() == 20);
  for (double s : pm.values) CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pm.trend == PremeasureTrend::Bounded);
}

TEST_CASE("hausdorff premeasure: log-corrected gauges move the verdict") {
  const auto spec = CantorSpec::constant(0.25, 2);
  // phi = x^{alpha} log^{beta/H}(1/x) with beta < 0: s_n ~ n^{beta/H} -> 0.
  const auto down = KernelOrGauge::power_log_gauge(1.0, 0.5, -2.0);
  CHECK(hausdorff_premeasure(spec, down, 48).trend == PremeasureTrend::ToZero);
  const auto up = KernelOrGauge::power_log_gauge(1.0, 0.5, 2.0);
  CHECK(hausdorff_premeasure(spec, up, 48).trend == PremeasureTrend::ToInfinity);

  // Invalid gauges are rejected up front.
  const auto invalid = KernelOrGauge::power_log_gauge(1.0, -0.5, 0.0);
  CHECK_FALSE(invalid.valid_gauge());
  CHECK_THROWS_AS(hausdorff_premeasure(spec, invalid, 16), std::invalid_argument);
}

TEST_CASE("singleton premeasure vanishes for valid gauges") {
  const auto gauge = KernelOrGauge::power_log_gauge(1.0, 1.0, 2.0);
  std::vector<double> eps;
  for (int k = 4; k <= 40; k += 6) eps.push_back(std::pow(2.0, -k));
  const auto vals = singleton_premeasure(gauge, eps);
  for (std::size_t i = 1; i < vals.size(); ++i) CHECK(vals[i] < vals[i - 1]);
  CHECK(vals.back() < 1e-8);
}

TEST_CASE("cantor spec json round trip") {
  const auto spec = CantorSpec::constant(0.3, 2);
  const auto back = CantorSpec::from_json(spec.to_json());
  CHECK(back.ratio(1) == doctest::Approx(0.3));
  CHECK(back.embedding_dim() == 2);
  const auto fat = CantorSpec::slightly_fat(2.0, 0.5, 3);
  const auto fat2 = CantorSpec::from_json(fat.to_json());
  CHECK(fat2.ratio(50) == doctest::Approx(fat.ratio(50)).epsilon(1e-14));
}
