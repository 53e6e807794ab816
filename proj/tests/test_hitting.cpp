#include "doctest.h"

#include <cmath>
#include <omp.h>
#include <stdexcept>
#include <vector>

#include "gphit/hitting.hpp"
#include "oracle_helpers.hpp"

using namespace gphit;

namespace {
ProcessSpec bm_spec(int d = 1) {
  return ProcessSpec(VarianceModel::power_log(0.5, 0.0), d);
}
}

TEST_CASE("detect_hits: crossing, proximity, and miss") {
  const std::vector<double> times{0.0, 0.1, 0.2};
  const auto z0 = TargetSet::point({0.0}, 1.0);

  // Sign change across zero is a certain hit.
  const double crossing[3] = {0.0, -1.0, 1.0};
  auto f = detect_hits(crossing, times, 1, 3, 1, 3, z0, 0.01);
  CHECK(f.hit_lower);
  CHECK(f.hit_upper);

  // Everything far away: both flags off.
  const double far[3] = {0.0, 0.9, 1.1};
  f = detect_hits(far, times, 1, 3, 1, 3, z0, 0.01);
  CHECK_FALSE(f.hit_lower);
  CHECK_FALSE(f.hit_upper);

  // Near miss within the threshold: upper only.
  const double close[3] = {0.0, 0.005, 0.3};
  f = detect_hits(close, times, 1, 3, 1, 3, z0, 0.01);
  CHECK_FALSE(f.hit_lower);
  CHECK(f.hit_upper);

  CHECK_THROWS_AS(detect_hits(far, times, 2, 2, 1, 3, z0, 0.01),
                  std::domain_error);
}

TEST_CASE("detect_hits: ball containment and cantor endpoints") {
  const std::vector<double> times{0.0, 0.1};
  const auto ball = TargetSet::ball({1.0, 0.0}, 0.25, 2.0);
  const double inside[2 * 2] = {0.0, 1.1, 0.0, 0.2};  // coord-major, 2 steps
  auto f = detect_hits(inside, times, 1, 2, 2, 2, ball, 0.0 + 1e-12);
  CHECK(f.hit_lower);

  const auto spec = CantorSpec::constant(1.0 / 3.0);
  const auto cantor1 = TargetSet::cantor_on_axis(spec, 3, 1, 1.0);
  // Crossing the endpoint 1/3 from below to above.
  const double cross[2] = {0.3, 0.35};
  f = detect_hits(cross, times, 0, 2, 1, 2, cantor1, 1e-9);
  CHECK(f.hit_lower);
  // Sitting inside the removed middle gap: no certain hit, proximity decides.
  const double gap[2] = {0.5, 0.52};
  f = detect_hits(gap, times, 0, 2, 1, 2, cantor1, 1e-9);
  CHECK_FALSE(f.hit_lower);
  CHECK_FALSE(f.hit_upper);
  f = detect_hits(gap, times, 0, 2, 1, 2, cantor1, 0.2);
  CHECK(f.hit_upper);
}

TEST_CASE("threshold follows the continuity modulus") {
  const auto m = VarianceModel::power_log(0.5, 0.0);
  double prev = hit_threshold(m, 1e-2);
  for (double dt : {1e-3, 1e-4, 1e-5}) {
    const double t = hit_threshold(m, dt);
    CHECK(t < prev);
    CHECK(t == doctest::Approx(3.0 * std::sqrt(dt) *
                               std::sqrt(std::log(1.0 / dt))).epsilon(1e-12));
    prev = t;
  }
}

TEST_CASE("mc_hit_probability: arcsine oracle bracket (reduced size)") {
  const double p_true = oracle::bm_zero_hit_probability(0.1, 0.2);
  CHECK(p_true == doctest::Approx(0.5).epsilon(1e-15));
  const auto est = mc_hit_probability(bm_spec(), TargetSet::point({0.0}, 1.0),
                                      0.1, 0.2, 11, 20000, 20250808);
  const double se_l = std::sqrt(est.p_lower * (1 - est.p_lower) / 20000.0);
  const double se_u = std::sqrt(est.p_upper * (1 - est.p_upper) / 20000.0);
  CHECK(est.p_lower - 3 * se_l <= 0.5);
  CHECK(est.p_upper + 3 * se_u >= 0.5);
  CHECK(est.p_lower <= est.p_upper);
  CHECK(est.ci_lower.lo <= est.p_lower);
  CHECK(est.ci_upper.hi >= est.p_upper);
}

TEST_CASE("mc_hit_probability: grid refinement tightens the bracket") {
  const auto target = TargetSet::point({0.0}, 1.0);
  double prev_lower = -1.0, prev_upper = 2.0;
  for (int k : {9, 10, 11}) {
    const auto est =
        mc_hit_probability(bm_spec(), target, 0.1, 0.2, k, 20000, 5);
    const double se = 1.0 / std::sqrt(20000.0);
    if (prev_lower >= 0.0) {
      CHECK(est.p_lower >= prev_lower - 2 * se);
      CHECK(est.p_upper <= prev_upper + 2 * se);
    }
    prev_lower = est.p_lower;
    prev_upper = est.p_upper;
  }
}

TEST_CASE("mc_hit_probability: ball monotone in radius at fixed seed") {
  const auto small = mc_hit_probability(
      bm_spec(), TargetSet::ball({0.2}, 0.05, 1.0), 0.1, 0.2, 10, 5000, 3);
  const auto large = mc_hit_probability(
      bm_spec(), TargetSet::ball({0.2}, 0.10, 1.0), 0.1, 0.2, 10, 5000, 3);
  CHECK(large.p_upper >= small.p_upper);
  CHECK(large.p_lower >= small.p_lower);
}

TEST_CASE("mc_hit_probability: remote targets are almost never hit") {
  // Reflection-principle oracle: P(sup |W| >= u) <= 4 P(W(b) >= u).
  const double u = 3.0 - 0.1;
  CHECK(oracle::bm_sup_tail_bound(0.2, u) < 1e-6);
  const auto est = mc_hit_probability(
      bm_spec(), TargetSet::ball({3.0}, 0.05, 4.0), 0.1, 0.2, 10, 10000, 5);
  CHECK(est.p_upper <= 1e-2);
}

TEST_CASE("mc_hit_probability: symmetric targets agree within intervals") {
  const auto plus = mc_hit_probability(
      bm_spec(), TargetSet::point({0.15}, 1.0), 0.1, 0.2, 11, 20000, 9);
  const auto minus = mc_hit_probability(
      bm_spec(), TargetSet::point({-0.15}, 1.0), 0.1, 0.2, 11, 20000, 10);
  CHECK(plus.ci_upper.lo <= minus.ci_upper.hi);
  CHECK(minus.ci_upper.lo <= plus.ci_upper.hi);
  CHECK(plus.ci_lower.lo <= minus.ci_lower.hi);
  CHECK(minus.ci_lower.lo <= plus.ci_lower.hi);
}

TEST_CASE("mc_hit_probability: validation") {
  const auto target = TargetSet::point({0.0}, 1.0);
  CHECK_THROWS_AS(mc_hit_probability(bm_spec(), target, 0.2, 0.1, 10, 1000, 1),
                  std::domain_error);
  CHECK_THROWS_AS(mc_hit_probability(bm_spec(), target, 0.1, 0.2, 10, 50, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      mc_hit_probability(bm_spec(2), target, 0.1, 0.2, 10, 1000, 1),
      std::invalid_argument);
}

TEST_CASE("point_hit_bound: limits and scaling") {
  const auto m = VarianceModel::power_log(0.5, 0.0);
  // Vanishes with the window.
  double prev = point_hit_bound(m, 0.1, 0.2, 1.0, 1.0);
  for (double w : {0.05, 0.025, 0.0125}) {
    const double b = point_hit_bound(m, 0.1, 0.1 + w, 1.0, 1.0);
    CHECK(b < prev);
    prev = b;
  }
  // Log-log slope in the window equals H = 1/2 for the Brownian family.
  std::vector<double> ws, bs;
  for (int k = 3; k <= 8; ++k) {
    ws.push_back(std::pow(2.0, -k));
    bs.push_back(point_hit_bound(m, 0.1, 0.1 + ws.back(), 1.0, 1.0));
  }
  CHECK(loglog_slope(ws, bs) == doctest::Approx(0.5).epsilon(1e-6));

  // Multiplicative variant is proportional to gamma(b-a)/gamma(a).
  CHECK(point_hit_bound_multiplicative(m, 0.1, 0.2, 4.0, 2.0) ==
        doctest::Approx(2.0 * 2.0 * m.gamma(0.1) / m.gamma(0.1)).epsilon(1e-14));

  // H = 0 family carries the sqrt-log correction through f_gamma.
  const auto flat = VarianceModel::power_log(0.0, -1.0);
  std::vector<double> ratios;
  for (int k = 6; k <= 30; k += 8) {
    const double w = flat.r_max() * std::pow(2.0, -k);
    ratios.push_back(point_hit_bound(flat, 0.1, 0.1 + w, 1.0, 1.0) /
                     (flat.gamma(w) * std::sqrt(std::log(1.0 / w))));
  }
  CHECK(ratios.back() == doctest::Approx(ratios[ratios.size() - 2]).epsilon(0.05));
}

TEST_CASE("ball_hit_bound: F pieces and the point-bound limit") {
  const auto m = VarianceModel::power_log(0.5, 0.0);
  const double gb = m.gamma(0.2);
  CHECK(ball_hit_F(m, 0.2, 0.5 * gb) == 1.0);
  CHECK(ball_hit_F(m, 0.2, gb) == 1.0);
  // Large |z|: 1/F ~ z^2 / (2 gamma^2(b)) within 5% once z >= 10 gamma(b).
  for (double mult : {10.0, 20.0, 50.0}) {
    const double z = mult * gb;
    const double approx = z * z / (2.0 * gb * gb);
    CHECK(1.0 / ball_hit_F(m, 0.2, z) == doctest::Approx(approx).epsilon(0.05));
  }
  // eps = 0 collapses to the point bound to the d-th power.
  const double point = point_hit_bound(m, 0.1, 0.2, 1.0, 0.7);
  for (int d : {1, 2, 3}) {
    CHECK(ball_hit_bound(m, 0.1, 0.2, 0.3, 0.0, 0.1, 1.0, 0.7, d) ==
          doctest::Approx(std::pow(point, d)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(ball_hit_bound(m, 0.1, 0.2, 0.3, -0.1, 0.1, 1.0, 0.7, 1),
                  std::domain_error);
  CHECK_THROWS_AS(ball_hit_bound(m, 0.1, 0.2, 0.3, 0.1, 1.5, 1.0, 0.7, 1),
                  std::domain_error);
}

TEST_CASE("estimate_kappa: positive, below one half, grid-consistent") {
  const auto coarse = estimate_kappa(bm_spec(), 0.1, 0.2, 9, 40000, 123);
  CHECK(coarse.kappa > 0.0);
  CHECK(coarse.kappa < 0.5);
  // Consistency against a 4x finer grid under joint Wilson intervals. The
  // finer grid sees deeper dips, so kappa can only shrink slightly.
  const auto fine = estimate_kappa(bm_spec(), 0.1, 0.2, 11, 40000, 124);
  CHECK(fine.ci.lo <= coarse.ci.hi);
  CHECK(fine.kappa <= coarse.ci.hi);

  // Determinism across thread counts.
  const auto once = estimate_kappa(bm_spec(), 0.1, 0.2, 9, 5000, 9);
  for (int threads : {1, 4}) {
    omp_set_num_threads(threads);
    const auto again = estimate_kappa(bm_spec(), 0.1, 0.2, 9, 5000, 9);
    CHECK(again.kappa == once.kappa);
  }
  omp_set_num_threads(1);
}

TEST_CASE("ball_sweep: established cases only, slopes sandwich the gauge") {
  // d = 3, H = 1/2 is case 1: gauge phi(x) = x^{d-1/H} = x.
  std::vector<double> eps{0.125, 0.0625, 0.03125};
  const auto rep = ball_sweep(bm_spec(3), {0.05, 0.0, 0.0}, eps, 0.05, 0.2, 10,
                              8000, 11, true);
  CHECK(rep.upper_established);
  CHECK(rep.gauge_slope == doctest::Approx(1.0).epsilon(1e-9));
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    CHECK(rep.rows[i].estimate.p_lower <= rep.rows[i].estimate.p_upper);
    CHECK(rep.rows[i].gauge_value == doctest::Approx(eps[i]).epsilon(1e-9));
    CHECK(rep.rows[i].capacity_value > 0.0);
  }
  // The detection bracket straddles the true decay rate: certain hits decay
  // at least as fast as the gauge, proximity hits no faster.
  std::vector<double> pls, pus;
  for (const auto& r : rep.rows) {
    pls.push_back(r.estimate.p_lower);
    pus.push_back(r.estimate.p_upper);
  }
  CHECK(loglog_slope(eps, pls) >= rep.gauge_slope - 0.25);
  CHECK(loglog_slope(eps, pus) <= rep.gauge_slope + 0.25);

  // One-constant calibration at the coarsest ball, then the capacity side
  // stays below the observed upper estimates.
  const double C = rep.rows[0].estimate.p_upper / rep.rows[0].capacity_value;
  for (const auto& r : rep.rows)
    CHECK(C * r.capacity_value <= r.estimate.p_upper * (1.0 + 1e-9));

  // Upper-bound comparisons outside the established cases are refused.
  CHECK_THROWS_WITH_AS(
      ball_sweep(bm_spec(1), {0.0}, eps, 0.1, 0.2, 9, 1000, 1, true),
      doctest::Contains("not established"), std::invalid_argument);
  // ...but lower-side sweeps still run there.
  const auto lower_only =
      ball_sweep(bm_spec(1), {0.0}, {0.125}, 0.1, 0.2, 9, 1000, 1, false);
  CHECK_FALSE(lower_only.upper_established);
}

TEST_CASE("cantor_compare: rougher processes hit the critical set more") {
  // H = 2/3, d = 2: the constant-ratio set with q = 2^{-1/(d-1/H)} = 1/4.
  const auto cs = CantorSpec::constant(0.25, 2);
  const auto rows = cantor_compare(2.0 / 3.0, {-0.5, 4.0 / 3.0}, 2, cs, 6, 0.05,
                                   0.13, 9, 4000, 17);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].estimate.p_upper > rows[0].estimate.p_upper);
}
