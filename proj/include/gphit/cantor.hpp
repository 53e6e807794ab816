#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gphit/potential.hpp"

namespace gphit {

// Linear Cantor construction on [0, 1]: at each level every interval of
// length ell splits into two of length q_{n} * ell. Constant-ratio and
// named level-dependent sequences are supported.
class CantorSpec {
 public:
  static CantorSpec constant(double q, int embedding_dim = 1);
  // q_n = (2 (1 - c/n))^{-1/alpha}, clamped to the constant critical ratio
  // 2^{-1/alpha} while that expression leaves (0, 1/2). The level-n terms of
  // the x^{-alpha} capacity series then track prod (1 - c/i).
  static CantorSpec slightly_fat(double c, double alpha, int embedding_dim = 1);
  static CantorSpec from_ratios(std::function<double(int)> q_of_n,
                                int embedding_dim, std::string label);

  double ratio(int level) const;  // level >= 1
  int embedding_dim() const { return dim_; }
  bool constant_ratio() const { return constant_; }
  // Hausdorff dimension log 2 / log(1/q) for the constant family.
  double dimension() const;
  // log of the level-n interval length, accumulated in log space.
  double log_level_length(int level) const;
  const std::string& label() const { return label_; }
  std::string to_json() const;
  static CantorSpec from_json(const std::string& text);

 private:
  CantorSpec() = default;
  bool constant_ = true;
  double q_ = 1.0 / 3.0;
  double c_ = 0.0, alpha_ = 0.0;  // slightly_fat parameters, when used
  std::function<double(int)> fn_;
  int dim_ = 1;
  std::string label_;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// The 2^level closed intervals of the level-th construction step.
std::vector<Interval> cantor_build(const CantorSpec& spec, int level);

enum class SeriesVerdict { Converges, Diverges, Inconclusive };
std::string to_string(SeriesVerdict v);

struct SeriesResult {
  std::vector<double> log_terms;     // log a_n, a_n = 2^{-n} K(prod q_i)
  std::vector<double> partial_sums;  // clipped at overflow
  double tail_exponent = 0.0;        // fitted p in a_n ~ n^p over the tail
  double geometric_rate = 0.0;       // fitted slope of log a_n against n
  SeriesVerdict verdict = SeriesVerdict::Inconclusive;
};

// Beardon-style positivity series sum 2^{-n} K(prod_{i<=n} q_i). Terms are
// produced in log space so deep levels cannot overflow or underflow.
SeriesResult cantor_capacity_series(const CantorSpec& spec,
                                    const KernelOrGauge& kernel, int N);

// Exact verdict for analytic power-log kernels on the constant-ratio family,
// by exponent comparison. Available only in that case.
SeriesVerdict cantor_series_verdict_symbolic(const CantorSpec& spec,
                                             const KernelOrGauge& kernel);

enum class PremeasureTrend { ToZero, Bounded, ToInfinity };
std::string to_string(PremeasureTrend t);

struct PremeasureResult {
  std::vector<double> values;  // s_n = 2^n phi(prod q_i)
  PremeasureTrend trend = PremeasureTrend::Bounded;
};

// Gauge sums of the natural level-n coverings: s_n = 2^n phi(prod q_i). The
// construction covers by intervals of diameter prod q_i (radius half that),
// so this is the diameter-convention premeasure.
PremeasureResult hausdorff_premeasure(const CantorSpec& spec,
                                      const KernelOrGauge& gauge, int N);

// Companion singleton estimate: phi(2 eps) along a shrinking eps grid.
std::vector<double> singleton_premeasure(const KernelOrGauge& gauge,
                                         const std::vector<double>& eps_grid);

} // namespace gphit
