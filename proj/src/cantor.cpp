#include "gphit/cantor.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "gphit/quadrature.hpp"
#include "gphit/stats.hpp"
#include "json.hpp"

namespace gphit {

CantorSpec CantorSpec::constant(double q, int embedding_dim) {
  if (!(q > 0.0 && q < 0.5))
    throw std::invalid_argument("CantorSpec: ratio must lie in (0, 1/2)");
  if (embedding_dim < 1)
    throw std::invalid_argument("CantorSpec: embedding dim must be >= 1");
  CantorSpec s;
  s.constant_ = true;
  s.q_ = q;
  s.dim_ = embedding_dim;
  s.label_ = "constant q=" + std::to_string(q);
  return s;
}

CantorSpec CantorSpec::slightly_fat(double c, double alpha, int embedding_dim) {
  if (!(c > 1.0)) throw std::invalid_argument("slightly_fat: need c > 1");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("slightly_fat: need alpha in (0, 1)");
  CantorSpec s;
  s.constant_ = false;
  s.c_ = c;
  s.alpha_ = alpha;
  s.q_ = std::pow(2.0, -1.0 / alpha);  // clamp value for early levels
  const double q_base = s.q_;
  s.fn_ = [c, alpha, q_base](int n) {
    const double u = 1.0 - c / static_cast<double>(n);
    if (u <= 0.0) return q_base;
    const double q = std::pow(2.0 * u, -1.0 / alpha);
    return q < 0.5 ? q : q_base;
  };
  s.dim_ = embedding_dim;
  s.label_ = "slightly_fat c=" + std::to_string(c) + " alpha=" + std::to_string(alpha);
  return s;
}

CantorSpec CantorSpec::from_ratios(std::function<double(int)> q_of_n,
                                   int embedding_dim, std::string label) {
  CantorSpec s;
  s.constant_ = false;
  s.fn_ = std::move(q_of_n);
  s.dim_ = embedding_dim;
  s.label_ = std::move(label);
  return s;
}

double CantorSpec::ratio(int level) const {
  if (level < 1) throw std::invalid_argument("ratio: level >= 1");
  const double q = constant_ ? q_ : fn_(level);
  if (!(q > 0.0 && q < 0.5))
    throw std::invalid_argument("ratio: value outside (0, 1/2) at level " +
                                std::to_string(level));
  return q;
}

double CantorSpec::dimension() const {
  if (!constant_)
    throw std::logic_error("dimension: defined for the constant family");
  return std::log(2.0) / std::log(1.0 / q_);
}

double CantorSpec::log_level_length(int level) const {
  double acc = 0.0;
  for (int i = 1; i <= level; ++i) acc += std::log(ratio(i));
  return acc;
}

std::string CantorSpec::to_json() const {
  nlohmann::json j;
  j["embedding_dim"] = dim_;
  if (constant_) {
    j["ratio"] = "constant";
    j["q"] = q_;
  } else if (c_ > 0.0) {
    j["ratio"] = "slightly_fat";
    j["c"] = c_;
    j["alpha"] = alpha_;
  } else {
    j["ratio"] = "custom";
    j["label"] = label_;
  }
  return j.dump();
}

CantorSpec CantorSpec::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  const int dim = j.value("embedding_dim", 1);
  const std::string kind = j.at("ratio").get<std::string>();
  if (kind == "constant") return constant(j.at("q").get<double>(), dim);
  if (kind == "slightly_fat")
    return slightly_fat(j.at("c").get<double>(), j.at("alpha").get<double>(), dim);
  throw std::invalid_argument("CantorSpec::from_json: unknown ratio kind");
}

std::vector<Interval> cantor_build(const CantorSpec& spec, int level) {
  if (level < 0) throw std::invalid_argument("cantor_build: level >= 0");
  if (level > 24)
    throw std::length_error("cantor_build: 2^level intervals exceed capacity");
  std::vector<Interval> cur{{0.0, 1.0}};
  double len = 1.0;
  for (int n = 1; n <= level; ++n) {
    const double q = spec.ratio(n);
    const double child = len * q;
    std::vector<Interval> next;
    next.reserve(cur.size() * 2);
    for (const Interval& iv : cur) {
      next.push_back({iv.lo, iv.lo + child});
      next.push_back({iv.hi - child, iv.hi});
    }
    cur = std::move(next);
    len = child;
  }
  return cur;
}

std::string to_string(SeriesVerdict v) {
  switch (v) {
    case SeriesVerdict::Converges: return "Converges";
    case SeriesVerdict::Diverges: return "Diverges";
    case SeriesVerdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

SeriesResult cantor_capacity_series(const CantorSpec& spec,
                                    const KernelOrGauge& kernel, int N) {
  if (N < 8) throw std::invalid_argument("cantor_capacity_series: N >= 8");
  SeriesResult out;
  out.log_terms.reserve(N);
  out.partial_sums.reserve(N);
  double log_len = 0.0;
  double sum = 0.0;
  const double log2 = std::log(2.0);
  for (int n = 1; n <= N; ++n) {
    log_len += std::log(spec.ratio(n));
    double log_term;
    if (kernel.analytic()) {
      log_term = -n * log2 + kernel.log_eval_log_arg(log_len);
    } else {
      const double x = std::exp(log_len);
      if (x == 0.0)
        throw numerical_error(
            "cantor_capacity_series: level length underflows for a "
            "non-analytic kernel; use an analytic kernel for deep levels");
      log_term = -n * log2 + std::log(kernel(x));
    }
    out.log_terms.push_back(log_term);
    sum += log_term < 700.0 ? std::exp(log_term)
                            : std::numeric_limits<double>::infinity();
    out.partial_sums.push_back(sum);
  }

  // Tail regressions over the last half: log a_n against log n (power rate)
  // and against n (geometric rate).
  const int lo = N / 2;
  std::vector<double> ln_n, nn, la;
  for (int n = lo; n <= N; ++n) {
    ln_n.push_back(std::log(static_cast<double>(n)));
    nn.push_back(static_cast<double>(n));
    la.push_back(out.log_terms[n - 1]);
  }
  out.tail_exponent = fit_line(ln_n, la).slope;
  out.geometric_rate = fit_line(nn, la).slope;

  const double delta = 0.05;
  if (out.geometric_rate < -delta)
    out.verdict = SeriesVerdict::Converges;
  else if (out.geometric_rate > delta)
    out.verdict = SeriesVerdict::Diverges;
  else if (out.tail_exponent <= -1.0 - delta)
    out.verdict = SeriesVerdict::Converges;
  else if (out.tail_exponent >= -1.0 + delta)
    out.verdict = SeriesVerdict::Diverges;
  else
    out.verdict = SeriesVerdict::Inconclusive;
  return out;
}

SeriesVerdict cantor_series_verdict_symbolic(const CantorSpec& spec,
                                             const KernelOrGauge& kernel) {
  if (!spec.constant_ratio() || !kernel.analytic())
    throw std::invalid_argument(
        "symbolic verdict needs a constant ratio and an analytic kernel");
  // log a_n = n (p log q - log 2) + lambda log n + const for the shape
  // c x^p log^lambda(1/x); the geometric exponent decides unless it vanishes,
  // then the power of n does.
  const double q = spec.ratio(1);
  const double g = kernel.pow_exponent() * std::log(q) - std::log(2.0);
  if (g < -1e-12) return SeriesVerdict::Converges;
  if (g > 1e-12) return SeriesVerdict::Diverges;
  return kernel.log_exponent() < -1.0 ? SeriesVerdict::Converges
                                      : SeriesVerdict::Diverges;
}

std::string to_string(PremeasureTrend t) {
  switch (t) {
    case PremeasureTrend::ToZero: return "ToZero";
    case PremeasureTrend::Bounded: return "Bounded";
    case PremeasureTrend::ToInfinity: return "ToInfinity";
  }
  return "?";
}

PremeasureResult hausdorff_premeasure(const CantorSpec& spec,
                                      const KernelOrGauge& gauge, int N) {
  if (N < 4) throw std::invalid_argument("hausdorff_premeasure: N >= 4");
  if (!gauge.valid_gauge())
    throw std::invalid_argument("hausdorff_premeasure: gauge is not valid near 0");
  PremeasureResult out;
  out.values.reserve(N);
  std::vector<double> log_values;
  double log_len = 0.0;
  const double log2 = std::log(2.0);
  for (int n = 1; n <= N; ++n) {
    log_len += std::log(spec.ratio(n));
    double lv;
    if (gauge.analytic()) {
      lv = n * log2 + gauge.log_eval_log_arg(log_len);
    } else {
      const double x = std::exp(log_len);
      if (x == 0.0)
        throw numerical_error("hausdorff_premeasure: level length underflow");
      lv = n * log2 + std::log(gauge(x));
    }
    log_values.push_back(lv);
    out.values.push_back(lv < 700.0 ? std::exp(lv)
                                    : std::numeric_limits<double>::infinity());
  }
  const int lo = std::max(2, N / 2);
  std::vector<double> ln_n, nn, lv;
  for (int n = lo; n <= N; ++n) {
    ln_n.push_back(std::log(static_cast<double>(n)));
    nn.push_back(static_cast<double>(n));
    lv.push_back(log_values[n - 1]);
  }
  const double geo = fit_line(nn, lv).slope;
  const double pow_rate = fit_line(ln_n, lv).slope;
  if (geo < -1e-3 || (std::fabs(geo) <= 1e-3 && pow_rate < -0.05))
    out.trend = PremeasureTrend::ToZero;
  else if (geo > 1e-3 || (std::fabs(geo) <= 1e-3 && pow_rate > 0.05))
    out.trend = PremeasureTrend::ToInfinity;
  else
    out.trend = PremeasureTrend::Bounded;
  return out;
}

std::vector<double> singleton_premeasure(const KernelOrGauge& gauge,
                                         const std::vector<double>& eps_grid) {
  if (!gauge.valid_gauge())
    throw std::invalid_argument("singleton_premeasure: gauge is not valid near 0");
  std::vector<double> out;
  out.reserve(eps_grid.size());
  for (double eps : eps_grid) {
    if (!(eps > 0.0))
      throw std::domain_error("singleton_premeasure: eps must be > 0");
    out.push_back(gauge(2.0 * eps));
  }
  return out;
}

} // namespace gphit
