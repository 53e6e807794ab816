#include "gphit/variance.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "gphit/quadrature.hpp"
#include "gphit/stats.hpp"
#include "json.hpp"

namespace gphit {

namespace {

constexpr double kInvE = 0.36787944117144233;

double powlog_gamma(double H, double beta, double r) {
  if (r == 0.0) return 0.0;
  const double L = -std::log(r);
  if (beta == 0.0) return std::pow(r, H);
  if (H == 0.0) return std::pow(L, beta);
  return std::pow(r, H) * std::pow(L, beta);
}

double powlog_gamma_sq(double H, double beta, double r) {
  if (r == 0.0) return 0.0;
  const double L = -std::log(r);
  if (beta == 0.0) return std::pow(r, 2.0 * H);
  if (H == 0.0) return std::pow(L, 2.0 * beta);
  return std::pow(r, 2.0 * H) * std::pow(L, 2.0 * beta);
}

} // namespace

double VarianceModel::default_r_max(double H, double beta) {
  if (beta > 0.0 && H > 0.0) return std::min(kInvE, std::exp(-beta / H));
  return kInvE;
}

VarianceModel VarianceModel::power_log(double H, double beta,
                                       std::optional<double> r_max) {
  if (!(H >= 0.0 && H <= 1.0))
    throw std::invalid_argument("power_log: H must lie in [0, 1]");
  if (H == 0.0 && beta >= 0.0)
    throw std::invalid_argument(
        "power_log: H = 0 requires beta < 0 for gamma(0+) = 0");
  VarianceModel m;
  m.family_ = Family::PowerLog;
  m.H_ = H;
  m.beta_ = beta;
  m.r_max_ = r_max.value_or(default_r_max(H, beta));
  if (!(m.r_max_ > 0.0) || m.r_max_ >= 1.0)
    throw std::invalid_argument("power_log: r_max must lie in (0, 1)");
  if (beta > 0.0 && H > 0.0 && m.r_max_ > std::exp(-beta / H) * (1.0 + 1e-12))
    throw std::invalid_argument(
        "power_log: r_max exceeds the monotone range exp(-beta/H)");
  return m;
}

VarianceModel VarianceModel::tabulated(
    std::vector<std::pair<double, double>> points) {
  std::sort(points.begin(), points.end());
  if (points.empty() || points.front().first > 0.0)
    points.insert(points.begin(), {0.0, 0.0});
  if (points.front() != std::make_pair(0.0, 0.0))
    throw std::invalid_argument("tabulated: first sample must be (0, 0)");
  if (points.size() < 3)
    throw std::invalid_argument("tabulated: need at least two positive samples");
  VarianceModel m;
  m.family_ = Family::Tabulated;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i > 0 && (points[i].first <= points[i - 1].first ||
                  points[i].second <= points[i - 1].second))
      throw std::invalid_argument("tabulated: samples must be strictly increasing");
    m.tab_r_.push_back(points[i].first);
    m.tab_g_.push_back(points[i].second);
  }
  m.r_max_ = m.tab_r_.back();

  // Fritsch-Carlson monotone cubic slopes.
  const std::size_t n = m.tab_r_.size();
  std::vector<double> h(n - 1), delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = m.tab_r_[i + 1] - m.tab_r_[i];
    delta[i] = (m.tab_g_[i + 1] - m.tab_g_[i]) / h[i];
  }
  m.tab_d_.assign(n, 0.0);
  m.tab_d_[0] = delta[0];
  m.tab_d_[n - 1] = delta[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double w1 = 2.0 * h[i] + h[i - 1];
    const double w2 = h[i] + 2.0 * h[i - 1];
    m.tab_d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
  }
  return m;
}

bool VarianceModel::admissible() const {
  if (family_ == Family::Tabulated) return true;
  if (H_ > 0.0 && H_ < 1.0) return true;
  if (H_ == 1.0 && beta_ > 0.0) return true;
  if (H_ == 0.0 && beta_ < -0.5) return true;
  return false;
}

double VarianceModel::gamma(double r) const {
  if (!(r >= 0.0) || r > r_max_ * (1.0 + 1e-12))
    throw std::domain_error("gamma: r outside [0, r_max]");
  r = std::min(r, r_max_);
  if (family_ == Family::PowerLog) return powlog_gamma(H_, beta_, r);
  // Hermite evaluation on the bracketing segment.
  if (r == 0.0) return 0.0;
  const auto it = std::upper_bound(tab_r_.begin(), tab_r_.end(), r);
  const std::size_t i = std::min<std::size_t>(
      tab_r_.size() - 2, static_cast<std::size_t>(it - tab_r_.begin()) - 1);
  const double h = tab_r_[i + 1] - tab_r_[i];
  const double t = (r - tab_r_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * tab_g_[i] + (t3 - 2 * t2 + t) * h * tab_d_[i] +
         (-2 * t3 + 3 * t2) * tab_g_[i + 1] + (t3 - t2) * h * tab_d_[i + 1];
}

double VarianceModel::gamma_sq(double r) const {
  if (family_ == Family::PowerLog) {
    if (!(r >= 0.0) || r > r_max_ * (1.0 + 1e-12))
      throw std::domain_error("gamma_sq: r outside [0, r_max]");
    return powlog_gamma_sq(H_, beta_, std::min(r, r_max_));
  }
  const double g = gamma(r);
  return g * g;
}

double VarianceModel::gamma_prime(double r) const {
  if (!(r > 0.0) || r > r_max_ * (1.0 + 1e-12))
    throw std::domain_error("gamma_prime: r outside (0, r_max]");
  if (family_ == Family::PowerLog) {
    const double L = -std::log(r);
    if (beta_ == 0.0) return H_ * std::pow(r, H_ - 1.0);
    if (H_ == 0.0) return -beta_ * std::pow(L, beta_ - 1.0) / r;
    return std::pow(r, H_ - 1.0) * std::pow(L, beta_ - 1.0) * (H_ * L - beta_);
  }
  const auto it = std::upper_bound(tab_r_.begin(), tab_r_.end(), r);
  const std::size_t i = std::min<std::size_t>(
      tab_r_.size() - 2, static_cast<std::size_t>(it - tab_r_.begin()) - 1);
  const double h = tab_r_[i + 1] - tab_r_[i];
  const double t = (r - tab_r_[i]) / h;
  const double t2 = t * t;
  return ((6 * t2 - 6 * t) * tab_g_[i] + (3 * t2 - 4 * t + 1) * h * tab_d_[i] +
          (-6 * t2 + 6 * t) * tab_g_[i + 1] + (3 * t2 - 2 * t) * h * tab_d_[i + 1]) /
         h;
}

double VarianceModel::gamma_log_arg(double log_r) const {
  if (family_ == Family::Tabulated) return gamma(std::exp(log_r));
  if (log_r > std::log(r_max_) + 1e-12)
    throw std::domain_error("gamma_log_arg: r outside (0, r_max]");
  if (beta_ == 0.0) return std::exp(H_ * log_r);
  if (H_ == 0.0) return std::pow(-log_r, beta_);
  return std::exp(H_ * log_r + beta_ * std::log(-log_r));
}

double VarianceModel::gamma_inverse(double x) const {
  if (!(x >= 0.0)) throw std::domain_error("gamma_inverse: negative argument");
  const double top = gamma(r_max_);
  if (x > top * (1.0 + 1e-12))
    throw std::out_of_range("gamma_inverse: argument above gamma(r_max)");
  if (x == 0.0) return 0.0;
  if (x >= top) return r_max_;

  // Dyadic bracket first, so tiny arguments keep full relative precision,
  // then bisection inside the bracket.
  double hi = r_max_;
  double lo = 0.5 * hi;
  for (int k = 0; k < 4000 && gamma(lo) > x; ++k) {
    hi = lo;
    lo *= 0.5;
    if (lo < 1e-300) {
      lo = 0.0;
      break;
    }
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = lo == 0.0 ? hi * 0.5 : 0.5 * (lo + hi);
    const double g = gamma(mid);
    if (g < x)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-13 * hi) break;
  }
  return 0.5 * (lo + hi);
}

std::string VarianceModel::to_json() const {
  nlohmann::json j;
  if (family_ == Family::PowerLog) {
    j["family"] = "power_log";
    j["H"] = H_;
    j["beta"] = beta_;
    j["r_max"] = r_max_;
  } else {
    j["family"] = "tabulated";
    auto pts = nlohmann::json::array();
    for (std::size_t i = 0; i < tab_r_.size(); ++i)
      pts.push_back({tab_r_[i], tab_g_[i]});
    j["points"] = pts;
  }
  return j.dump();
}

VarianceModel VarianceModel::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  const std::string family = j.at("family").get<std::string>();
  if (family == "power_log") {
    std::optional<double> r_max;
    if (j.contains("r_max")) r_max = j["r_max"].get<double>();
    return power_log(j.at("H").get<double>(), j.at("beta").get<double>(), r_max);
  }
  if (family == "tabulated") {
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : j.at("points"))
      pts.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    return tabulated(std::move(pts));
  }
  throw std::invalid_argument("from_json: unknown family '" + family + "'");
}

std::string VarianceModel::describe() const {
  std::ostringstream os;
  if (family_ == Family::PowerLog)
    os << "power_log(H=" << H_ << ",beta=" << beta_ << ",r_max=" << r_max_ << ")";
  else
    os << "tabulated(" << tab_r_.size() << " samples, r_max=" << r_max_ << ")";
  return os.str();
}

double gamma_eval(const VarianceModel& model, double r) { return model.gamma(r); }

double gamma_inverse(const VarianceModel& model, double x) {
  return model.gamma_inverse(x);
}

namespace {

// int_0^{1/2} gamma(x y) / (y sqrt(log(1/y))) dy. The substitution
// y = exp(-u^2) flattens the endpoint weight to a constant 2, leaving
// 2 int_{sqrt(log 2)}^inf gamma(x exp(-u^2)) du with a fast-decaying tail.
double singular_weight_integral(const VarianceModel& model, double x) {
  const double u0 = std::sqrt(std::log(2.0));
  const double log_x = std::log(x);
  const auto integrand = [&](double u) {
    return model.gamma_log_arg(log_x - u * u);
  };
  const QuadResult q = integrate_decaying(integrand, u0, 1e-13, 1e-10);
  return 2.0 * q.value;
}

} // namespace

MultiplicativeBound check_multiplicative_bound(const VarianceModel& model, double y0) {
  if (!(y0 > 0.0) || y0 >= model.r_max() * (1.0 + 1e-12))
    throw std::domain_error("check_multiplicative_bound: y0 outside (0, r_max)");
  const int octaves = 40;
  std::vector<double> ratios;
  ratios.reserve(octaves + 1);
  for (int j = 0; j <= octaves; ++j) {
    const double x = y0 * std::pow(2.0, -j);
    ratios.push_back(singular_weight_integral(model, x) / model.gamma(x));
  }
  MultiplicativeBound res;
  res.khat = *std::max_element(ratios.begin(), ratios.end());
  // Divergence heuristic: the tail half keeps climbing by a material amount.
  bool tail_increasing = true;
  for (std::size_t j = ratios.size() / 2; j + 1 < ratios.size(); ++j)
    if (ratios[j + 1] <= ratios[j]) tail_increasing = false;
  const double growth = ratios.back() / ratios[ratios.size() / 2];
  res.divergent = tail_increasing && growth > 1.10;
  return res;
}

double f_gamma(const VarianceModel& model, double x) {
  if (!(x > 0.0) || x > model.r_max() * (1.0 + 1e-12))
    throw std::domain_error("f_gamma: x outside (0, r_max]");
  if (model.family() == VarianceModel::Family::PowerLog &&
      model.hurst() == 0.0 && model.beta() >= -0.5)
    throw std::domain_error(
        "f_gamma: integral diverges for H = 0 with beta >= -1/2");
  return model.gamma(x) * std::sqrt(std::log(2.0)) +
         singular_weight_integral(model, x);
}

IndexEstimate index_estimate_report(const VarianceModel& model, int k_max) {
  // Slopes s_k = log gamma(r_k) / log r_k on r_k = r_max 2^{-k} follow
  // s = H + a (log L)/L + b / L with L = log(1/r); the intercept is the index.
  std::vector<double> design, y;
  int used = 0;
  for (int k = 8; k <= k_max; ++k) {
    const double r = model.r_max() * std::pow(2.0, -k);
    if (r < 1e-280) break;
    double g;
    try {
      g = model.gamma(r);
    } catch (const std::exception&) {
      break;
    }
    if (!(g > 0.0)) break;
    const double L = -std::log(r);
    design.push_back(1.0);
    design.push_back(std::log(L) / L);
    design.push_back(1.0 / L);
    y.push_back(std::log(g) / std::log(r));
    ++used;
  }
  if (used < 4) throw numerical_error("index_estimate: too few usable slopes");
  const auto beta = fit_least_squares(used, 3, design, y);
  IndexEstimate est;
  est.value = beta[0];
  double rss = 0.0;
  for (int i = 0; i < used; ++i) {
    const double fit = beta[0] + beta[1] * design[i * 3 + 1] +
                       beta[2] * design[i * 3 + 2];
    rss += (y[i] - fit) * (y[i] - fit);
  }
  est.rms_residual = std::sqrt(rss / used);
  est.wide_uncertainty = est.rms_residual > 1e-3;
  return est;
}

double index_estimate(const VarianceModel& model, int k_max) {
  return index_estimate_report(model, k_max).value;
}

double local_scaling_limit(const VarianceModel& model) {
  // r gamma'(r)/gamma(r) sampled geometrically; extrapolate the 1/L drift.
  std::vector<double> design, y;
  int used = 0;
  for (int k = 6; k <= 40; ++k) {
    const double r = model.r_max() * std::pow(2.0, -k);
    if (r < 1e-280) break;
    double v;
    try {
      v = r * model.gamma_prime(r) / model.gamma(r);
    } catch (const std::exception&) {
      break;
    }
    if (!std::isfinite(v)) break;
    const double L = -std::log(r);
    design.push_back(1.0);
    design.push_back(1.0 / L);
    design.push_back(std::log(L) / (L * L));
    y.push_back(v);
    ++used;
  }
  if (used < 4)
    throw numerical_error("local_scaling_limit: too few usable samples");
  return fit_least_squares(used, 3, design, y)[0];
}

HypothesisReport check_hypotheses(const VarianceModel& model, double a, double b) {
  if (!(0.0 < a && a < b && b <= model.r_max() * (1.0 + 1e-12)))
    throw std::domain_error("check_hypotheses: need 0 < a < b <= r_max");

  HypothesisReport rep;
  const double r0 = model.r_max();

  // Concavity by second differences on the dyadic grid r_max 2^{-k}.
  int last_violation = -1;
  for (int k = 0; k + 2 <= 50; ++k) {
    const double r2 = r0 * std::pow(2.0, -k);
    const double r1 = 0.5 * r2;
    const double rh = 0.5 * (r1 + r2);
    if (r1 < 1e-250) break;
    const double second = model.gamma(r2) + model.gamma(r1) - 2.0 * model.gamma(rh);
    if (second > 1e-12) last_violation = k;
  }
  rep.concave_from_level = last_violation + 1;
  rep.concave_near_zero = last_violation < 45;

  // Derivative blow-up: forward-difference slopes on the same grid. A slope
  // ratio above 1e3 is decisive, but logarithmic divergence grows far more
  // slowly, so a persistent upward tail trend also counts: for a finite
  // derivative the tail slope decays geometrically instead.
  std::vector<double> ks, slopes;
  for (int k = 0; k <= 50; ++k) {
    const double r = r0 * std::pow(2.0, -k);
    const double half = 0.5 * r;
    if (half < 1e-250) break;
    ks.push_back(static_cast<double>(k));
    slopes.push_back((model.gamma(r) - model.gamma(half)) / half);
  }
  if (slopes.size() >= 12) {
    const double ratio = slopes.back() / slopes.front();
    const std::size_t tail = slopes.size() / 2;
    bool tail_monotone = true;
    for (std::size_t i = tail; i + 1 < slopes.size(); ++i)
      if (slopes[i + 1] < slopes[i] * (1.0 - 1e-12)) tail_monotone = false;
    const LineFit trend =
        fit_line(std::span(ks).subspan(tail), std::span(slopes).subspan(tail));
    rep.derivative_blows_up =
        ratio > 1e3 ||
        (tail_monotone && trend.slope > 1e-3 * std::fabs(slopes.back()));
  }
  if (!rep.derivative_blows_up && !slopes.empty())
    rep.gamma_prime0_estimate = slopes.back();
  rep.hypothesis_satisfied = rep.concave_near_zero && rep.derivative_blows_up;

  // Increment-ratio constant: max of (gamma(t)-gamma(s))/gamma(t-s) over pairs
  // with 0 < t - s <= eps, for a few eps scales.
  const int grid_n = 400;
  std::vector<double> ts(grid_n + 1);
  for (int i = 0; i <= grid_n; ++i)
    ts[i] = a + (b - a) * static_cast<double>(i) / grid_n;
  for (double eps : {(b - a), (b - a) / 4.0, (b - a) / 16.0, (b - a) / 64.0}) {
    double c0 = 0.0;
    for (int i = 0; i <= grid_n; ++i) {
      for (int j = i + 1; j <= grid_n; ++j) {
        const double gap = ts[j] - ts[i];
        if (gap > eps) break;
        c0 = std::max(c0, (model.gamma(ts[j]) - model.gamma(ts[i])) /
                              model.gamma(gap));
      }
    }
    rep.increment_ratio_c0[eps] = c0;
  }

  try {
    const MultiplicativeBound gm = check_multiplicative_bound(model, std::min(b, 0.5 * r0));
    rep.multiplicative_khat = gm.khat;
    rep.multiplicative_divergent = gm.divergent;
  } catch (const std::exception&) {
    rep.multiplicative_divergent = true;
  }
  rep.index = index_estimate(model);
  rep.local_scaling_limit = local_scaling_limit(model);
  return rep;
}

} // namespace gphit
