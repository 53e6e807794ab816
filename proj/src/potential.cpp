#include "gphit/potential.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "gphit/quadrature.hpp"
#include "json.hpp"

namespace gphit {

KernelOrGauge KernelOrGauge::power_log_kernel(double scale, double pow_exp,
                                              double log_exp, bool clamp_min_one) {
  KernelOrGauge k;
  k.kind_ = Kind::CapacityKernel;
  k.monotone_ = Monotone::NonIncreasing;
  k.analytic_ = true;
  k.clamp_min_one_ = clamp_min_one;
  k.scale_ = scale;
  k.pow_exp_ = pow_exp;
  k.log_exp_ = log_exp;
  k.limit_at_zero_ = (pow_exp < 0.0 || (pow_exp == 0.0 && log_exp > 0.0))
                         ? std::numeric_limits<double>::infinity()
                         : scale;
  std::ostringstream os;
  os << "K(x)=" << scale << "*x^" << pow_exp << "*log^" << log_exp << "(1/x)";
  k.label_ = os.str();
  return k;
}

KernelOrGauge KernelOrGauge::power_log_gauge(double scale, double pow_exp,
                                             double log_exp) {
  KernelOrGauge g;
  g.kind_ = Kind::HausdorffGauge;
  g.monotone_ = Monotone::NonDecreasing;
  g.analytic_ = true;
  g.scale_ = scale;
  g.pow_exp_ = pow_exp;
  g.log_exp_ = log_exp;
  g.limit_at_zero_ = 0.0;
  g.valid_gauge_ = pow_exp > 0.0 || (pow_exp == 0.0 && log_exp < 0.0);
  std::ostringstream os;
  os << "phi(x)=" << scale << "*x^" << pow_exp << "*log^" << log_exp << "(1/x)";
  g.label_ = os.str();
  return g;
}

KernelOrGauge KernelOrGauge::constant_one() {
  auto k = power_log_kernel(1.0, 0.0, 0.0);
  k.label_ = "K(x)=1";
  return k;
}

KernelOrGauge KernelOrGauge::callable_kernel(std::function<double(double)> f,
                                             double limit_at_zero,
                                             std::string label) {
  KernelOrGauge k;
  k.kind_ = Kind::CapacityKernel;
  k.monotone_ = Monotone::NonIncreasing;
  k.analytic_ = false;
  k.fn_ = std::move(f);
  k.limit_at_zero_ = limit_at_zero;
  k.label_ = std::move(label);
  return k;
}

KernelOrGauge KernelOrGauge::callable_gauge(std::function<double(double)> f,
                                            bool valid, std::string label) {
  KernelOrGauge g;
  g.kind_ = Kind::HausdorffGauge;
  g.monotone_ = Monotone::NonDecreasing;
  g.analytic_ = false;
  g.fn_ = std::move(f);
  g.limit_at_zero_ = 0.0;
  g.valid_gauge_ = valid;
  g.label_ = std::move(label);
  return g;
}

double KernelOrGauge::operator()(double x) const {
  if (!(x > 0.0)) throw std::domain_error("KernelOrGauge: argument must be > 0");
  if (!analytic_) return fn_(x);
  return eval_log_arg(std::log(x));
}

double KernelOrGauge::eval_log_arg(double log_x) const {
  if (!analytic_) return fn_(std::exp(log_x));
  if (pow_exp_ == 0.0 && log_exp_ == 0.0) return scale_;  // constant shape
  const double v = std::exp(log_eval_log_arg(log_x));
  return v;
}

double KernelOrGauge::log_eval_log_arg(double log_x) const {
  if (!analytic_)
    throw std::logic_error("log_eval_log_arg: kernel has no analytic form");
  if (pow_exp_ == 0.0 && log_exp_ == 0.0) return std::log(scale_);
  double lv = std::log(scale_) + pow_exp_ * log_x;
  // The logarithmic factor saturates at arguments above 1/e, which keeps the
  // shape monotone on the whole half-line (only the near-zero behavior is
  // meaningful for kernels and gauges).
  if (log_exp_ != 0.0) lv += log_exp_ * std::log(-std::min(log_x, -1.0));
  if (clamp_min_one_ && lv < 0.0) return 0.0;
  return lv;
}

std::string KernelOrGauge::to_json() const {
  nlohmann::json j;
  j["kind"] = kind_ == Kind::CapacityKernel ? "capacity_kernel" : "hausdorff_gauge";
  j["label"] = label_;
  if (analytic_) {
    j["scale"] = scale_;
    j["pow_exp"] = pow_exp_;
    j["log_exp"] = log_exp_;
  }
  if (kind_ == Kind::HausdorffGauge) j["valid_gauge"] = valid_gauge_;
  return j.dump();
}

KernelOrGauge KernelOrGauge::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  const std::string kind = j.at("kind").get<std::string>();
  if (!j.contains("scale"))
    throw std::invalid_argument(
        "KernelOrGauge::from_json: only analytic shapes round-trip");
  const double scale = j["scale"].get<double>();
  const double p = j["pow_exp"].get<double>();
  const double q = j["log_exp"].get<double>();
  if (kind == "capacity_kernel") return power_log_kernel(scale, p, q);
  if (kind == "hausdorff_gauge") return power_log_gauge(scale, p, q);
  throw std::invalid_argument("KernelOrGauge::from_json: unknown kind");
}

namespace {

double gamma_neg_pow_integral(const VarianceModel& model, int d, double lo,
                              double hi, double rel_tol = 1e-10) {
  // int_lo^hi gamma(s)^{-d} ds in t = log(1/s), where the integrand spans
  // decades smoothly.
  const auto integrand = [&](double t) {
    const double s = std::exp(-t);
    return std::exp(-d * std::log(model.gamma(s)) - t);
  };
  return integrate(integrand, std::log(1.0 / hi), std::log(1.0 / lo), 1e-13,
                   rel_tol, 20000)
      .value;
}

bool v_bounded_at_zero(const VarianceModel& model, int d, double window) {
  if (model.family() == VarianceModel::Family::PowerLog) {
    const double dH = d * model.hurst();
    const double dB = d * model.beta();
    return dH < 1.0 || (dH == 1.0 && dB > 1.0);
  }
  // Numeric trend on dyadic shells toward zero.
  double prev = -1.0;
  int shrinking = 0, shells = 0;
  for (int k = 4; k <= 28; ++k) {
    const double hi = window * std::pow(2.0, -k);
    const double lo = 0.5 * hi;
    double shell;
    try {
      shell = gamma_neg_pow_integral(model, d, lo, hi, 1e-8);
    } catch (const numerical_error&) {
      return false;
    }
    if (prev >= 0.0 && shell < 0.8 * prev) ++shrinking;
    ++shells;
    prev = shell;
  }
  return shrinking >= shells - 3;
}

} // namespace

VIntegral v_integral(const VarianceModel& model, int d, double r, double window) {
  if (!(r > 0.0) || !(r <= window))
    throw std::domain_error("v_integral: need 0 < r <= window");
  if (window > model.r_max() * (1.0 + 1e-12))
    throw std::domain_error("v_integral: window exceeds r_max");
  VIntegral out;
  out.bounded_at_zero = v_bounded_at_zero(model, d, window);
  if (r < window) out.value = gamma_neg_pow_integral(model, d, r, window);
  return out;
}

KernelOrGauge kernel_K(const VarianceModel& model, int d, double a, double b) {
  if (!(0.0 < a && a < b)) throw std::domain_error("kernel_K: need 0 < a < b");
  const double window = b - a;
  if (window > model.r_max() * (1.0 + 1e-12))
    throw std::domain_error("kernel_K: b - a exceeds r_max");
  const double gamma_top = model.gamma(window);

  double limit0 = std::numeric_limits<double>::infinity();
  if (v_bounded_at_zero(model, d, window)) {
    double total = 0.0;
    double hi = window;
    for (int k = 1; k <= 900; ++k) {
      const double lo = 0.5 * hi;
      const double shell = gamma_neg_pow_integral(model, d, lo, hi);
      total += shell;
      hi = lo;
      if (shell < 1e-13 * std::max(total, 1.0) || hi < 1e-280) break;
    }
    limit0 = std::max(1.0, total);
  }

  auto fn = [model, d, window, gamma_top](double x) {
    if (x >= gamma_top) return 1.0;
    const double r = model.gamma_inverse(x);
    if (!(r > 0.0)) return std::numeric_limits<double>::infinity();
    return std::max(1.0, gamma_neg_pow_integral(model, d, r, window));
  };
  std::ostringstream os;
  os << "K=max(1,v(gamma^-1)) d=" << d << " window=" << window << " "
     << model.describe();
  return KernelOrGauge::callable_kernel(std::move(fn), limit0, os.str());
}

KernelOrGauge newtonian_kernel(double beta) {
  if (beta > 0.0) return KernelOrGauge::power_log_kernel(1.0, -beta, 0.0);
  if (beta < 0.0) return KernelOrGauge::constant_one();
  auto k0 = [](double r) { return std::log(std::exp(1.0) / std::min(r, 1.0)); };
  return KernelOrGauge::callable_kernel(
      k0, std::numeric_limits<double>::infinity(), "K0(x)=log(e/(x^1))");
}

KernelOrGauge gauge_phi(const VarianceModel& model, int d) {
  auto fn = [model, d](double x) {
    if (x <= 0.0) return 0.0;
    const double r = model.gamma_inverse(x);
    if (r <= 0.0) return 0.0;
    return std::exp(d * std::log(x) - std::log(r));
  };
  bool valid = false;
  if (model.family() == VarianceModel::Family::PowerLog) {
    const double H = model.hurst();
    if (H > 0.0) {
      const double dH = d * H;
      if (dH > 1.0 + 1e-12)
        valid = true;
      else if (std::fabs(dH - 1.0) <= 1e-12)
        valid = model.beta() < 0.0;
    }
  } else {
    valid = true;
    const double x_top = model.gamma(model.r_max()) * 0.5;
    double prev = -1.0;
    for (int k = 30; k >= 0; --k) {
      const double v = fn(x_top * std::pow(2.0, -k));
      if (prev >= 0.0 && v < prev * (1.0 - 1e-9)) valid = false;
      prev = v;
    }
    if (fn(x_top * std::pow(2.0, -30)) > 0.1 * fn(x_top)) valid = false;
  }
  std::ostringstream os;
  os << "phi(x)=x^" << d << "/gamma^-1(x) " << model.describe();
  return KernelOrGauge::callable_gauge(std::move(fn), valid, os.str());
}

std::string to_string(Polarity p) {
  switch (p) {
    case Polarity::NonPolar: return "NonPolar";
    case Polarity::Polar: return "Polar";
    case Polarity::GapUnknown: return "GapUnknown";
    case Polarity::BoundaryCase: return "BoundaryCase";
  }
  return "?";
}

Polarity polarity_classify(double H, double beta, int d) {
  const auto model = VarianceModel::power_log(H, beta);  // validates the shape
  if (!model.admissible())
    throw std::domain_error("polarity_classify: inadmissible (H, beta)");
  if (d < 1) throw std::domain_error("polarity_classify: d must be >= 1");
  const double dH = d * H;
  if (dH < 1.0) return Polarity::NonPolar;
  if (dH > 1.0) return Polarity::Polar;
  const double inv_d = 1.0 / d;
  if (beta < 0.0) return Polarity::Polar;
  if (beta > inv_d) return Polarity::NonPolar;
  if (beta == inv_d) return Polarity::BoundaryCase;
  return Polarity::GapUnknown;
}

BoundCaseSelection select_bound_case(double H, double beta, int d) {
  const auto model = VarianceModel::power_log(H, beta);
  if (!model.admissible())
    throw std::domain_error("select_bound_case: inadmissible (H, beta)");
  if (d < 1) throw std::domain_error("select_bound_case: d must be >= 1");

  BoundCaseSelection sel;
  sel.boundary_family = (H == 0.0 || H == 1.0);
  const double inv_H = H > 0.0 ? 1.0 / H : std::numeric_limits<double>::infinity();

  if (H > 0.0 && d > inv_H + 1e-12) {
    const double p = d - inv_H;
    const double q = beta / H;
    sel.cases = {1};
    sel.upper_gauge = KernelOrGauge::power_log_gauge(1.0, p, q);
    sel.lower_kernel = KernelOrGauge::power_log_kernel(1.0, -p, -q, true);
    sel.upper_established = true;
    return sel;
  }
  if (H > 0.0 && std::fabs(d - inv_H) < 1e-12) {
    const double q = beta / H;
    if (beta < 0.0) {
      sel.cases = {2, 3};
      sel.upper_gauge = KernelOrGauge::power_log_gauge(1.0, 0.0, q);
      sel.lower_kernel = KernelOrGauge::power_log_kernel(1.0, 0.0, 1.0 - q, true);
      sel.upper_established = true;
    } else if (beta < 1.0 / d) {
      sel.cases = {3};
      sel.lower_kernel = KernelOrGauge::power_log_kernel(1.0, 0.0, 1.0 - q, true);
    } else {
      sel.cases = {4};
      sel.lower_kernel = KernelOrGauge::constant_one();
    }
    return sel;
  }
  sel.cases = {5};
  sel.lower_kernel = KernelOrGauge::constant_one();
  return sel;
}

CommensurabilityResult commensurability_check(const VarianceModel& model, int d) {
  CommensurabilityResult out;
  try {
    out.limit = local_scaling_limit(model);
  } catch (const numerical_error&) {
    out.status = Commensurability::Inconclusive;
    return out;
  }
  // Strict inequality with slack for extrapolation noise: the boundary
  // d * limit == 1 must classify as False.
  out.status = (d * out.limit > 1.0 + 1e-9) ? Commensurability::True
                                            : Commensurability::False;
  return out;
}

} // namespace gphit
