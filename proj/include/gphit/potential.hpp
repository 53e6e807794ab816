#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gphit/variance.hpp"

namespace gphit {

// A potential kernel K (positive, non-increasing) or a Hausdorff gauge phi
// (non-decreasing near 0 with zero limit). Analytic power-log shapes
// c * x^p * log^q(1/x) carry their exponents so deep-level evaluations can
// stay in log space; anything else wraps a plain callable.
class KernelOrGauge {
 public:
  enum class Kind { CapacityKernel, HausdorffGauge };
  enum class Monotone { NonIncreasing, NonDecreasing };

  static KernelOrGauge power_log_kernel(double scale, double pow_exp,
                                        double log_exp, bool clamp_min_one = false);
  static KernelOrGauge power_log_gauge(double scale, double pow_exp,
                                       double log_exp);
  static KernelOrGauge constant_one();
  static KernelOrGauge callable_kernel(std::function<double(double)> f,
                                       double limit_at_zero,
                                       std::string label = "kernel");
  static KernelOrGauge callable_gauge(std::function<double(double)> f,
                                      bool valid, std::string label = "gauge");

  Kind kind() const { return kind_; }
  Monotone monotone() const { return monotone_; }
  double limit_at_zero() const { return limit_at_zero_; }
  bool valid_gauge() const { return valid_gauge_; }
  bool analytic() const { return analytic_; }
  double pow_exponent() const { return pow_exp_; }
  double log_exponent() const { return log_exp_; }
  const std::string& label() const { return label_; }

  double operator()(double x) const;
  // Evaluate from log(x); exact for analytic shapes, exp-composed otherwise.
  double eval_log_arg(double log_x) const;
  // log of the value from log(x); requires an analytic shape.
  double log_eval_log_arg(double log_x) const;

  std::string to_json() const;
  // Analytic shapes only; callable kernels carry no portable description.
  static KernelOrGauge from_json(const std::string& text);

 private:
  Kind kind_ = Kind::CapacityKernel;
  Monotone monotone_ = Monotone::NonIncreasing;
  bool analytic_ = false;
  bool clamp_min_one_ = false;
  bool valid_gauge_ = true;
  double scale_ = 1.0, pow_exp_ = 0.0, log_exp_ = 0.0;
  double limit_at_zero_ = 1.0;
  std::function<double(double)> fn_;
  std::string label_;
};

// v(r) = int_r^window gamma(s)^{-d} ds, integrated in t = log(1/s).
struct VIntegral {
  double value = 0.0;
  bool bounded_at_zero = false;
};
VIntegral v_integral(const VarianceModel& model, int d, double r, double window);

// K(x) = max(1, v(gamma^{-1}(x))) over window b - a; arguments above
// gamma(b-a) clamp to K = 1.
KernelOrGauge kernel_K(const VarianceModel& model, int d, double a, double b);

// Newtonian beta-kernel: r^-beta (beta>0), log(e/(r^1)) (beta=0), 1 (beta<0).
KernelOrGauge newtonian_kernel(double beta);

// phi(x) = x^d / gamma^{-1}(x), with a validity check (non-decreasing near 0
// and vanishing limit).
KernelOrGauge gauge_phi(const VarianceModel& model, int d);

enum class Polarity { NonPolar, Polar, GapUnknown, BoundaryCase };
std::string to_string(Polarity p);

Polarity polarity_classify(double H, double beta, int d);

struct BoundCaseSelection {
  std::vector<int> cases;       // 1..5, possibly {2,3}
  bool boundary_family = false;  // H = 0 or H = 1 boundary family
  KernelOrGauge lower_kernel = KernelOrGauge::constant_one();
  std::optional<KernelOrGauge> upper_gauge;
  bool upper_established = false;
};

BoundCaseSelection select_bound_case(double H, double beta, int d);

enum class Commensurability { True, False, Inconclusive };
struct CommensurabilityResult {
  Commensurability status = Commensurability::Inconclusive;
  double limit = 0.0;
};
CommensurabilityResult commensurability_check(const VarianceModel& model, int d);

} // namespace gphit
