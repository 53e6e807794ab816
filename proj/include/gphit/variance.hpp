#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gphit {

// Variance function gamma: strictly increasing on (0, r_max], gamma(0) = 0.
// Two families: the power-log form r^H * log^beta(1/r), and a tabulated
// curve with monotone cubic interpolation.
class VarianceModel {
 public:
  enum class Family { PowerLog, Tabulated };

  // Power-log model. Constructible whenever the formula is a valid variance
  // function on (0, r_max] (strictly increasing, zero limit at zero); the
  // narrower admissibility of the two-parameter class is a separate predicate
  // so diagnostic checks can still run on boundary cases like gamma(r) = r.
  static VarianceModel power_log(double H, double beta,
                                 std::optional<double> r_max = std::nullopt);

  // Tabulated model from strictly increasing (r, gamma) samples; a (0, 0)
  // anchor is prepended when absent.
  static VarianceModel tabulated(std::vector<std::pair<double, double>> points);

  Family family() const { return family_; }
  double hurst() const { return H_; }
  double beta() const { return beta_; }
  double r_max() const { return r_max_; }

  // Largest r_max the power-log formula supports (monotonicity limit).
  static double default_r_max(double H, double beta);

  // Membership in the two-parameter class the hitting theory covers:
  // H in (0,1) with any beta, or H = 1 with beta > 0, or H = 0 with
  // beta < -1/2.
  bool admissible() const;

  double gamma(double r) const;      // domain [0, r_max]
  double gamma_sq(double r) const;   // gamma^2, computed directly
  double gamma_inverse(double x) const;  // domain [0, gamma(r_max)]
  double gamma_prime(double r) const;    // analytic (PowerLog) or interpolant
  // gamma as a function of log(r); immune to underflow of r itself, which
  // matters inside singular-weight quadratures.
  double gamma_log_arg(double log_r) const;

  std::string to_json() const;
  static VarianceModel from_json(const std::string& text);
  std::string describe() const;

 private:
  VarianceModel() = default;

  Family family_ = Family::PowerLog;
  double H_ = 0.5;
  double beta_ = 0.0;
  double r_max_ = 0.0;
  // Tabulated data and monotone cubic slopes.
  std::vector<double> tab_r_, tab_g_, tab_d_;
};

struct HypothesisReport {
  bool concave_near_zero = false;
  // Index k of the coarsest dyadic grid point below which all second
  // differences are concave; 0 means the whole grid.
  int concave_from_level = 0;
  bool derivative_blows_up = false;
  double gamma_prime0_estimate = 0.0;  // meaningful when no blow-up
  bool hypothesis_satisfied = false;
  std::map<double, double> increment_ratio_c0;  // epsilon -> c0(epsilon)
  double multiplicative_khat = 0.0;
  bool multiplicative_divergent = false;
  double index = 0.0;
  double local_scaling_limit = 0.0;
};

struct MultiplicativeBound {
  double khat = 0.0;
  bool divergent = false;
};

double gamma_eval(const VarianceModel& model, double r);
double gamma_inverse(const VarianceModel& model, double x);

// Concavity/blow-up diagnostics plus the increment-ratio constants on [a, b].
HypothesisReport check_hypotheses(const VarianceModel& model, double a, double b);

// sup over x in (0, y0] of int_0^{1/2} gamma(x y) / (y sqrt(log(1/y))) dy
// divided by gamma(x), with a divergence heuristic for ratios that keep
// climbing as x -> 0.
MultiplicativeBound check_multiplicative_bound(const VarianceModel& model, double y0);

// f(x) = gamma(x) sqrt(log 2) + the integral above (entropy-style bound).
double f_gamma(const VarianceModel& model, double x);

// Extrapolated limit of log gamma(r) / log r along dyadic r.
double index_estimate(const VarianceModel& model, int k_max = 40);

struct IndexEstimate {
  double value = 0.0;
  double rms_residual = 0.0;
  bool wide_uncertainty = false;  // extrapolation did not settle
};
IndexEstimate index_estimate_report(const VarianceModel& model, int k_max = 40);

// Extrapolated limit of r gamma'(r) / gamma(r).
double local_scaling_limit(const VarianceModel& model);

} // namespace gphit
