#include "gphit/hitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "gphit/measure.hpp"
#include "gphit/potential.hpp"

namespace gphit {

TargetSet TargetSet::point(std::vector<double> z, double bound_M) {
  if (z.empty()) throw std::invalid_argument("TargetSet::point: empty center");
  TargetSet t;
  t.kind_ = Kind::Point;
  t.dim_ = static_cast<int>(z.size());
  t.bound_M_ = bound_M;
  for (double v : z)
    if (std::fabs(v) > bound_M)
      throw std::invalid_argument("TargetSet: center outside [-M, M]^d");
  t.z_ = std::move(z);
  return t;
}

TargetSet TargetSet::ball(std::vector<double> z, double eps, double bound_M) {
  if (!(eps > 0.0)) throw std::invalid_argument("TargetSet::ball: eps must be > 0");
  TargetSet t = point(std::move(z), bound_M);
  t.kind_ = Kind::Ball;
  t.eps_ = eps;
  return t;
}

TargetSet TargetSet::cantor_on_axis(const CantorSpec& spec, int depth, int dim,
                                    double bound_M) {
  if (depth < 1) throw std::invalid_argument("TargetSet: cantor depth >= 1");
  if (dim < 1) throw std::invalid_argument("TargetSet: dim >= 1");
  if (bound_M < 1.0)
    throw std::invalid_argument("TargetSet: cantor set needs M >= 1");
  TargetSet t;
  t.kind_ = Kind::CantorOnAxis;
  t.dim_ = dim;
  t.bound_M_ = bound_M;
  t.intervals_ = cantor_build(spec, depth);
  t.endpoints_.reserve(t.intervals_.size() * 2);
  for (const Interval& iv : t.intervals_) {
    t.endpoints_.push_back(iv.lo);
    t.endpoints_.push_back(iv.hi);
  }
  return t;
}

std::string TargetSet::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Point: {
      os << "point(";
      for (std::size_t i = 0; i < z_.size(); ++i) os << (i ? "," : "") << z_[i];
      os << ")";
      break;
    }
    case Kind::Ball: {
      os << "ball(";
      for (std::size_t i = 0; i < z_.size(); ++i) os << (i ? "," : "") << z_[i];
      os << ";eps=" << eps_ << ")";
      break;
    }
    case Kind::CantorOnAxis:
      os << "cantor(depth->" << intervals_.size() << " intervals,d=" << dim_ << ")";
      break;
  }
  return os.str();
}

namespace {

double dist_to_interval_union(const std::vector<Interval>& ivs, double x) {
  // ivs sorted and disjoint
  auto it = std::lower_bound(
      ivs.begin(), ivs.end(), x,
      [](const Interval& iv, double v) { return iv.hi < v; });
  double best = std::numeric_limits<double>::infinity();
  if (it != ivs.end()) {
    if (x >= it->lo && x <= it->hi) return 0.0;
    best = std::min(best, it->lo - x);
  }
  if (it != ivs.begin()) best = std::min(best, x - std::prev(it)->hi);
  return best;
}

} // namespace

double TargetSet::distance(const double* coords) const {
  switch (kind_) {
    case Kind::Point:
    case Kind::Ball: {
      double s = 0.0;
      for (int c = 0; c < dim_; ++c) {
        const double d = coords[c] - z_[c];
        s += d * d;
      }
      const double d = std::sqrt(s);
      return kind_ == Kind::Ball ? std::max(0.0, d - eps_) : d;
    }
    case Kind::CantorOnAxis: {
      const double dx = dist_to_interval_union(intervals_, coords[0]);
      double s = dx * dx;
      for (int c = 1; c < dim_; ++c) s += coords[c] * coords[c];
      return std::sqrt(s);
    }
  }
  return std::numeric_limits<double>::infinity();
}

bool TargetSet::contains(const double* coords) const {
  switch (kind_) {
    case Kind::Ball:
      return distance(coords) <= 0.0;
    case Kind::Point: {
      for (int c = 0; c < dim_; ++c)
        if (coords[c] != z_[c]) return false;
      return true;
    }
    case Kind::CantorOnAxis: {
      for (int c = 1; c < dim_; ++c)
        if (coords[c] != 0.0) return false;
      return std::binary_search(endpoints_.begin(), endpoints_.end(), coords[0]);
    }
  }
  return false;
}

HitFlags detect_hits(const double* path_values, const std::vector<double>& times,
                     std::size_t window_begin, std::size_t window_end, int dim,
                     std::size_t step_stride, const TargetSet& target,
                     double threshold) {
  if (window_begin >= window_end || window_end > times.size())
    throw std::domain_error("detect_hits: empty window");
  if (target.dim() != dim)
    throw std::invalid_argument("detect_hits: dimension mismatch");

  HitFlags flags;
  double min_dist = std::numeric_limits<double>::infinity();

  std::vector<double> coords(dim);
  double prev_x = 0.0;
  bool have_prev = false;
  for (std::size_t i = window_begin; i < window_end; ++i) {
    for (int c = 0; c < dim; ++c) coords[c] = path_values[c * step_stride + i];
    min_dist = std::min(min_dist, target.distance(coords.data()));
    if (target.contains(coords.data())) flags.hit_lower = true;

    if (dim == 1) {
      // Intermediate-value crossings of member values are certain hits.
      const double x = coords[0];
      if (have_prev) {
        const double lo = std::min(prev_x, x), hi = std::max(prev_x, x);
        switch (target.kind()) {
          case TargetSet::Kind::Point: {
            const double z = target.center()[0];
            if (lo <= z && z <= hi) flags.hit_lower = true;
            break;
          }
          case TargetSet::Kind::Ball: {
            const double z = target.center()[0];
            if (lo <= z + target.eps() && z - target.eps() <= hi)
              flags.hit_lower = true;
            break;
          }
          case TargetSet::Kind::CantorOnAxis: {
            const auto& ep = target.endpoints();
            auto it = std::lower_bound(ep.begin(), ep.end(), lo);
            if (it != ep.end() && *it <= hi) flags.hit_lower = true;
            break;
          }
        }
      }
      prev_x = x;
      have_prev = true;
    }
  }
  flags.hit_upper = flags.hit_lower || min_dist <= threshold;
  return flags;
}

double hit_threshold(const VarianceModel& model, double dt, double safety) {
  if (!(dt > 0.0) || dt >= 1.0)
    throw std::domain_error("hit_threshold: dt must lie in (0, 1)");
  return safety * model.gamma(std::min(dt, model.r_max())) *
         std::sqrt(std::log(1.0 / dt));
}

namespace {

struct WindowIndices {
  std::size_t begin = 0, end = 0;  // half-open over time indices
};

WindowIndices window_indices(const std::vector<double>& times, double a, double b) {
  WindowIndices w;
  w.begin = times.size();
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] >= a - 1e-15 && w.begin == times.size()) w.begin = i;
    if (times[i] <= b + 1e-15) w.end = i + 1;
  }
  if (w.begin >= w.end) throw std::domain_error("window misses the grid");
  return w;
}

PathFactor build_factor(const ProcessSpec& spec, const std::vector<double>& times) {
  if (spec.construction == Construction::StationaryIncrementExact) {
    CovarianceSurface s = exact_covariance(spec.model, times);
    if (!s.not_pd) return *s.factor;
    // Documented fallback: the stationary-increment surface need not be
    // positive semidefinite for every admissible gamma.
  }
  return volterra_factor(spec.model, times);
}

} // namespace

HitEstimate mc_hit_probability(const ProcessSpec& spec, const TargetSet& target,
                               double a, double b, int grid_k,
                               std::size_t n_paths, std::uint64_t seed,
                               double safety, Exec exec) {
  if (!(0.0 < a && a < b) || b > spec.model.r_max() * (1.0 + 1e-12))
    throw std::domain_error("mc_hit_probability: need 0 < a < b <= r_max");
  if (n_paths < 100)
    throw std::invalid_argument("mc_hit_probability: need n_paths >= 100");
  if (grid_k < 2 || grid_k > 26)
    throw std::invalid_argument("mc_hit_probability: grid_k out of range");
  if (target.dim() != spec.dim)
    throw std::invalid_argument("mc_hit_probability: target/process dim mismatch");

  const std::size_t m = static_cast<std::size_t>(1) << grid_k;
  const auto times = uniform_grid(b, m);
  const PathFactor factor = build_factor(spec, times);
  const auto win = window_indices(times, a, b);
  const double dt = b / static_cast<double>(m);
  const double threshold = hit_threshold(spec.model, dt, safety);

  std::vector<std::uint8_t> lower(n_paths, 0), upper(n_paths, 0);
  for_each_path(
      factor, spec.dim, n_paths, seed,
      [&](std::size_t p, const double* vals) {
        const HitFlags f = detect_hits(vals, times, win.begin, win.end, spec.dim,
                                       times.size(), target, threshold);
        lower[p] = f.hit_lower ? 1 : 0;
        upper[p] = f.hit_upper ? 1 : 0;
      },
      exec);

  std::size_t k_lower = 0, k_upper = 0;
  for (std::size_t p = 0; p < n_paths; ++p) {
    k_lower += lower[p];
    k_upper += upper[p];
  }

  HitEstimate est;
  est.n_paths = n_paths;
  est.grid_size = m;
  est.threshold_used = threshold;
  est.window_a = a;
  est.window_b = b;
  est.target = target.describe();
  est.ci_lower = wilson_interval(k_lower, n_paths);
  est.ci_upper = wilson_interval(k_upper, n_paths);
  est.p_lower = est.ci_lower.p_hat;
  est.p_upper = est.ci_upper.p_hat;
  return est;
}

double point_hit_bound(const VarianceModel& model, double a, double b, double ell,
                       double c_u) {
  if (!(0.0 < a && a < b)) throw std::domain_error("point_hit_bound: 0 < a < b");
  return c_u * std::sqrt(ell) * f_gamma(model, b - a) / model.gamma(a);
}

double point_hit_bound_multiplicative(const VarianceModel& model, double a,
                                      double b, double ell, double L) {
  if (!(0.0 < a && a < b))
    throw std::domain_error("point_hit_bound_multiplicative: 0 < a < b");
  return L * std::sqrt(ell) * model.gamma(b - a) / model.gamma(a);
}

double ball_hit_F(const VarianceModel& model, double b, double z_abs) {
  const double gb = model.gamma(b);
  if (z_abs <= gb) return 1.0;
  const double ratio = gb * gb / (z_abs * z_abs);  // < 1 here
  return 1.0 - std::exp(-2.0 * std::atanh(ratio));
}

double ball_hit_bound(const VarianceModel& model, double a, double b,
                      double z_abs, double eps, double kappa, double ell,
                      double c_u, int d) {
  if (!(0.0 < a && a < b)) throw std::domain_error("ball_hit_bound: 0 < a < b");
  if (eps < 0.0) throw std::domain_error("ball_hit_bound: eps >= 0");
  if (!(kappa > 0.0 && kappa < 1.0))
    throw std::domain_error("ball_hit_bound: kappa in (0, 1)");
  if (d < 1) throw std::domain_error("ball_hit_bound: d >= 1");
  const double ga = model.gamma(a);
  const double gb = model.gamma(b);
  const double F = ball_hit_F(model, b, z_abs);
  const double ball_part = eps * (2.0 * kappa * gb / (ga * ga)) * (1.0 + 1.0 / F);
  const double point_part = c_u * std::sqrt(ell) * f_gamma(model, b - a) / ga;
  return std::pow(ball_part + point_part, d);
}

KappaEstimate estimate_kappa(const ProcessSpec& spec, double a, double b,
                             int grid_k, std::size_t n_paths, std::uint64_t seed,
                             Exec exec) {
  if (!(0.0 < a && a < b) || b > spec.model.r_max() * (1.0 + 1e-12))
    throw std::domain_error("estimate_kappa: need 0 < a < b <= r_max");
  const std::size_t m = static_cast<std::size_t>(1) << grid_k;
  const auto times = uniform_grid(b, m);
  const PathFactor factor = build_factor(spec, times);
  const auto win = window_indices(times, a, b);
  const double gb = spec.model.gamma(b);

  std::vector<std::uint8_t> above(n_paths, 0);
  for_each_path(
      factor, 1, n_paths, seed,
      [&](std::size_t p, const double* vals) {
        double lo = std::numeric_limits<double>::infinity();
        for (std::size_t i = win.begin; i < win.end; ++i)
          lo = std::min(lo, vals[i]);
        above[p] = lo > gb ? 1 : 0;
      },
      exec);
  std::size_t k = 0;
  for (std::size_t p = 0; p < n_paths; ++p) k += above[p];
  KappaEstimate est;
  est.n_paths = n_paths;
  est.ci = wilson_interval(k, n_paths);
  est.kappa = est.ci.p_hat;
  return est;
}

BallSweepReport ball_sweep(const ProcessSpec& spec, const std::vector<double>& z,
                           const std::vector<double>& eps_list, double a, double b,
                           int grid_k, std::size_t n_paths, std::uint64_t seed,
                           bool compare_upper_gauge, Exec exec) {
  if (eps_list.empty()) throw std::invalid_argument("ball_sweep: empty sweep");
  BallSweepReport report;

  std::optional<KernelOrGauge> gauge;
  std::optional<KernelOrGauge> lower_kernel;
  if (spec.model.family() == VarianceModel::Family::PowerLog) {
    const BoundCaseSelection sel =
        select_bound_case(spec.model.hurst(), spec.model.beta(), spec.dim);
    report.upper_established = sel.upper_established;
    if (sel.upper_established) gauge = sel.upper_gauge;
    lower_kernel = sel.lower_kernel;
  }
  if (compare_upper_gauge && !report.upper_established) {
    std::ostringstream os;
    os << "ball_sweep: covering upper bound not established for H="
       << spec.model.hurst() << " beta=" << spec.model.beta() << " d=" << spec.dim
       << "; it requires d > 1/H (case 1) or d = 1/H with beta < 0 (case 2)";
    throw std::invalid_argument(os.str());
  }

  double M = 1.0;
  for (double v : z) M = std::max(M, std::fabs(v) + eps_list.front());
  for (double eps : eps_list) {
    SweepRow row;
    row.eps = eps;
    row.estimate = mc_hit_probability(
        spec, TargetSet::ball(z, eps, M), a, b, grid_k, n_paths, seed, 3.0, exec);
    if (gauge) row.gauge_value = (*gauge)(eps);
    if (lower_kernel) {
      // Capacity of the ball under the selected kernel: a ball is a single
      // cell of radius eps.
      DiscreteMeasure mu({z}, {1.0}, {eps});
      const double e = energy(mu, *lower_kernel, exec);
      row.capacity_value = std::isinf(e) ? 0.0 : 1.0 / e;
    }
    report.rows.push_back(std::move(row));
  }

  std::vector<double> epss, uppers, gauges;
  for (const auto& row : report.rows) {
    if (row.estimate.p_upper > 0.0) {
      epss.push_back(row.eps);
      uppers.push_back(row.estimate.p_upper);
      if (gauge) gauges.push_back(row.gauge_value);
    }
  }
  if (epss.size() >= 2) {
    report.fitted_slope_upper = loglog_slope(epss, uppers);
    if (gauge) report.gauge_slope = loglog_slope(epss, gauges);
  }
  return report;
}

std::vector<CantorCompareRow> cantor_compare(
    double H, const std::vector<double>& betas, int d, const CantorSpec& cantor,
    int depth, double a, double b, int grid_k, std::size_t n_paths,
    std::uint64_t seed, Exec exec) {
  std::vector<CantorCompareRow> rows;
  const TargetSet target = TargetSet::cantor_on_axis(cantor, depth, d, 1.0);
  for (double beta : betas) {
    ProcessSpec spec(VarianceModel::power_log(H, beta), d);
    CantorCompareRow row;
    row.beta = beta;
    row.estimate =
        mc_hit_probability(spec, target, a, b, grid_k, n_paths, seed, 3.0, exec);
    rows.push_back(std::move(row));
  }
  return rows;
}

} // namespace gphit
