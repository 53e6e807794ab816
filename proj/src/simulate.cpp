#include "gphit/simulate.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "gphit/quadrature.hpp"
#include "gphit/rng.hpp"
#include "json.hpp"

namespace gphit {

ProcessSpec::ProcessSpec(VarianceModel m, int d, Construction c, double ell)
    : model(std::move(m)), dim(d), construction(c), ell_target(ell) {
  if (dim < 1) throw std::invalid_argument("ProcessSpec: dim must be >= 1");
  if (ell_target < 1.0)
    throw std::invalid_argument("ProcessSpec: ell must be >= 1");
  if (!model.admissible())
    throw std::invalid_argument("ProcessSpec: model outside the admissible family");
}

std::string ProcessSpec::to_json() const {
  nlohmann::json j;
  j["model"] = nlohmann::json::parse(model.to_json());
  j["dim"] = dim;
  j["construction"] = construction == Construction::VolterraCellIntegrated
                          ? "volterra"
                          : "exact";
  j["ell"] = ell_target;
  return j.dump();
}

ProcessSpec ProcessSpec::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  const auto model = VarianceModel::from_json(j.at("model").dump());
  const std::string c = j.value("construction", std::string("volterra"));
  return ProcessSpec(model, j.value("dim", 1),
                     c == "exact" ? Construction::StationaryIncrementExact
                                  : Construction::VolterraCellIntegrated,
                     j.value("ell", 1.0));
}

std::vector<double> uniform_grid(double t_end, std::size_t steps) {
  if (!(t_end > 0.0) || steps < 1)
    throw std::invalid_argument("uniform_grid: bad arguments");
  std::vector<double> t(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i)
    t[i] = t_end * static_cast<double>(i) / static_cast<double>(steps);
  return t;
}

namespace {

void validate_times(const std::vector<double>& times) {
  if (times.size() < 2 || times.front() != 0.0)
    throw std::invalid_argument("times: grid must start at t_0 = 0");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw std::invalid_argument("times: grid must be strictly increasing");
}

bool nearly_uniform(const std::vector<double>& times) {
  const double dt = times[1] - times[0];
  for (std::size_t i = 1; i + 1 < times.size(); ++i)
    if (std::fabs(times[i + 1] - times[i] - dt) > 1e-9 * dt) return false;
  return true;
}

} // namespace

PathFactor PathFactor::toeplitz(std::vector<double> column,
                                std::vector<double> times, std::string id) {
  validate_times(times);
  PathFactor f;
  f.toeplitz_ = true;
  f.m_ = column.size();
  if (f.m_ + 1 != times.size())
    throw std::invalid_argument("PathFactor: column/times mismatch");
  f.constant_column_ = true;
  for (double w : column)
    if (std::fabs(w - column[0]) > 1e-9 * std::fabs(column[0]))
      f.constant_column_ = false;
  f.data_ = std::move(column);
  f.times_ = std::move(times);
  f.id_ = std::move(id);
  return f;
}

PathFactor PathFactor::dense(std::vector<double> lower, std::size_t m,
                             std::vector<double> times, std::string id) {
  validate_times(times);
  if (lower.size() != m * m || m + 1 != times.size())
    throw std::invalid_argument("PathFactor: dense shape mismatch");
  PathFactor f;
  f.toeplitz_ = false;
  f.m_ = m;
  f.data_ = std::move(lower);
  f.times_ = std::move(times);
  f.id_ = std::move(id);
  return f;
}

double PathFactor::entry(std::size_t i, std::size_t j) const {
  if (i < 1 || i > m_ || j < 1 || j > m_)
    throw std::out_of_range("PathFactor::entry");
  if (j > i) return 0.0;
  return toeplitz_ ? data_[i - j] : data_[(i - 1) * m_ + (j - 1)];
}

void PathFactor::apply(const double* z, double* out) const {
  out[0] = 0.0;
  if (toeplitz_ && constant_column_) {
    const double w0 = data_[0];
    double acc = 0.0;
    for (std::size_t i = 1; i <= m_; ++i) {
      acc += w0 * z[i - 1];
      out[i] = acc;
    }
    return;
  }
  if (toeplitz_) {
    for (std::size_t i = 1; i <= m_; ++i) {
      double acc = 0.0;
      const double* w = data_.data() + (i - 1);
      for (std::size_t j = 0; j < i; ++j) acc += w[-static_cast<std::ptrdiff_t>(j)] * z[j];
      out[i] = acc;
    }
    return;
  }
  for (std::size_t i = 1; i <= m_; ++i) {
    double acc = 0.0;
    const double* row = data_.data() + (i - 1) * m_;
    for (std::size_t j = 0; j < i; ++j) acc += row[j] * z[j];
    out[i] = acc;
  }
}

std::vector<double> PathFactor::covariance() const {
  std::vector<double> sigma(m_ * m_, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t si = 1; si <= static_cast<std::ptrdiff_t>(m_); ++si) {
    const std::size_t i = static_cast<std::size_t>(si);
    for (std::size_t j = 1; j <= i; ++j) {
      double acc = 0.0;
      for (std::size_t k = 1; k <= j; ++k) acc += entry(i, k) * entry(j, k);
      sigma[(i - 1) * m_ + (j - 1)] = acc;
      sigma[(j - 1) * m_ + (i - 1)] = acc;
    }
  }
  return sigma;
}

PathFactor volterra_factor(const VarianceModel& model,
                           const std::vector<double>& times) {
  validate_times(times);
  const std::size_t m = times.size() - 1;
  if (times.back() > model.r_max() * (1.0 + 1e-12))
    throw std::invalid_argument("volterra_factor: grid exceeds r_max");

  std::ostringstream id;
  id << "volterra " << model.describe() << " m=" << m << " t_end=" << times.back();

  if (nearly_uniform(times)) {
    // L(i,j) = w[i-j], w[k]^2 = gamma^2((k+1) dt) - gamma^2(k dt).
    std::vector<double> w(m);
    for (std::size_t k = 0; k < m; ++k) {
      const double inc = model.gamma_sq(times[k + 1]) - model.gamma_sq(times[k]);
      if (!(inc >= 0.0))
        throw std::runtime_error(
            "volterra_factor: negative gamma^2 increment in cell " +
            std::to_string(k));
      w[k] = std::sqrt(inc);
    }
    return PathFactor::toeplitz(std::move(w), times, id.str());
  }

  std::vector<double> lower(m * m, 0.0);
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= i; ++j) {
      const double hi = model.gamma_sq(times[i] - times[j - 1]);
      const double lo = model.gamma_sq(times[i] - times[j]);
      const double inc = hi - lo;
      if (!(inc >= 0.0))
        throw std::runtime_error("volterra_factor: negative increment at (" +
                                 std::to_string(i) + "," + std::to_string(j) + ")");
      lower[(i - 1) * m + (j - 1)] = std::sqrt(inc);
    }
  }
  return PathFactor::dense(std::move(lower), m, times, id.str());
}

double CovarianceSurface::cov(std::size_t i, std::size_t j) const {
  const std::size_t m = size();
  if (i < 1 || i > m || j < 1 || j > m)
    throw std::out_of_range("CovarianceSurface::cov");
  return sigma[(i - 1) * m + (j - 1)];
}

double CovarianceSurface::delta_sq(std::size_t i, std::size_t j) const {
  return cov(i, i) + cov(j, j) - 2.0 * cov(i, j);
}

double CovarianceSurface::rho(std::size_t i, std::size_t j) const {
  const double denom = std::sqrt(cov(i, i) * cov(j, j));
  if (!(denom > 0.0))
    throw std::domain_error("CovarianceSurface::rho: zero variance");
  return cov(i, j) / denom;
}

namespace {

// Cholesky with a relative pivot slack; pivots in [-slack, 0] clamp to zero.
bool cholesky_with_slack(const std::vector<double>& sigma, std::size_t m,
                         std::vector<double>& lower) {
  double trace = 0.0;
  for (std::size_t i = 0; i < m; ++i) trace += sigma[i * m + i];
  const double slack = 1e-10 * trace;
  lower.assign(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = sigma[i * m + j];
      for (std::size_t k = 0; k < j; ++k) acc -= lower[i * m + k] * lower[j * m + k];
      if (i == j) {
        if (acc < -slack) return false;
        lower[i * m + i] = std::sqrt(std::max(acc, 0.0));
      } else {
        lower[i * m + j] =
            lower[j * m + j] > 0.0 ? acc / lower[j * m + j] : 0.0;
      }
    }
  }
  return true;
}

} // namespace

CovarianceSurface exact_covariance(const VarianceModel& model,
                                   const std::vector<double>& times) {
  validate_times(times);
  const std::size_t m = times.size() - 1;
  if (times.back() > model.r_max() * (1.0 + 1e-12))
    throw std::invalid_argument("exact_covariance: grid exceeds r_max");
  CovarianceSurface s;
  s.times = times;
  s.sigma.assign(m * m, 0.0);
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= i; ++j) {
      const double v = 0.5 * (model.gamma_sq(times[i]) + model.gamma_sq(times[j]) -
                              model.gamma_sq(times[i] - times[j]));
      s.sigma[(i - 1) * m + (j - 1)] = v;
      s.sigma[(j - 1) * m + (i - 1)] = v;
    }
  }
  std::vector<double> lower;
  if (cholesky_with_slack(s.sigma, m, lower)) {
    std::ostringstream id;
    id << "exact-cholesky " << model.describe() << " m=" << m
       << " t_end=" << times.back();
    s.factor = PathFactor::dense(std::move(lower), m, times, id.str());
  } else {
    s.not_pd = true;
  }
  return s;
}

CovarianceSurface surface_from_factor(const PathFactor& factor) {
  CovarianceSurface s;
  s.times = factor.times();
  s.sigma = factor.covariance();
  s.factor = factor;
  return s;
}

PathEnsemble sample_paths(const PathFactor& factor, int dim, std::size_t n_paths,
                          std::uint64_t seed, Exec exec) {
  if (dim < 1) throw std::invalid_argument("sample_paths: dim >= 1");
  PathEnsemble e;
  e.times = factor.times();
  e.n_paths = n_paths;
  e.dim = dim;
  e.seed = seed;
  e.factor_id = factor.id();
  const std::size_t m = factor.steps();
  e.values.assign(n_paths * static_cast<std::size_t>(dim) * (m + 1), 0.0);
  if (n_paths == 0) return e;

  const auto work = [&](std::size_t p, std::vector<double>& z) {
    for (int c = 0; c < dim; ++c) {
      fill_normals(seed, p, static_cast<std::uint32_t>(c), m, z.data());
      double* out =
          e.values.data() + (p * static_cast<std::size_t>(dim) + c) * (m + 1);
      factor.apply(z.data(), out);
    }
  };

  if (exec == Exec::OpenMP) {
#pragma omp parallel
    {
      std::vector<double> z(m);
#pragma omp for schedule(static)
      for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(n_paths); ++p)
        work(static_cast<std::size_t>(p), z);
    }
  } else {
    std::vector<double> z(m);
    for (std::size_t p = 0; p < n_paths; ++p) work(p, z);
  }
  return e;
}

void for_each_path(const PathFactor& factor, int dim, std::size_t n_paths,
                   std::uint64_t seed,
                   const std::function<void(std::size_t, const double*)>& visit,
                   Exec exec) {
  if (dim < 1) throw std::invalid_argument("for_each_path: dim >= 1");
  const std::size_t m = factor.steps();
  const std::size_t stride = m + 1;

  const auto work = [&](std::size_t p, std::vector<double>& z,
                        std::vector<double>& buf) {
    for (int c = 0; c < dim; ++c) {
      fill_normals(seed, p, static_cast<std::uint32_t>(c), m, z.data());
      factor.apply(z.data(), buf.data() + static_cast<std::size_t>(c) * stride);
    }
    visit(p, buf.data());
  };

  if (exec == Exec::OpenMP) {
#pragma omp parallel
    {
      std::vector<double> z(m), buf(static_cast<std::size_t>(dim) * stride);
#pragma omp for schedule(static)
      for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(n_paths); ++p)
        work(static_cast<std::size_t>(p), z, buf);
    }
  } else {
    std::vector<double> z(m), buf(static_cast<std::size_t>(dim) * stride);
    for (std::size_t p = 0; p < n_paths; ++p) work(p, z, buf);
  }
}

double verify_commensurability(const CovarianceSurface& surface,
                               const VarianceModel& model) {
  const std::size_t m = surface.size();
  double ell = 1.0;
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = i + 1; j <= m; ++j) {
      const double d2 = surface.delta_sq(i, j);
      const double g2 = model.gamma_sq(surface.times[j] - surface.times[i]);
      if (!(d2 > 0.0))
        throw std::domain_error(
            "verify_commensurability: degenerate increment (zero variance)");
      ell = std::max(ell, std::max(d2 / g2, g2 / d2));
    }
  }
  return ell;
}

ConditionalVarianceProfile conditional_variance_profile(
    const CovarianceSurface& surface, const VarianceModel& model, double a,
    double b) {
  if (!(0.0 < a && a < b))
    throw std::domain_error("conditional_variance_profile: need 0 < a < b");
  const std::size_t m = surface.size();
  std::vector<std::size_t> window;
  for (std::size_t i = 1; i <= m; ++i)
    if (surface.times[i] >= a - 1e-15 && surface.times[i] <= b + 1e-15)
      window.push_back(i);
  if (window.size() < 3)
    throw std::domain_error("conditional_variance_profile: window misses the grid");

  ConditionalVarianceProfile out;
  out.ell_hat = verify_commensurability(surface, model);
  out.lnd_constant = std::pow(model.gamma(a), 4.0) /
                      (2.0 * out.ell_hat * std::pow(model.gamma(b), 4.0));

  // Ratios Var(B_t | B_s) / gamma^2(|t-s|) for pairs in the window, grouped
  // by gap; epsilon is the largest gap below which every ratio clears the
  // lemma constant.
  const auto ratio = [&](std::size_t si, std::size_t ti) {
    const double var_s = surface.cov(si, si);
    const double cond =
        surface.cov(ti, ti) - surface.cov(si, ti) * surface.cov(si, ti) / var_s;
    return cond / model.gamma_sq(std::fabs(surface.times[ti] - surface.times[si]));
  };

  double min_ratio_all = std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < window.size(); ++x)
    for (std::size_t y = x + 1; y < window.size(); ++y)
      min_ratio_all = std::min(min_ratio_all, ratio(window[x], window[y]));

  double eps = b - a;
  for (int halving = 0; halving < 24; ++halving) {
    double min_ratio = std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t x = 0; x < window.size(); ++x) {
      for (std::size_t y = x + 1; y < window.size(); ++y) {
        const double gap = surface.times[window[y]] - surface.times[window[x]];
        if (gap > eps) break;
        min_ratio = std::min(min_ratio, ratio(window[x], window[y]));
        any = true;
      }
    }
    if (!any) break;
    if (min_ratio >= out.lnd_constant) {
      out.min_ratio = min_ratio;
      out.epsilon = eps;
      return out;
    }
    eps *= 0.5;
  }
  out.min_ratio = min_ratio_all;
  out.epsilon = 0.0;
  return out;
}

void write_ensemble(std::ostream& os, const PathEnsemble& e) {
  const std::uint64_t header[4] = {
      static_cast<std::uint64_t>(e.n_paths), static_cast<std::uint64_t>(e.dim),
      static_cast<std::uint64_t>(e.times.size() - 1), e.seed};
  os.write(reinterpret_cast<const char*>(header), sizeof(header));
  os.write(reinterpret_cast<const char*>(e.values.data()),
           static_cast<std::streamsize>(e.values.size() * sizeof(double)));
  if (!os) throw std::runtime_error("write_ensemble: stream failure");
}

PathEnsemble read_ensemble(std::istream& is, const std::vector<double>& times) {
  std::uint64_t header[4];
  is.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!is) throw std::runtime_error("read_ensemble: truncated header");
  PathEnsemble e;
  e.n_paths = header[0];
  e.dim = static_cast<int>(header[1]);
  e.seed = header[3];
  if (times.size() != header[2] + 1)
    throw std::invalid_argument("read_ensemble: times do not match header");
  e.times = times;
  e.values.resize(e.n_paths * static_cast<std::size_t>(e.dim) * times.size());
  is.read(reinterpret_cast<char*>(e.values.data()),
          static_cast<std::streamsize>(e.values.size() * sizeof(double)));
  if (!is) throw std::runtime_error("read_ensemble: truncated payload");
  return e;
}

} // namespace gphit
