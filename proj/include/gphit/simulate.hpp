#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gphit/exec.hpp"
#include "gphit/variance.hpp"

namespace gphit {

enum class Construction { VolterraCellIntegrated, StationaryIncrementExact };

struct ProcessSpec {
  VarianceModel model;
  int dim = 1;
  Construction construction = Construction::VolterraCellIntegrated;
  double ell_target = 1.0;

  ProcessSpec(VarianceModel m, int d,
              Construction c = Construction::VolterraCellIntegrated,
              double ell = 1.0);
  std::string to_json() const;
  static ProcessSpec from_json(const std::string& text);
};

// Strictly increasing grid 0 = t_0 < t_1 < ... < t_m; the factor and the
// ensembles index steps 1..m (the process starts at zero).
std::vector<double> uniform_grid(double t_end, std::size_t steps);

// Lower-triangular factor of one scalar coordinate. Uniform-grid Volterra
// factors are Toeplitz and stored by their first column; anything else is
// dense row-major. Constant-column Toeplitz factors (Brownian case) apply as
// a running sum.
class PathFactor {
 public:
  static PathFactor toeplitz(std::vector<double> column, std::vector<double> times,
                             std::string id);
  static PathFactor dense(std::vector<double> lower, std::size_t m,
                          std::vector<double> times, std::string id);

  std::size_t steps() const { return m_; }
  const std::vector<double>& times() const { return times_; }  // size m+1
  const std::string& id() const { return id_; }
  bool is_toeplitz() const { return toeplitz_; }

  double entry(std::size_t i, std::size_t j) const;  // 1-based step indices
  // out[0] = 0, out[i] = sum_j L(i,j) z[j-1]; out has m+1 slots.
  void apply(const double* z, double* out) const;
  // Covariance of the induced process: Sigma = L L^T over steps 1..m.
  std::vector<double> covariance() const;

 private:
  bool toeplitz_ = false;
  bool constant_column_ = false;
  std::size_t m_ = 0;
  std::vector<double> data_;  // column (toeplitz) or row-major lower (dense)
  std::vector<double> times_;
  std::string id_;
};

// Cell-integrated Volterra factor: L(i,j)^2 = gamma^2(t_i - t_{j-1}) -
// gamma^2(t_i - t_j). Row sums of squares telescope to gamma^2(t_i).
PathFactor volterra_factor(const VarianceModel& model,
                           const std::vector<double>& times);

struct CovarianceSurface {
  std::vector<double> times;  // size m+1 with leading 0
  std::vector<double> sigma;  // m x m row-major, steps 1..m
  bool not_pd = false;        // factorization failed beyond the slack
  std::optional<PathFactor> factor;  // present when factorization succeeded

  std::size_t size() const { return times.size() - 1; }
  double cov(std::size_t i, std::size_t j) const;     // 1-based
  double delta_sq(std::size_t i, std::size_t j) const;
  double rho(std::size_t i, std::size_t j) const;
};

// Sigma(i,j) = (gamma^2(t_i) + gamma^2(t_j) - gamma^2(|t_i - t_j|)) / 2 with a
// slack-tolerant Cholesky attempt; failure sets not_pd instead of throwing.
CovarianceSurface exact_covariance(const VarianceModel& model,
                                   const std::vector<double>& times);

CovarianceSurface surface_from_factor(const PathFactor& factor);

struct PathEnsemble {
  std::vector<double> times;   // m+1
  std::size_t n_paths = 0;
  int dim = 1;
  std::uint64_t seed = 0;
  std::string factor_id;
  std::vector<double> values;  // (path, coord, step) row-major, step size m+1

  double at(std::size_t path, int coord, std::size_t step) const {
    return values[(path * dim + coord) * times.size() + step];
  }
};

PathEnsemble sample_paths(const PathFactor& factor, int dim, std::size_t n_paths,
                          std::uint64_t seed, Exec exec = Exec::OpenMP);

// Streaming variant: visit(path_index, values) where values is the
// (dim x (m+1)) block for that path. Thread-local buffers; visit must be safe
// to call concurrently for distinct paths.
void for_each_path(const PathFactor& factor, int dim, std::size_t n_paths,
                   std::uint64_t seed,
                   const std::function<void(std::size_t, const double*)>& visit,
                   Exec exec = Exec::OpenMP);

// Largest two-sided commensurability defect against gamma^2(|t-s|).
double verify_commensurability(const CovarianceSurface& surface,
                               const VarianceModel& model);

struct ConditionalVarianceProfile {
  double min_ratio = 0.0;       // min Var(B_t | B_s)/gamma^2(|t-s|)
  double lnd_constant = 0.0;   // gamma^4(a) / (2 ell gamma^4(b))
  double epsilon = 0.0;         // largest gap for which min_ratio clears it
  double ell_hat = 1.0;
};

ConditionalVarianceProfile conditional_variance_profile(
    const CovarianceSurface& surface, const VarianceModel& model, double a,
    double b);

// Flat binary layout: u64 n_paths, d, m, seed; then doubles path-major.
void write_ensemble(std::ostream& os, const PathEnsemble& ensemble);
PathEnsemble read_ensemble(std::istream& is, const std::vector<double>& times);

} // namespace gphit
