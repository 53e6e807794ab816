// Command-line front end: named, reproducible experiments over the variance
// models, potential kernels, Gaussian simulation, and MC hitting estimators.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <omp.h>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gphit/cantor.hpp"
#include "gphit/hitting.hpp"
#include "gphit/io.hpp"
#include "gphit/measure.hpp"
#include "gphit/potential.hpp"
#include "gphit/quadrature.hpp"
#include "gphit/simulate.hpp"
#include "gphit/variance.hpp"

using namespace gphit;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr const char* kAdmissibilityRule =
    "admissible (H, beta): H in (0,1) with any beta, or H = 1 with beta > 0, "
    "or H = 0 with beta < -1/2";

VarianceModel parse_model(const std::string& text) {
  if (text == "bm") return VarianceModel::power_log(0.5, 0.0);
  if (text.rfind("fbm:", 0) == 0)
    return VarianceModel::power_log(std::stod(text.substr(4)), 0.0);
  if (text.rfind("powerlog:", 0) == 0) {
    std::stringstream ss(text.substr(9));
    std::string h, b, r;
    std::getline(ss, h, ':');
    std::getline(ss, b, ':');
    std::optional<double> r_max;
    if (std::getline(ss, r, ':')) r_max = std::stod(r);
    return VarianceModel::power_log(std::stod(h), std::stod(b), r_max);
  }
  if (!text.empty() && text.front() == '{') return VarianceModel::from_json(text);
  std::ifstream in(text);
  if (!in)
    throw std::invalid_argument("model: expected bm, fbm:H, powerlog:H:beta, "
                                "inline JSON, or a JSON file path");
  std::stringstream ss;
  ss << in.rdbuf();
  return VarianceModel::from_json(ss.str());
}

VarianceModel parse_admissible_model(const std::string& text) {
  auto model = parse_model(text);
  if (!model.admissible())
    throw std::invalid_argument("model rejected; " +
                                std::string(kAdmissibilityRule));
  return model;
}

std::vector<double> parse_grid(const std::string& text) {
  // "lo:hi:step" inclusive grid, a comma list, or a single value.
  std::vector<double> out;
  if (text.find(':') == std::string::npos) {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    if (out.empty()) throw std::invalid_argument("grid: empty");
    return out;
  }
  std::stringstream ss(text);
  std::string lo, hi, step;
  if (!std::getline(ss, lo, ':') || !std::getline(ss, hi, ':') ||
      !std::getline(ss, step, ':'))
    throw std::invalid_argument("grid: expected lo:hi:step or v1,v2,...");
  const double a = std::stod(lo), b = std::stod(hi), h = std::stod(step);
  if (!(h > 0.0) || b < a) throw std::invalid_argument("grid: bad range");
  for (double v = a; v <= b + 1e-12 * std::fabs(h); v += h) out.push_back(v);
  return out;
}

std::pair<double, double> parse_window(const std::string& text) {
  std::stringstream ss(text);
  std::string a, b;
  if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':'))
    throw std::invalid_argument("window: expected a:b");
  return {std::stod(a), std::stod(b)};
}

std::vector<double> parse_vector(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  if (out.empty()) throw std::invalid_argument("vector: empty");
  return out;
}

struct GlobalOpts {
  std::uint64_t seed = 12345;
  int threads = 0;
  std::string output;
  std::string format = "csv";
};

void attach_metadata(ReportTable& table, const std::string& command,
                     const nlohmann::json& config, const GlobalOpts& g) {
  nlohmann::json echo = config;
  echo["command"] = command;
  echo["seed"] = g.seed;
  const std::string canonical = echo.dump();
  table.metadata.emplace_back("command", command);
  table.metadata.emplace_back("version", kVersion);
  table.metadata.emplace_back("seed", std::to_string(g.seed));
  table.metadata.emplace_back("config", canonical);
  std::ostringstream hash;
  hash << std::hex << config_hash(canonical);
  table.metadata.emplace_back("config_hash", hash.str());
}

void deliver(const ReportTable& table, const GlobalOpts& g) {
  if (g.output.empty()) {
    std::cout << (g.format == "json" ? render_json(table) : render_csv(table));
  } else {
    write_report(table, g.format, g.output);
  }
}

// JSON config files: top-level keys address global flags, one nested object
// per subcommand addresses its flags. Command-line values take precedence.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override {
    return "{}";
  }
  std::vector<CLI::ConfigItem> from_config(std::istream& is) const override {
    nlohmann::json j;
    is >> j;
    std::vector<CLI::ConfigItem> items;
    collect(j, {}, items);
    return items;
  }

 private:
  static void collect(const nlohmann::json& j, std::vector<std::string> parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        auto deeper = parents;
        deeper.push_back(key);
        collect(value, deeper, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      item.inputs = {value.is_string() ? value.get<std::string>()
                                       : value.dump()};
      items.push_back(std::move(item));
    }
  }
};

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for hitting probabilities of Gaussian "
               "processes with general variance functions"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--seed", g.seed, "master seed for all randomized work");
  app.add_option("--threads", g.threads, "worker threads (0 = library default)");
  app.add_option("--output", g.output, "artifact path (default: stdout)");
  app.add_option("--format", g.format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON config supplying defaults");

  // classify --------------------------------------------------------------
  auto* classify = app.add_subcommand(
      "classify", "polarity and case table over an (H, beta, d) grid");
  std::string cl_H = "0.5", cl_beta = "-1:1:0.25", cl_d = "2";
  classify->add_option("--H", cl_H, "H grid (lo:hi:step or list)");
  classify->add_option("--beta-grid,--beta", cl_beta, "beta grid");
  classify->add_option("--d", cl_d, "dimension list");

  // simulate ---------------------------------------------------------------
  auto* simulate = app.add_subcommand("simulate", "path ensemble export");
  std::string sim_model = "bm", sim_construction = "volterra", sim_bin;
  int sim_dim = 1, sim_grid_k = 8;
  std::size_t sim_paths = 100;
  double sim_t_end = 0.2;
  simulate->add_option("--model", sim_model, "bm|fbm:H|powerlog:H:beta|json");
  simulate->add_option("--dim", sim_dim, "iid coordinates");
  simulate->add_option("--construction", sim_construction, "volterra|exact")
      ->check(CLI::IsMember({"volterra", "exact"}));
  simulate->add_option("--t-end", sim_t_end, "grid end (within r_max)");
  simulate->add_option("--grid-k", sim_grid_k, "2^k grid steps");
  simulate->add_option("--paths", sim_paths, "ensemble size");
  simulate->add_option("--binary", sim_bin, "also dump the flat binary layout");

  // hitprob ----------------------------------------------------------------
  auto* hitprob = app.add_subcommand(
      "hitprob", "MC hitting estimate with bracketing detection and bounds");
  std::string hp_model = "bm", hp_window = "0.1:0.2", hp_target = "point";
  std::string hp_z = "0";
  double hp_eps = 0.05, hp_q = 0.25, hp_safety = 3.0, hp_cu = 1.0, hp_ell = 1.0;
  int hp_depth = 6, hp_dim = 1, hp_grid_k = 10;
  std::size_t hp_paths = 10000;
  hitprob->add_option("--model", hp_model, "process model");
  hitprob->add_option("--window", hp_window, "observation window a:b");
  hitprob->add_option("--target", hp_target, "point|ball|cantor")
      ->check(CLI::IsMember({"point", "ball", "cantor"}));
  hitprob->add_option("--z", hp_z, "target center (comma vector)");
  hitprob->add_option("--eps", hp_eps, "ball radius");
  hitprob->add_option("--q", hp_q, "cantor ratio");
  hitprob->add_option("--depth", hp_depth, "cantor construction depth");
  hitprob->add_option("--d", hp_dim, "process dimension");
  hitprob->add_option("--grid-k", hp_grid_k, "2^k grid steps");
  hitprob->add_option("--paths", hp_paths, "MC paths");
  hitprob->add_option("--safety", hp_safety, "threshold safety multiplier");
  hitprob->add_option("--c-u", hp_cu, "constant for the point-hit bound");
  hitprob->add_option("--ell", hp_ell, "commensurability constant");

  // capacity ---------------------------------------------------------------
  auto* capacity = app.add_subcommand(
      "capacity", "energy minimization over discrete measures");
  std::string cap_set = "segment", cap_kernel = "k0", cap_points = "512";
  std::string cap_model = "bm", cap_window = "0.05:0.3";
  std::string cap_placement = "midpoints";
  double cap_q = 1.0 / 3.0, cap_tol = 1e-8;
  int cap_level = 6, cap_d = 2;
  capacity->add_option("--set", cap_set, "segment|cantor")
      ->check(CLI::IsMember({"segment", "cantor"}));
  capacity->add_option("--placement", cap_placement,
                       "midpoints|endpoints (cantor atom placement)")
      ->check(CLI::IsMember({"midpoints", "endpoints"}));
  capacity->add_option("--points", cap_points, "point counts (list)");
  capacity->add_option("--q", cap_q, "cantor ratio");
  capacity->add_option("--level", cap_level, "cantor level for placement");
  capacity->add_option("--kernel", cap_kernel, "k0|kbeta:B|model-K");
  capacity->add_option("--model", cap_model, "model for kernel=model-K");
  capacity->add_option("--d", cap_d, "dimension for kernel=model-K");
  capacity->add_option("--window", cap_window, "window a:b for kernel=model-K");
  capacity->add_option("--tol", cap_tol, "duality gap tolerance");

  // cantor -----------------------------------------------------------------
  auto* cantor = app.add_subcommand(
      "cantor", "positivity series and premeasure sequences");
  double ct_q = 1.0 / 3.0, ct_fat_c = 0.0, ct_fat_alpha = 0.5;
  int ct_levels = 20, ct_d = 2;
  double ct_gauge_exp = std::numeric_limits<double>::quiet_NaN();
  double ct_gauge_log = 0.0;
  double ct_kernel_exp = std::numeric_limits<double>::quiet_NaN();
  double ct_kernel_log = 0.0;
  cantor->add_option("--q", ct_q, "constant ratio in (0, 1/2)");
  cantor->add_option("--fat-c", ct_fat_c, "slightly-fat sequence constant c>1");
  cantor->add_option("--fat-alpha", ct_fat_alpha, "series exponent alpha");
  cantor->add_option("--levels", ct_levels, "levels to evaluate");
  cantor->add_option("--d", ct_d, "embedding dimension");
  cantor->add_option("--gauge-exp", ct_gauge_exp, "gauge power exponent");
  cantor->add_option("--gauge-log-exp", ct_gauge_log, "gauge log exponent");
  cantor->add_option("--kernel-exp", ct_kernel_exp,
                     "kernel power exponent (series)");
  cantor->add_option("--kernel-log-exp", ct_kernel_log, "kernel log exponent");

  // bounds-sweep ------------------------------------------------------------
  auto* sweep = app.add_subcommand(
      "bounds-sweep", "shrinking-ball or cantor sandwich experiment");
  std::string sw_model = "bm", sw_window = "0.05:0.2", sw_z = "0.05,0,0";
  std::string sw_eps = "0.125,0.0625,0.03125", sw_target = "ball";
  std::string sw_H = "", sw_betas = "";
  double sw_q = 0.25;
  int sw_dim = 3, sw_grid_k = 10, sw_depth = 6;
  std::size_t sw_paths = 10000;
  bool sw_no_upper = false;
  sweep->add_option("--model", sw_model, "process model (ball sweep)");
  sweep->add_option("--d", sw_dim, "process dimension");
  sweep->add_option("--window", sw_window, "observation window a:b");
  sweep->add_option("--target", sw_target, "ball|cantor")
      ->check(CLI::IsMember({"ball", "cantor"}));
  sweep->add_option("--z", sw_z, "ball center");
  sweep->add_option("--eps-grid", sw_eps, "radii (comma list)");
  sweep->add_option("--H", sw_H, "H for the cantor comparison");
  sweep->add_option("--betas", sw_betas, "beta regimes to compare (cantor)");
  sweep->add_option("--q", sw_q, "cantor ratio");
  sweep->add_option("--depth", sw_depth, "cantor construction depth");
  sweep->add_option("--grid-k", sw_grid_k, "2^k grid steps");
  sweep->add_option("--paths", sw_paths, "MC paths per radius");
  sweep->add_flag("--no-upper", sw_no_upper,
                  "skip the covering-gauge comparison");

  // Global flags remain usable after the subcommand name.
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
    if (g.threads > 0) omp_set_num_threads(g.threads);

    if (classify->parsed()) {
      nlohmann::json cfg{{"H", cl_H}, {"beta", cl_beta}, {"d", cl_d}};
      ReportTable t;
      attach_metadata(t, "classify", cfg, g);
      t.columns = {"H",        "beta",       "d",
                   "polarity", "bound_cases", "upper_established",
                   "commensurate", "scaling_limit"};
      for (double H : parse_grid(cl_H)) {
        for (int d : [&] {
               std::vector<int> ds;
               for (double v : parse_grid(cl_d)) ds.push_back(static_cast<int>(v));
               return ds;
             }()) {
          for (double beta : parse_grid(cl_beta)) {
            const auto model = VarianceModel::power_log(H, beta);
            if (!model.admissible())
              throw std::invalid_argument(
                  "classify: (H=" + std::to_string(H) +
                  ", beta=" + std::to_string(beta) + ") rejected; " +
                  kAdmissibilityRule);
            const auto pol = polarity_classify(H, beta, d);
            const auto sel = select_bound_case(H, beta, d);
            std::ostringstream cases;
            for (std::size_t i = 0; i < sel.cases.size(); ++i)
              cases << (i ? "+" : "") << sel.cases[i];
            if (sel.boundary_family) cases << "x";
            const auto comm = commensurability_check(model, d);
            t.rows.push_back({H, beta, std::int64_t(d), to_string(pol),
                              cases.str(),
                              std::string(sel.upper_established ? "yes" : "no"),
                              std::string(comm.status == Commensurability::True
                                              ? "yes"
                                              : "no"),
                              comm.limit});
          }
        }
      }
      deliver(t, g);
      return 0;
    }

    if (simulate->parsed()) {
      const auto model = parse_admissible_model(sim_model);
      ProcessSpec spec(model, sim_dim,
                       sim_construction == "exact"
                           ? Construction::StationaryIncrementExact
                           : Construction::VolterraCellIntegrated);
      const std::size_t m = std::size_t(1) << sim_grid_k;
      const auto times = uniform_grid(sim_t_end, m);
      std::string factor_note = "volterra";
      PathFactor factor = volterra_factor(model, times);
      if (spec.construction == Construction::StationaryIncrementExact) {
        auto surface = exact_covariance(model, times);
        if (surface.not_pd) {
          factor_note = "exact-not-pd-fallback-volterra";
        } else {
          factor = *surface.factor;
          factor_note = "exact";
        }
      }
      const auto ensemble = sample_paths(factor, sim_dim, sim_paths, g.seed);
      if (!sim_bin.empty()) {
        std::ofstream bin(sim_bin, std::ios::binary);
        if (!bin) throw std::runtime_error("simulate: cannot open " + sim_bin);
        write_ensemble(bin, ensemble);
      }
      nlohmann::json cfg{{"model", sim_model},        {"dim", sim_dim},
                         {"construction", sim_construction},
                         {"t_end", sim_t_end},        {"grid_k", sim_grid_k},
                         {"paths", sim_paths}};
      ReportTable t;
      attach_metadata(t, "simulate", cfg, g);
      t.metadata.emplace_back("factor", factor_note);
      t.columns = {"t"};
      const std::size_t head = std::min<std::size_t>(sim_paths, 8);
      for (std::size_t p = 0; p < head; ++p)
        for (int c = 0; c < sim_dim; ++c)
          t.columns.push_back("p" + std::to_string(p) + "c" + std::to_string(c));
      for (std::size_t i = 0; i < times.size(); ++i) {
        std::vector<ReportCell> row{times[i]};
        for (std::size_t p = 0; p < head; ++p)
          for (int c = 0; c < sim_dim; ++c) row.push_back(ensemble.at(p, c, i));
        t.rows.push_back(std::move(row));
      }
      deliver(t, g);
      return 0;
    }

    if (hitprob->parsed()) {
      const auto model = parse_admissible_model(hp_model);
      const auto [a, b] = parse_window(hp_window);
      ProcessSpec spec(model, hp_dim);
      std::optional<TargetSet> target;
      double eps_or_depth = 0.0;
      const auto sup_norm = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::fabs(x));
        return m;
      };
      if (hp_target == "point") {
        auto z = parse_vector(hp_z);
        z.resize(hp_dim, 0.0);
        target = TargetSet::point(z, std::max(1.0, sup_norm(z)));
      } else if (hp_target == "ball") {
        auto z = parse_vector(hp_z);
        z.resize(hp_dim, 0.0);
        target = TargetSet::ball(z, hp_eps, std::max(1.0, sup_norm(z) + hp_eps));
        eps_or_depth = hp_eps;
      } else {
        target = TargetSet::cantor_on_axis(CantorSpec::constant(hp_q, hp_dim),
                                           hp_depth, hp_dim, 1.0);
        eps_or_depth = hp_depth;
      }
      const auto est = mc_hit_probability(spec, *target, a, b, hp_grid_k,
                                          hp_paths, g.seed, hp_safety);
      nlohmann::json cfg{{"model", hp_model},   {"window", hp_window},
                         {"target", hp_target}, {"z", hp_z},
                         {"eps", hp_eps},       {"q", hp_q},
                         {"depth", hp_depth},   {"d", hp_dim},
                         {"grid_k", hp_grid_k}, {"paths", hp_paths},
                         {"safety", hp_safety}, {"c_u", hp_cu},
                         {"ell", hp_ell}};
      ReportTable t;
      attach_metadata(t, "hitprob", cfg, g);
      t.columns = {"target",   "eps_or_depth", "p_lower",  "p_upper",
                   "ci_lower_lo", "ci_lower_hi", "ci_upper_lo", "ci_upper_hi",
                   "n_paths",  "grid_k",       "threshold", "point_bound"};
      double bound = std::numeric_limits<double>::quiet_NaN();
      if (hp_dim == 1 && hp_target == "point")
        bound = point_hit_bound(model, a, b, hp_ell, hp_cu);
      t.rows.push_back({est.target, eps_or_depth, est.p_lower, est.p_upper,
                        est.ci_lower.lo, est.ci_lower.hi, est.ci_upper.lo,
                        est.ci_upper.hi, std::int64_t(est.n_paths),
                        std::int64_t(hp_grid_k), est.threshold_used, bound});
      deliver(t, g);
      return 0;
    }

    if (capacity->parsed()) {
      KernelOrGauge kernel = newtonian_kernel(0.0);
      if (cap_kernel == "k0") {
        kernel = newtonian_kernel(0.0);
      } else if (cap_kernel.rfind("kbeta:", 0) == 0) {
        kernel = newtonian_kernel(std::stod(cap_kernel.substr(6)));
      } else if (cap_kernel == "model-K") {
        const auto [a, b] = parse_window(cap_window);
        kernel = kernel_K(parse_admissible_model(cap_model), cap_d, a, b);
      } else {
        throw std::invalid_argument("capacity: kernel must be k0, kbeta:B, or "
                                    "model-K");
      }
      nlohmann::json cfg{{"set", cap_set},     {"points", cap_points},
                         {"q", cap_q},         {"level", cap_level},
                         {"kernel", cap_kernel}, {"tol", cap_tol}};
      ReportTable t;
      attach_metadata(t, "capacity", cfg, g);
      t.columns = {"n", "energy", "energy_offdiag", "capacity",
                   "converged", "duality_gap", "iterations"};
      for (double nd : parse_grid(cap_points)) {
        const std::size_t n = static_cast<std::size_t>(nd);
        std::vector<std::vector<double>> pts;
        std::vector<double> rad;
        if (cap_set == "segment") {
          chebyshev_segment(n, 0.0, 1.0, pts, rad);
        } else {
          // Midpoints cover the construction cells; endpoints are genuine
          // members of the limit set.
          const auto ivs =
              cantor_build(CantorSpec::constant(cap_q), cap_level);
          for (const auto& iv : ivs) {
            if (cap_placement == "midpoints") {
              pts.push_back({0.5 * (iv.lo + iv.hi)});
              rad.push_back(0.5 * (iv.hi - iv.lo));
            } else {
              pts.push_back({iv.lo});
              pts.push_back({iv.hi});
              rad.push_back(0.25 * (iv.hi - iv.lo));
              rad.push_back(0.25 * (iv.hi - iv.lo));
            }
          }
        }
        const auto res = capacity_estimate(pts, rad, kernel, cap_tol);
        t.rows.push_back({std::int64_t(pts.size()), res.min_energy,
                          res.off_diagonal_energy, res.capacity,
                          std::string(res.converged ? "yes" : "no"),
                          res.duality_gap, std::int64_t(res.iterations)});
      }
      deliver(t, g);
      return 0;
    }

    if (cantor->parsed()) {
      const bool fat = ct_fat_c > 0.0;
      const CantorSpec spec = fat
          ? CantorSpec::slightly_fat(ct_fat_c, ct_fat_alpha, ct_d)
          : CantorSpec::constant(ct_q, ct_d);
      nlohmann::json cfg{{"q", ct_q},           {"fat_c", ct_fat_c},
                         {"fat_alpha", ct_fat_alpha}, {"levels", ct_levels},
                         {"gauge_exp", std::isnan(ct_gauge_exp) ? "none"
                              : format_double17(ct_gauge_exp)},
                         {"kernel_exp", std::isnan(ct_kernel_exp) ? "none"
                              : format_double17(ct_kernel_exp)}};
      ReportTable t;
      attach_metadata(t, "cantor", cfg, g);
      if (!fat)
        t.metadata.emplace_back("dimension",
                                format_double17(spec.dimension()));

      std::optional<SeriesResult> series;
      if (!std::isnan(ct_kernel_exp)) {
        const auto kernel = KernelOrGauge::power_log_kernel(
            1.0, -ct_kernel_exp, -ct_kernel_log);
        series = cantor_capacity_series(spec, kernel, ct_levels);
        t.metadata.emplace_back("series_verdict", to_string(series->verdict));
        t.metadata.emplace_back("tail_exponent",
                                format_double17(series->tail_exponent));
      }
      std::optional<PremeasureResult> pre;
      if (!std::isnan(ct_gauge_exp)) {
        const auto gauge = KernelOrGauge::power_log_gauge(1.0, ct_gauge_exp,
                                                          ct_gauge_log);
        pre = hausdorff_premeasure(spec, gauge, ct_levels);
        t.metadata.emplace_back("premeasure_trend", to_string(pre->trend));
      }

      t.columns = {"n", "term", "partial_sum", "premeasure"};
      for (int n = 1; n <= ct_levels; ++n) {
        std::vector<ReportCell> row{std::int64_t(n)};
        if (series) {
          row.push_back(std::exp(series->log_terms[n - 1]));
          row.push_back(series->partial_sums[n - 1]);
        } else {
          row.push_back(std::string(""));
          row.push_back(std::string(""));
        }
        row.push_back(pre ? ReportCell(pre->values[n - 1])
                          : ReportCell(std::string("")));
        t.rows.push_back(std::move(row));
      }
      deliver(t, g);
      return 0;
    }

    if (sweep->parsed()) {
      const auto [a, b] = parse_window(sw_window);
      if (sw_target == "cantor") {
        // Hit-frequency comparison across beta regimes at matched grids/seed.
        if (sw_H.empty() || sw_betas.empty())
          throw std::invalid_argument(
              "bounds-sweep: cantor comparison needs --H and --betas");
        const auto cs = CantorSpec::constant(sw_q, sw_dim);
        const auto rows =
            cantor_compare(std::stod(sw_H), parse_vector(sw_betas), sw_dim, cs,
                           sw_depth, a, b, sw_grid_k, sw_paths, g.seed);
        nlohmann::json cfg{{"target", "cantor"}, {"H", sw_H},
                           {"betas", sw_betas},  {"q", sw_q},
                           {"depth", sw_depth},  {"d", sw_dim},
                           {"window", sw_window}, {"grid_k", sw_grid_k},
                           {"paths", sw_paths}};
        ReportTable t;
        attach_metadata(t, "bounds-sweep", cfg, g);
        t.columns = {"beta",        "p_lower",     "p_upper",
                     "ci_upper_lo", "ci_upper_hi", "n_paths",
                     "grid_k",      "threshold"};
        for (const auto& row : rows) {
          t.rows.push_back({row.beta, row.estimate.p_lower,
                            row.estimate.p_upper, row.estimate.ci_upper.lo,
                            row.estimate.ci_upper.hi,
                            std::int64_t(row.estimate.n_paths),
                            std::int64_t(sw_grid_k),
                            row.estimate.threshold_used});
        }
        deliver(t, g);
        return 0;
      }
      const auto model = parse_admissible_model(sw_model);
      ProcessSpec spec(model, sw_dim);
      auto z = parse_vector(sw_z);
      z.resize(sw_dim, 0.0);
      nlohmann::json cfg{{"model", sw_model}, {"d", sw_dim},
                         {"window", sw_window}, {"z", sw_z},
                         {"eps_grid", sw_eps}, {"grid_k", sw_grid_k},
                         {"paths", sw_paths}};
      if (sw_eps.empty()) {
        // An empty sweep is a vacuous success: header-only artifact.
        ReportTable t;
        attach_metadata(t, "bounds-sweep", cfg, g);
        t.columns = {"eps",        "p_lower",     "p_upper", "ci_upper_lo",
                     "ci_upper_hi", "gauge_value", "capacity_value",
                     "n_paths",    "grid_k",      "threshold"};
        deliver(t, g);
        return 0;
      }
      const auto report =
          ball_sweep(spec, z, parse_vector(sw_eps), a, b, sw_grid_k, sw_paths,
                     g.seed, !sw_no_upper);
      ReportTable t;
      attach_metadata(t, "bounds-sweep", cfg, g);
      t.metadata.emplace_back("fitted_slope_upper",
                              format_double17(report.fitted_slope_upper));
      t.metadata.emplace_back("gauge_slope",
                              format_double17(report.gauge_slope));
      t.metadata.emplace_back(
          "upper_established",
          report.upper_established ? "yes" : "no");
      t.columns = {"eps",        "p_lower",     "p_upper", "ci_upper_lo",
                   "ci_upper_hi", "gauge_value", "capacity_value",
                   "n_paths",    "grid_k",      "threshold"};
      for (const auto& row : report.rows) {
        t.rows.push_back({row.eps, row.estimate.p_lower, row.estimate.p_upper,
                          row.estimate.ci_upper.lo, row.estimate.ci_upper.hi,
                          row.gauge_value, row.capacity_value,
                          std::int64_t(row.estimate.n_paths),
                          std::int64_t(sw_grid_k),
                          row.estimate.threshold_used});
      }
      deliver(t, g);
      return 0;
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
