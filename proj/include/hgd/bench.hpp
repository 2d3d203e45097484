#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "hgd/descent.hpp"
#include "hgd/flow.hpp"
#include "hgd/problems.hpp"
#include "hgd/rng.hpp"

namespace hgd {

enum class ExperimentKind { stepsize_sweep, alpha_sweep, scaling, flow_error, certify };

inline const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::stepsize_sweep: return "stepsize_sweep";
    case ExperimentKind::alpha_sweep: return "alpha_sweep";
    case ExperimentKind::scaling: return "scaling";
    case ExperimentKind::flow_error: return "flow_error";
    case ExperimentKind::certify: return "certify";
  }
  return "unknown";
}

inline std::vector<double> default_epsilon_grid() {
  return {1e-1, std::pow(10.0, -1.5), 1e-2, std::pow(10.0, -2.5), 1e-3};
}

/// Window length and relative variation threshold used when attaching
/// stagnation plateaus to sweep runs.
inline constexpr long long kPlateauWindow = 500;
inline constexpr double kPlateauRelTol = 0.05;

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::stepsize_sweep;
  int n = 50;
  unsigned long long seed = 2;
  double alpha = 0.5;                                  // exponent for single-alpha kinds
  std::vector<double> alphas = {0.2, 0.4, 0.6, 0.8};
  std::vector<double> taus = {0.01, 0.005, 0.001, 0.0005};
  std::vector<double> epsilons = default_epsilon_grid();
  long long max_iter = 10000;
  std::string output_dir;
  int jobs = 0;                                        // 0 = hardware threads

  void validate() const {
    if (n < 1) throw std::invalid_argument("ExperimentConfig: n must be >= 1");
    if (max_iter < 1) throw std::invalid_argument("ExperimentConfig: max_iter must be >= 1");
    if (!(alpha > 0 && alpha <= 1))
      throw std::invalid_argument("ExperimentConfig: alpha must lie in (0, 1]");
    switch (kind) {
      case ExperimentKind::stepsize_sweep:
        if (taus.empty()) throw std::invalid_argument("ExperimentConfig: taus must be nonempty");
        break;
      case ExperimentKind::alpha_sweep:
        if (alphas.empty())
          throw std::invalid_argument("ExperimentConfig: alphas must be nonempty");
        if (taus.empty())
          throw std::invalid_argument("ExperimentConfig: alpha sweep needs one tau");
        break;
      case ExperimentKind::scaling:
        if (epsilons.size() < 3)
          throw std::invalid_argument("ExperimentConfig: scaling needs >= 3 epsilons");
        for (std::size_t i = 0; i + 1 < epsilons.size(); ++i)
          if (!(epsilons[i] > epsilons[i + 1]))
            throw std::invalid_argument(
                "ExperimentConfig: epsilons must be strictly decreasing");
        break;
      case ExperimentKind::flow_error:
      case ExperimentKind::certify:
        break;
    }
    for (double a : alphas)
      if (!(a > 0 && a <= 1))
        throw std::invalid_argument("ExperimentConfig: every alpha must lie in (0, 1]");
    for (double t : taus)
      if (!(t > 0)) throw std::invalid_argument("ExperimentConfig: every tau must be positive");
    for (double e : epsilons)
      if (!(e > 0))
        throw std::invalid_argument("ExperimentConfig: every epsilon must be positive");
  }
};

struct SweepResult {
  ExperimentConfig config;
  std::vector<RunRecord> records;                 // one per grid point, grid order
  std::vector<std::optional<Plateau>> plateaus;   // aligned with records
  std::string notes;
};

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares on (log x, log y).
inline FitResult fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("fit_loglog: need two equal-length samples or more");
  const std::size_t m = xs.size();
  std::vector<double> lx(m), ly(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(xs[i] > 0) || !(ys[i] > 0))
      throw std::invalid_argument("fit_loglog: samples must be positive");
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < m; ++i) { mx += lx[i]; my += ly[i]; }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0)
    throw std::invalid_argument("fit_loglog: degenerate fit (zero variance in log x)");
  FitResult fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (syy == 0.0) {
    fit.r2 = 1.0;  // constant y is matched exactly by the flat line
  } else {
    double ssres = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
      ssres += r * r;
    }
    fit.r2 = std::clamp(1.0 - ssres / syy, 0.0, 1.0);
  }
  return fit;
}

struct ScalingFit {
  ExperimentConfig config;
  std::string problem_label;
  double d0 = 0.0;                  // after projection onto the delta-ball
  std::vector<double> epsilons;
  std::vector<long long> iterations;  // measured K*_eps (cap count when capped)
  std::vector<double> taus;
  std::vector<long long> bounds;      // refined iteration bound per epsilon
  std::vector<int> in_hypothesis;     // 1 when d0 <= delta (up to rounding)
  std::vector<int> excluded;          // 1 when the run hit max_iter (off the fit)
  std::vector<double> final_dists;
  double slope = 0.0;                 // log K*_eps against log(1/eps)
  double intercept = 0.0;
  double r2 = 0.0;
  std::string notes;
};

namespace detail {

inline std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// Runs body(0..count-1) on at most `jobs` concurrent threads, in fixed waves
// so results land in index order regardless of scheduling. The first
// exception thrown by any body is rethrown after all threads joined.
template <typename F>
void run_indexed(std::size_t count, int jobs, F&& body) {
  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;
  std::vector<std::exception_ptr> errors(count);
  std::size_t next = 0;
  while (next < count) {
    const std::size_t batch = std::min<std::size_t>(static_cast<std::size_t>(jobs),
                                                    count - next);
    std::vector<std::thread> threads;
    threads.reserve(batch);
    for (std::size_t j = 0; j < batch; ++j) {
      const std::size_t idx = next + j;
      threads.emplace_back([idx, &errors, &body] {
        try {
          body(idx);
        } catch (...) {
          errors[idx] = std::current_exception();
        }
      });
    }
    for (auto& t : threads) t.join();
    next += batch;
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace detail

/// One planted composite problem; a fixed-stepsize run per tau, pure
/// iteration cap (no distance target), plateau detection attached to each
/// record. The starting point is the raw normal draw preceding the problem
/// draw in the seed stream, mirroring the reference experiment layout.
inline SweepResult run_stepsize_sweep(const ExperimentConfig& config) {
  if (config.kind != ExperimentKind::stepsize_sweep)
    throw std::invalid_argument("run_stepsize_sweep: config.kind mismatch");
  config.validate();

  SplitMix64 rng(config.seed);
  const VectorXd u0 = normal_vector(rng, config.n);
  const auto problem = make_composite_problem(config.n, config.alpha, rng, config.seed);

  SweepResult out;
  out.config = config;
  out.records.resize(config.taus.size());
  out.plateaus.resize(config.taus.size());
  detail::run_indexed(config.taus.size(), config.jobs, [&](std::size_t i) {
    RunOptions opts;
    opts.max_iter = config.max_iter;
    RunRecord rec = run_gd(problem, u0, StepsizePolicy::fixed_tau(config.taus[i]), opts);
    rec.label = "tau=" + detail::fmt_g(config.taus[i]);
    out.plateaus[i] = detect_stagnation(rec, kPlateauWindow, kPlateauRelTol);
    out.records[i] = std::move(rec);
  });
  out.notes = "problem " + problem.spec().label +
              "; raw u0 (no projection); plateau window " +
              std::to_string(kPlateauWindow) + ", rel_tol " +
              detail::fmt_g(kPlateauRelTol);
  return out;
}

/// One run per alpha at a single fixed tau (the first grid entry). Every
/// alpha rebuilds the problem from the same seed, so the starting point, the
/// minimizer and the quadratic part are shared draws; only the positive-part
/// term and its induced linear coefficient vary.
inline SweepResult run_alpha_sweep(const ExperimentConfig& config) {
  if (config.kind != ExperimentKind::alpha_sweep)
    throw std::invalid_argument("run_alpha_sweep: config.kind mismatch");
  config.validate();
  const double tau = config.taus.front();

  SweepResult out;
  out.config = config;
  out.records.resize(config.alphas.size());
  out.plateaus.resize(config.alphas.size());
  detail::run_indexed(config.alphas.size(), config.jobs, [&](std::size_t i) {
    SplitMix64 rng(config.seed);
    const VectorXd u0 = normal_vector(rng, config.n);
    const auto problem =
        make_composite_problem(config.n, config.alphas[i], rng, config.seed);
    RunOptions opts;
    opts.max_iter = config.max_iter;
    RunRecord rec = run_gd(problem, u0, StepsizePolicy::fixed_tau(tau), opts);
    rec.label = "alpha=" + detail::fmt_g(config.alphas[i]);
    out.plateaus[i] = detect_stagnation(rec, kPlateauWindow, kPlateauRelTol);
    out.records[i] = std::move(rec);
  });
  out.notes = "shared (A, u*) draw across the alpha grid (same seed stream); "
              "only the positive-part exponent and linear term vary; tau = " +
              detail::fmt_g(tau);
  return out;
}

/// For each epsilon (strictly decreasing grid), runs descent at the refined
/// stepsize until the distance target is met, then fits log K*_eps against
/// log(1/eps). The start is projected onto the delta-ball around the
/// minimizer so every run satisfies the distance hypothesis. Runs hitting
/// max_iter are kept in the table but excluded from the fit.
inline ScalingFit run_complexity_scaling(const ExperimentConfig& config) {
  if (config.kind != ExperimentKind::scaling)
    throw std::invalid_argument("run_complexity_scaling: config.kind mismatch");
  config.validate();

  SplitMix64 rng(config.seed);
  const VectorXd raw = normal_vector(rng, config.n);
  const auto problem = make_composite_problem(config.n, config.alpha, rng, config.seed);
  const ProblemSpec& ps = problem.spec();
  const VectorXd& u_star = *ps.minimizer;
  VectorXd u0 = raw;
  const double raw_dist = (raw - u_star).norm();
  if (raw_dist > ps.delta) u0 = u_star + (raw - u_star) * (ps.delta / raw_dist);

  ScalingFit out;
  out.config = config;
  out.problem_label = ps.label;
  out.d0 = (u0 - u_star).norm();
  const std::size_t m = config.epsilons.size();
  out.epsilons = config.epsilons;
  out.iterations.resize(m);
  out.taus.resize(m);
  out.bounds.resize(m);
  out.in_hypothesis.resize(m);
  out.excluded.resize(m);
  out.final_dists.resize(m);

  detail::run_indexed(m, config.jobs, [&](std::size_t i) {
    const double eps = config.epsilons[i];
    const long long bound =
        refined_iteration_bound(ps.mu, ps.beta, ps.alpha, eps, std::max(out.d0, eps));
    RunOptions opts;
    opts.max_iter = config.max_iter;
    opts.epsilon = eps;
    opts.history_stride = std::max(1LL, bound / 1000);
    RunRecord rec = run_gd(problem, u0, StepsizePolicy::refined(eps), opts);
    out.taus[i] = rec.tau_used;
    out.iterations[i] = rec.iterations;
    out.bounds[i] = bound;
    // Projection onto the delta-ball can land a few ulps outside it after the
    // norm is recomputed; that is not a hypothesis violation.
    out.in_hypothesis[i] = out.d0 <= ps.delta * (1.0 + 1e-12) ? 1 : 0;
    out.excluded[i] = rec.stop_reason == StopReason::target_reached ? 0 : 1;
    out.final_dists[i] = rec.dist.empty() ? std::nan("") : rec.dist.back();
  });

  std::vector<double> xs, ys;
  std::string skipped;
  for (std::size_t i = 0; i < m; ++i) {
    if (out.excluded[i]) {
      if (!skipped.empty()) skipped += ", ";
      skipped += "eps=" + detail::fmt_g(config.epsilons[i]);
      continue;
    }
    xs.push_back(1.0 / config.epsilons[i]);
    ys.push_back(static_cast<double>(out.iterations[i]));
  }
  if (xs.size() >= 2) {
    const FitResult fit = fit_loglog(xs, ys);
    out.slope = fit.slope;
    out.intercept = fit.intercept;
    out.r2 = fit.r2;
  } else {
    out.slope = out.intercept = out.r2 = std::nan("");
    out.notes = "fit skipped: fewer than two runs reached their target; ";
  }
  out.notes += skipped.empty() ? "all runs reached their target"
                               : "excluded from fit (hit max_iter): " + skipped;
  return out;
}

namespace detail {

inline std::ofstream open_out(const std::string& path, const char* who) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(std::string(who) + ": cannot open " + path);
  return f;
}

inline void finish_out(std::ofstream& f, const std::string& path, const char* who) {
  f.flush();
  if (!f) throw std::runtime_error(std::string(who) + ": write failed for " + path);
}

inline std::string join_g(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += fmt_g(v[i]);
  }
  return s;
}

}  // namespace detail

/// Sweep CSV: comment header with the full configuration and per-run
/// outcomes, then rows (run_label, k, dist, grad_norm) in grid order.
inline void emit_csv(const SweepResult& result, const std::string& path) {
  auto f = detail::open_out(path, "emit_csv");
  const ExperimentConfig& c = result.config;
  f << "# kind = " << to_string(c.kind) << "\n";
  f << "# n = " << c.n << "\n";
  f << "# seed = " << c.seed << "\n";
  f << "# max_iter = " << c.max_iter << "\n";
  if (c.kind == ExperimentKind::alpha_sweep) {
    f << "# alphas = " << detail::join_g(c.alphas) << "\n";
    f << "# tau = " << detail::fmt_g(c.taus.front()) << "\n";
  } else {
    f << "# alpha = " << detail::fmt_g(c.alpha) << "\n";
    f << "# taus = " << detail::join_g(c.taus) << "\n";
  }
  f << "# plateau_window = " << kPlateauWindow << "\n";
  f << "# plateau_rel_tol = " << detail::fmt_g(kPlateauRelTol) << "\n";
  f << "# notes = " << result.notes << "\n";
  for (std::size_t r = 0; r < result.records.size(); ++r) {
    const RunRecord& rec = result.records[r];
    f << "# run " << rec.label << ": tau = " << detail::fmt17(rec.tau_used)
      << ", iterations = " << rec.iterations
      << ", stop_reason = " << to_string(rec.stop_reason);
    if (r < result.plateaus.size() && result.plateaus[r]) {
      f << ", plateau_level = " << detail::fmt17(result.plateaus[r]->level)
        << ", plateau_onset = " << result.plateaus[r]->onset;
    } else {
      f << ", plateau = none";
    }
    f << "\n";
  }
  f << "run_label,k,dist,grad_norm\n";
  for (const RunRecord& rec : result.records) {
    const std::size_t len = rec.grad_norm.size();
    for (std::size_t i = 0; i < len; ++i) {
      f << rec.label << "," << rec.iteration_at(i) << ",";
      if (i < rec.dist.size()) f << detail::fmt17(rec.dist[i]);
      f << "," << detail::fmt17(rec.grad_norm[i]) << "\n";
    }
  }
  detail::finish_out(f, path, "emit_csv");
}

/// Scaling CSV: fit summary in the comment header, then one row per epsilon
/// (epsilon, tau, iterations, bound, in_hypothesis).
inline void emit_csv(const ScalingFit& result, const std::string& path) {
  auto f = detail::open_out(path, "emit_csv");
  const ExperimentConfig& c = result.config;
  f << "# kind = " << to_string(c.kind) << "\n";
  f << "# problem = " << result.problem_label << "\n";
  f << "# n = " << c.n << "\n";
  f << "# seed = " << c.seed << "\n";
  f << "# alpha = " << detail::fmt_g(c.alpha) << "\n";
  f << "# max_iter = " << c.max_iter << "\n";
  f << "# d0 = " << detail::fmt17(result.d0) << "\n";
  f << "# slope = " << detail::fmt17(result.slope) << "\n";
  f << "# intercept = " << detail::fmt17(result.intercept) << "\n";
  f << "# r2 = " << detail::fmt17(result.r2) << "\n";
  f << "# notes = " << result.notes << "\n";
  f << "epsilon,tau,iterations,bound,in_hypothesis\n";
  for (std::size_t i = 0; i < result.epsilons.size(); ++i) {
    f << detail::fmt17(result.epsilons[i]) << "," << detail::fmt17(result.taus[i]) << ","
      << result.iterations[i] << "," << result.bounds[i] << ","
      << result.in_hypothesis[i] << "\n";
  }
  detail::finish_out(f, path, "emit_csv");
}

/// Certificate CSV: constants and verdict in the comment header, then one
/// row per step (l, t, E_l, bound).
inline void emit_csv(const ErrorCertificate& cert, const std::string& path) {
  auto f = detail::open_out(path, "emit_csv");
  f << "# problem = " << cert.problem_label << "\n";
  f << "# tau = " << detail::fmt17(cert.tau) << "\n";
  f << "# K = " << cert.K << "\n";
  f << "# C_E = " << detail::fmt17(cert.C_E) << "\n";
  f << "# M = " << detail::fmt17(cert.M) << "\n";
  f << "# beta_bar = " << detail::fmt17(cert.beta_bar) << "\n";
  f << "# binding_constraint = " << cert.binding_constraint << "\n";
  f << "# K_required = " << cert.K_required << "\n";
  f << "# guaranteed = " << (cert.guaranteed ? "true" : "false") << "\n";
  f << "# ode_tol = " << detail::fmt17(cert.ode_tol) << "\n";
  f << "# pass = " << (cert.pass ? "true" : "false") << "\n";
  f << "l,t,E_l,bound\n";
  for (std::size_t l = 0; l < cert.E.size(); ++l) {
    f << l << "," << detail::fmt17(static_cast<double>(l) * cert.tau) << ","
      << detail::fmt17(cert.E[l]) << "," << detail::fmt17(cert.bound) << "\n";
  }
  detail::finish_out(f, path, "emit_csv");
}

namespace detail {

inline std::string svg_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// Presentation form of a run label: spell the grid variable with its usual
// Greek letter in chart legends.
inline std::string legend_label(const std::string& label) {
  if (label.rfind("tau=", 0) == 0) return "τ=" + label.substr(4);
  if (label.rfind("alpha=", 0) == 0) return "α=" + label.substr(6);
  return label;
}

}  // namespace detail

/// Standalone SVG line chart of the distance histories: one polyline per
/// run, optional log-scale y, legend taken from run labels.
inline void emit_svg_chart(const SweepResult& result, const std::string& path,
                           bool log_y) {
  if (result.records.empty())
    throw std::invalid_argument("emit_svg_chart: nothing to plot");
  for (const RunRecord& rec : result.records)
    if (rec.dist.empty())
      throw std::invalid_argument(
          "emit_svg_chart: record '" + rec.label + "' carries no distance history");

  const double width = 960, height = 600;
  const double ml = 72, mr = 216, mt = 48, mb = 56;
  const double pw = width - ml - mr, ph = height - mt - mb;

  const double dist_floor = 1e-300;
  auto transform = [&](double d) {
    return log_y ? std::log10(std::max(d, dist_floor)) : d;
  };

  double kmax = 1, ylo = std::numeric_limits<double>::infinity(), yhi = -ylo;
  for (const RunRecord& rec : result.records) {
    kmax = std::max(kmax, static_cast<double>(rec.iterations));
    for (double d : rec.dist) {
      const double y = transform(d);
      ylo = std::min(ylo, y);
      yhi = std::max(yhi, y);
    }
  }
  if (ylo == yhi) { ylo -= 1.0; yhi += 1.0; }
  const double pad = 0.04 * (yhi - ylo);
  ylo -= pad;
  yhi += pad;

  auto x_of = [&](double k) { return ml + pw * (k / kmax); };
  auto y_of = [&](double t) { return mt + ph * (1.0 - (t - ylo) / (yhi - ylo)); };

  static const char* palette[8] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                   "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

  auto f = detail::open_out(path, "emit_svg_chart");
  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
    << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  f << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  f << "<text x=\"" << detail::svg_num(ml) << "\" y=\"28\" font-family=\"sans-serif\" "
       "font-size=\"16\">"
    << to_string(result.config.kind) << " (n=" << result.config.n
    << ", seed=" << result.config.seed << ")</text>\n";

  // axes
  f << "<line x1=\"" << detail::svg_num(ml) << "\" y1=\"" << detail::svg_num(mt)
    << "\" x2=\"" << detail::svg_num(ml) << "\" y2=\"" << detail::svg_num(mt + ph)
    << "\" stroke=\"black\"/>\n";
  f << "<line x1=\"" << detail::svg_num(ml) << "\" y1=\"" << detail::svg_num(mt + ph)
    << "\" x2=\"" << detail::svg_num(ml + pw) << "\" y2=\"" << detail::svg_num(mt + ph)
    << "\" stroke=\"black\"/>\n";

  // x ticks
  for (int i = 0; i <= 4; ++i) {
    const double k = kmax * i / 4.0;
    const double x = x_of(k);
    f << "<line x1=\"" << detail::svg_num(x) << "\" y1=\"" << detail::svg_num(mt + ph)
      << "\" x2=\"" << detail::svg_num(x) << "\" y2=\"" << detail::svg_num(mt + ph + 5)
      << "\" stroke=\"black\"/>\n";
    f << "<text x=\"" << detail::svg_num(x) << "\" y=\"" << detail::svg_num(mt + ph + 20)
      << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">"
      << detail::fmt_g(std::round(k)) << "</text>\n";
  }
  // y ticks
  for (int i = 0; i <= 4; ++i) {
    const double t = ylo + (yhi - ylo) * i / 4.0;
    const double y = y_of(t);
    f << "<line x1=\"" << detail::svg_num(ml - 5) << "\" y1=\"" << detail::svg_num(y)
      << "\" x2=\"" << detail::svg_num(ml) << "\" y2=\"" << detail::svg_num(y)
      << "\" stroke=\"black\"/>\n";
    char lab[64];
    if (log_y)
      std::snprintf(lab, sizeof lab, "1e%+.1f", t);
    else
      std::snprintf(lab, sizeof lab, "%.3g", t);
    f << "<text x=\"" << detail::svg_num(ml - 8) << "\" y=\"" << detail::svg_num(y + 4)
      << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << lab
      << "</text>\n";
  }
  f << "<text x=\"" << detail::svg_num(ml + pw / 2) << "\" y=\""
    << detail::svg_num(height - 14)
    << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">iteration "
       "k</text>\n";
  f << "<text x=\"20\" y=\"" << detail::svg_num(mt + ph / 2)
    << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
       "transform=\"rotate(-90 20 "
    << detail::svg_num(mt + ph / 2) << ")\">distance to minimizer"
    << (log_y ? " (log10)" : "") << "</text>\n";

  for (std::size_t r = 0; r < result.records.size(); ++r) {
    const RunRecord& rec = result.records[r];
    const char* color = palette[r % 8];
    f << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < rec.dist.size(); ++i) {
      if (i) f << " ";
      f << detail::svg_num(x_of(static_cast<double>(rec.iteration_at(i)))) << ","
        << detail::svg_num(y_of(transform(rec.dist[i])));
    }
    f << "\"/>\n";
    const double ly = mt + 16 + 22 * static_cast<double>(r);
    f << "<line x1=\"" << detail::svg_num(ml + pw + 16) << "\" y1=\"" << detail::svg_num(ly)
      << "\" x2=\"" << detail::svg_num(ml + pw + 44) << "\" y2=\"" << detail::svg_num(ly)
      << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    f << "<text x=\"" << detail::svg_num(ml + pw + 50) << "\" y=\""
      << detail::svg_num(ly + 4) << "\" font-family=\"sans-serif\" font-size=\"12\">"
      << detail::legend_label(rec.label) << "</text>\n";
  }
  f << "</svg>\n";
  detail::finish_out(f, path, "emit_svg_chart");
}

}  // namespace hgd
