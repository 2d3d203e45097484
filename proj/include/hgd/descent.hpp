#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hgd/problems.hpp"

namespace hgd {

enum class PolicyKind { fixed, corollary, refined };
enum class StopReason { target_reached, max_iter, diverged };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::target_reached: return "target_reached";
    case StopReason::max_iter: return "max_iter";
    case StopReason::diverged: return "diverged";
  }
  return "?";
}

inline const char* to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::fixed: return "fixed";
    case PolicyKind::corollary: return "corollary";
    case PolicyKind::refined: return "refined";
  }
  return "?";
}

/// How the constant stepsize is chosen: given directly, from the
/// log-complexity schedule tau = 2^{-1/a} mu^{1/a} beta^{-1/a} M^{-1} e^{1/a},
/// or from the refined schedule tau = mu beta^{-2} e^{2-2a}.
struct StepsizePolicy {
  PolicyKind kind = PolicyKind::fixed;
  std::optional<double> tau;      // fixed
  std::optional<double> epsilon;  // corollary / refined target accuracy
  std::optional<double> M;        // corollary gradient bound, estimated if absent

  static StepsizePolicy fixed_tau(double t) {
    StepsizePolicy p;
    p.kind = PolicyKind::fixed;
    p.tau = t;
    return p;
  }
  static StepsizePolicy corollary(double eps, std::optional<double> M = std::nullopt) {
    StepsizePolicy p;
    p.kind = PolicyKind::corollary;
    p.epsilon = eps;
    p.M = M;
    return p;
  }
  static StepsizePolicy refined(double eps) {
    StepsizePolicy p;
    p.kind = PolicyKind::refined;
    p.epsilon = eps;
    return p;
  }

  void validate() const {
    switch (kind) {
      case PolicyKind::fixed:
        if (!tau || !(*tau > 0))
          throw std::invalid_argument("StepsizePolicy: fixed policy needs tau > 0");
        break;
      case PolicyKind::corollary:
      case PolicyKind::refined:
        if (!epsilon || !(*epsilon > 0))
          throw std::invalid_argument("StepsizePolicy: schedule policy needs epsilon > 0");
        if (M && !(*M > 0))
          throw std::invalid_argument("StepsizePolicy: M must be positive when given");
        break;
    }
  }
};

/// One run of u_{k+1} = u_k - tau grad f(u_k). Histories hold scalars only;
/// full iterates are not kept. With history_stride > 1 only every stride-th
/// iteration (plus the final one) is recorded.
struct RunRecord {
  StepsizePolicy policy;
  double tau_used = 0;
  long long iterations = 0;
  std::vector<double> dist;       // ||u_k - u*||, empty when u* is unknown
  std::vector<double> grad_norm;  // ||grad f(u_k)||
  StopReason stop_reason = StopReason::max_iter;
  VectorXd final_point;
  long long history_stride = 1;
  std::string label;
  std::string note;

  /// Iteration index of history entry i. Entries are recorded every
  /// history_stride iterations plus a forced final entry, so the last one
  /// may sit off the stride grid.
  long long iteration_at(std::size_t i) const {
    return std::min(static_cast<long long>(i) * history_stride, iterations);
  }
};

namespace detail {
// Single Euler kernel shared by gd_step and run_gd, so a descent run and a
// discretization-error profile produce bit-identical iterates.
inline void euler_step_in_place(VectorXd& u, const VectorXd& g, double tau) {
  u -= tau * g;
}

// Ceiling for iteration-count formulas, snapping values a few ulps away from
// a whole number first so that analytically integer quantities (for example
// (2 sqrt 2)^2 = 8.000000000000002 in double arithmetic) do not round up to
// the next integer. Counts are clamped to at least 1.
inline long long ceil_count(double v, const char* who) {
  if (!std::isfinite(v)) throw std::range_error(std::string(who) + ": value is not finite");
  if (v >= 9.0e18) throw std::range_error(std::string(who) + ": value exceeds integer range");
  const double nearest = std::nearbyint(v);
  if (std::abs(v - nearest) <= 1e-9 * std::max(1.0, std::abs(v))) v = nearest;
  return std::max(1LL, static_cast<long long>(std::ceil(v)));
}
}  // namespace detail

template <Problem P>
VectorXd gd_step(const P& p, const VectorXd& u, double tau) {
  detail::check_dim(p.spec(), u, "gd_step");
  if (!(tau >= 0) || !std::isfinite(tau))
    throw std::invalid_argument("gd_step: tau must be finite and nonnegative");
  VectorXd g(u.size());
  p.gradient(u, g);
  if (!g.allFinite()) throw std::runtime_error("gd_step: gradient is not finite");
  VectorXd next = u;
  detail::euler_step_in_place(next, g, tau);
  return next;
}

/// tau = 2^{-1/alpha} mu^{1/alpha} beta^{-1/alpha} M^{-1} epsilon^{1/alpha}.
inline double corollary_stepsize(double mu, double beta, double M, double alpha,
                                 double epsilon) {
  if (!(mu > 0 && beta > 0 && M > 0 && epsilon > 0))
    throw std::invalid_argument("corollary_stepsize: mu, beta, M, epsilon must be positive");
  if (!(alpha > 0 && alpha <= 1))
    throw std::invalid_argument("corollary_stepsize: alpha must lie in (0, 1]");
  const double ia = 1.0 / alpha;
  const double tau =
      std::pow(2.0, -ia) * std::pow(mu, ia) * std::pow(beta, -ia) * std::pow(epsilon, ia) / M;
  if (!std::isfinite(tau) || tau <= 0.0)
    throw std::range_error("corollary_stepsize: stepsize under/overflowed");
  return tau;
}

/// ceil(2^{1/alpha} mu^{-1-1/alpha} beta^{1/alpha} M log(2 d0/epsilon)
///      epsilon^{-1/alpha}), at least 1.
inline long long corollary_iteration_bound(double mu, double beta, double M, double alpha,
                                           double epsilon, double d0) {
  if (!(mu > 0 && beta > 0 && M > 0 && epsilon > 0 && d0 > 0))
    throw std::invalid_argument(
        "corollary_iteration_bound: mu, beta, M, epsilon, d0 must be positive");
  if (!(alpha > 0 && alpha <= 1))
    throw std::invalid_argument("corollary_iteration_bound: alpha must lie in (0, 1]");
  const double ia = 1.0 / alpha;
  const double v = std::pow(2.0, ia) * std::pow(mu, -1.0 - ia) * std::pow(beta, ia) * M *
                   std::log(2.0 * d0 / epsilon) * std::pow(epsilon, -ia);
  return detail::ceil_count(v, "corollary_iteration_bound");
}

/// tau = mu beta^{-2} epsilon^{2-2alpha}, the schedule whose iteration count
/// scales as epsilon^{2alpha-2} up to the log factor.
inline double refined_stepsize(double mu, double beta, double alpha, double epsilon) {
  if (!(mu > 0 && beta > 0 && epsilon > 0))
    throw std::invalid_argument("refined_stepsize: mu, beta, epsilon must be positive");
  if (!(alpha > 0 && alpha <= 1))
    throw std::invalid_argument("refined_stepsize: alpha must lie in (0, 1]");
  const double tau = mu / (beta * beta) * std::pow(epsilon, 2.0 - 2.0 * alpha);
  if (!std::isfinite(tau) || tau <= 0.0)
    throw std::range_error("refined_stepsize: stepsize under/overflowed");
  return tau;
}

/// ceil((2 beta^2 / mu^2) log(d0/epsilon) epsilon^{2alpha-2}), at least 1.
inline long long refined_iteration_bound(double mu, double beta, double alpha,
                                         double epsilon, double d0) {
  if (!(mu > 0 && beta > 0 && epsilon > 0 && d0 > 0))
    throw std::invalid_argument(
        "refined_iteration_bound: mu, beta, epsilon, d0 must be positive");
  if (!(alpha > 0 && alpha <= 1))
    throw std::invalid_argument("refined_iteration_bound: alpha must lie in (0, 1]");
  const double v = 2.0 * beta * beta / (mu * mu) * std::log(d0 / epsilon) *
                   std::pow(epsilon, 2.0 * alpha - 2.0);
  return detail::ceil_count(v, "refined_iteration_bound");
}

/// Per-step squared-distance factor 1 - mu^2 beta^{-2} epsilon^{2-2alpha}
/// valid while the distance exceeds epsilon. Zero is attainable (mu = beta,
/// alpha = 1: one exact step); negative values are rejected.
inline double contraction_factor(double mu, double beta, double alpha, double epsilon) {
  if (!(mu > 0 && beta > 0 && epsilon > 0))
    throw std::invalid_argument("contraction_factor: mu, beta, epsilon must be positive");
  if (!(alpha > 0 && alpha <= 1))
    throw std::invalid_argument("contraction_factor: alpha must lie in (0, 1]");
  const double f = 1.0 - mu * mu / (beta * beta) * std::pow(epsilon, 2.0 - 2.0 * alpha);
  if (f < 0.0)
    throw std::range_error("contraction_factor: factor is negative (epsilon too large)");
  return f;
}

/// Radius below which a fixed stepsize stops making guaranteed progress:
/// the balance point r of 2 mu tau = beta^2 tau^2 r^{2alpha-2}. For alpha = 1
/// the gradient is Lipschitz and no stagnation level exists.
inline std::optional<double> predict_stagnation_level(double mu, double beta, double alpha,
                                                      double tau) {
  if (!(mu > 0 && beta > 0 && tau > 0))
    throw std::invalid_argument("predict_stagnation_level: mu, beta, tau must be positive");
  if (!(alpha > 0 && alpha <= 1))
    throw std::invalid_argument("predict_stagnation_level: alpha must lie in (0, 1]");
  if (alpha == 1.0) return std::nullopt;
  return std::pow(beta * beta * tau / (2.0 * mu), 1.0 / (2.0 - 2.0 * alpha));
}

struct Plateau {
  double level = 0;       // mean dist over the detected window
  long long onset = 0;    // first iteration index of the window
};

/// First window of `window` consecutive recorded iterations over which dist
/// varies by less than rel_tol relative to the window mean.
inline std::optional<Plateau> detect_stagnation(const RunRecord& record, long long window,
                                                double rel_tol) {
  if (window < 2) throw std::invalid_argument("detect_stagnation: window must be >= 2");
  if (!(rel_tol > 0)) throw std::invalid_argument("detect_stagnation: rel_tol must be positive");
  const auto& d = record.dist;
  const long long len = static_cast<long long>(d.size());
  if (len < window) return std::nullopt;
  for (long long i = 0; i + window <= len; ++i) {
    double lo = d[i], hi = d[i], sum = 0.0;
    for (long long j = i; j < i + window; ++j) {
      lo = std::min(lo, d[j]);
      hi = std::max(hi, d[j]);
      sum += d[j];
    }
    const double mean = sum / static_cast<double>(window);
    if (hi - lo < rel_tol * std::max(mean, 1e-300)) {
      Plateau pl;
      pl.level = mean;
      pl.onset = i * record.history_stride;
      return pl;
    }
  }
  return std::nullopt;
}

struct RunOptions {
  long long max_iter = 10000;
  std::optional<double> epsilon;   // target ||u_k - u*|| (or surrogate, see below)
  double grad_floor = 0.0;         // stop when ||grad|| <= this; 0 disables
  long long history_stride = 1;
  double divergence_factor = 1e6;
};

namespace detail {
template <Problem P>
double resolve_tau(const P& p, const StepsizePolicy& policy, const VectorXd& u0,
                   std::string* note) {
  const ProblemSpec& s = p.spec();
  switch (policy.kind) {
    case PolicyKind::fixed:
      return *policy.tau;
    case PolicyKind::corollary: {
      double M;
      if (policy.M) {
        M = *policy.M;
      } else {
        // Upper proxy when no flow-based bound is supplied.
        M = eval_grad(p, u0).norm() * 1.05;
        if (!(M > 0)) M = 1e-12;
        if (note) *note = "corollary M proxy = 1.05*||grad f(u0)||";
      }
      return corollary_stepsize(s.mu, s.beta, M, s.alpha, *policy.epsilon);
    }
    case PolicyKind::refined:
      return refined_stepsize(s.mu, s.beta, s.alpha, *policy.epsilon);
  }
  throw std::logic_error("resolve_tau: bad policy kind");
}
}  // namespace detail

/// Fixed-stepsize descent. Stops, in order of precedence, on: distance
/// target reached (grad-norm surrogate ||grad|| <= mu*epsilon when no
/// minimizer is stored), gradient floor, iteration cap. Flags divergence
/// once the distance exceeds divergence_factor * (1 + initial distance);
/// without a minimizer the iterate norm plays that role.
template <Problem P>
RunRecord run_gd(const P& p, const VectorXd& u0, const StepsizePolicy& policy,
                 const RunOptions& opts) {
  detail::check_dim(p.spec(), u0, "run_gd");
  policy.validate();
  if (opts.max_iter < 0) throw std::invalid_argument("run_gd: max_iter must be >= 0");
  if (opts.history_stride < 1)
    throw std::invalid_argument("run_gd: history_stride must be >= 1");
  const ProblemSpec& s = p.spec();
  const bool know_star = s.minimizer.has_value();

  RunRecord rec;
  rec.policy = policy;
  rec.history_stride = opts.history_stride;
  rec.tau_used = detail::resolve_tau(p, policy, u0, &rec.note);
  const double tau = rec.tau_used;

  VectorXd u = u0;
  VectorXd g(u.size());
  p.gradient(u, g);
  double gn = g.norm();
  double dist = know_star ? (u - *s.minimizer).norm() : 0.0;
  const double guard = opts.divergence_factor * (1.0 + (know_star ? dist : u0.norm()));

  long long k = 0;
  long long last_recorded = -1;
  auto record = [&](bool force) {
    if (!force && (k % opts.history_stride) != 0) return;
    if (last_recorded == k) return;
    if (know_star) rec.dist.push_back(dist);
    rec.grad_norm.push_back(gn);
    last_recorded = k;
  };

  std::optional<StopReason> stop;
  for (;;) {
    if (!g.allFinite() || !std::isfinite(gn) || (know_star && !std::isfinite(dist))) {
      stop = StopReason::diverged;
    } else if (opts.epsilon && know_star && dist <= *opts.epsilon) {
      stop = StopReason::target_reached;
    } else if (opts.epsilon && !know_star && gn <= s.mu * *opts.epsilon) {
      stop = StopReason::target_reached;  // grad-norm surrogate target
    } else if (opts.grad_floor > 0.0 && gn <= opts.grad_floor) {
      stop = StopReason::target_reached;
    } else if ((know_star ? dist : u.norm()) > guard) {
      stop = StopReason::diverged;
    } else if (k >= opts.max_iter) {
      stop = StopReason::max_iter;
    }
    record(stop.has_value());
    if (stop) break;

    detail::euler_step_in_place(u, g, tau);
    ++k;
    p.gradient(u, g);
    gn = g.norm();
    if (know_star) dist = (u - *s.minimizer).norm();
  }

  rec.iterations = k;
  rec.stop_reason = *stop;
  rec.final_point = std::move(u);
  return rec;
}

template <Problem P>
RunRecord run_gd(const P& p, const VectorXd& u0, const StepsizePolicy& policy,
                 long long max_iter, std::optional<double> epsilon = std::nullopt) {
  RunOptions opts;
  opts.max_iter = max_iter;
  opts.epsilon = epsilon;
  return run_gd(p, u0, policy, opts);
}

}  // namespace hgd
