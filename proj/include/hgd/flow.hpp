#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hgd/descent.hpp"
#include "hgd/problems.hpp"

namespace hgd {

/// Reference solution of the gradient flow du/dt = -grad f(u), sampled on a
/// uniform report grid. States are Richardson extrapolants of forward Euler
/// (see integrate_flow), so `check_diff` measures their observed accuracy.
struct FlowTrajectory {
  std::vector<double> times;          // 0, s, 2s, ..., strictly increasing
  std::vector<VectorXd> states;       // u(t) at those times
  long long refinement = 0;           // coarsest substeps per report interval
  std::string problem_label;
  double ode_tol = 0.0;               // absolute accuracy tolerance enforced
  double check_diff = 0.0;            // achieved worst extrapolant difference
};

/// Raised when the integrator cannot certify the requested accuracy. Carries
/// the two competing endpoint estimates so the caller can judge the gap and
/// retry with a higher refinement.
class FlowAccuracyError : public std::runtime_error {
 public:
  FlowAccuracyError(const std::string& what, VectorXd endpoint_coarse,
                    VectorXd endpoint_fine, double achieved, double tol)
      : std::runtime_error(what),
        endpoint_coarse(std::move(endpoint_coarse)),
        endpoint_fine(std::move(endpoint_fine)),
        achieved(achieved),
        tol(tol) {}

  VectorXd endpoint_coarse;
  VectorXd endpoint_fine;
  double achieved;
  double tol;
};

/// Integrates the flow over [0, T] with forward Euler run at three nested
/// refinements (refinement, 2x, 4x substeps per report interval). Reported
/// states are the finer Richardson extrapolant; the difference between the
/// two extrapolants, maximized over all report points, must stay within
/// ode_tol_rel * (1 + ||u0||) or a FlowAccuracyError is raised. Plain Euler
/// converges only at first order here (the gradient is merely Hoelder
/// continuous in general), so extrapolation is what makes tolerances near
/// 1e-8 reachable at practical refinements; the self-check measures the
/// actual difference rather than assuming an order.
template <Problem P>
FlowTrajectory integrate_flow(const P& p, const VectorXd& u0, double T,
                              double report_step, long long refinement,
                              double ode_tol_rel = 1e-8) {
  detail::check_dim(p.spec(), u0, "integrate_flow");
  if (!std::isfinite(T) || T < 0)
    throw std::invalid_argument("integrate_flow: T must be finite and nonnegative");
  if (!(report_step > 0))
    throw std::invalid_argument("integrate_flow: report_step must be positive");
  if (refinement < 1)
    throw std::invalid_argument("integrate_flow: refinement must be >= 1");
  if (!(ode_tol_rel > 0))
    throw std::invalid_argument("integrate_flow: ode_tol_rel must be positive");

  FlowTrajectory traj;
  traj.refinement = refinement;
  traj.problem_label = p.spec().label;
  traj.ode_tol = ode_tol_rel * (1.0 + u0.norm());

  long long n_report = 0;
  if (T > 0) {
    n_report = std::llround(T / report_step);
    if (n_report < 1 ||
        std::abs(static_cast<double>(n_report) * report_step - T) >
            1e-9 * std::max(1.0, T))
      throw std::invalid_argument("integrate_flow: report_step must divide T");
  }

  traj.times.reserve(static_cast<std::size_t>(n_report) + 1);
  traj.states.reserve(static_cast<std::size_t>(n_report) + 1);
  traj.times.push_back(0.0);
  traj.states.push_back(u0);

  std::array<VectorXd, 3> u = {u0, u0, u0};
  const std::array<long long, 3> substeps = {refinement, 2 * refinement,
                                             4 * refinement};
  VectorXd g(u0.size());
  double worst = 0.0;

  for (long long i = 1; i <= n_report; ++i) {
    for (int lev = 0; lev < 3; ++lev) {
      const double h = report_step / static_cast<double>(substeps[lev]);
      for (long long s = 0; s < substeps[lev]; ++s) {
        p.gradient(u[lev], g);
        detail::euler_step_in_place(u[lev], g, h);
      }
      if (!u[lev].allFinite())
        throw FlowAccuracyError("integrate_flow: state became non-finite near t = " +
                                    std::to_string(static_cast<double>(i) * report_step),
                                u[0], u[2], std::numeric_limits<double>::infinity(),
                                traj.ode_tol);
    }
    VectorXd ext_coarse = 2.0 * u[1] - u[0];
    VectorXd ext_fine = 2.0 * u[2] - u[1];
    worst = std::max(worst, (ext_fine - ext_coarse).norm());
    traj.times.push_back(static_cast<double>(i) * report_step);
    traj.states.push_back(std::move(ext_fine));
  }

  traj.check_diff = worst;
  if (worst > traj.ode_tol) {
    VectorXd end_coarse = 2.0 * u[1] - u[0];
    throw FlowAccuracyError(
        "integrate_flow: accuracy self-check failed (achieved " +
            std::to_string(worst) + ", tolerance " + std::to_string(traj.ode_tol) +
            "); raise the refinement",
        std::move(end_coarse), traj.states.back(), worst, traj.ode_tol);
  }
  return traj;
}

/// integrate_flow with the refinement doubled from `start` until the accuracy
/// self-check passes; gives up (rethrows) once the cap would be exceeded.
template <Problem P>
FlowTrajectory integrate_flow_auto(const P& p, const VectorXd& u0, double T,
                                   double report_step, long long start = 64,
                                   long long cap = 16384,
                                   double ode_tol_rel = 1e-8) {
  if (start < 1 || cap < start)
    throw std::invalid_argument("integrate_flow_auto: need 1 <= start <= cap");
  for (long long r = start;; r *= 2) {
    try {
      return integrate_flow(p, u0, T, report_step, r, ode_tol_rel);
    } catch (const FlowAccuracyError&) {
      if (2 * r > cap) throw;
    }
  }
}

/// Largest gradient norm seen along the trajectory, inflated by a safety
/// factor to hedge excursions between samples, and floored so downstream
/// formulas that divide by M stay usable on stationary trajectories.
template <Problem P>
double estimate_M(const FlowTrajectory& traj, const P& p, double safety = 1.05,
                  double floor_value = 1e-12) {
  if (traj.states.empty())
    throw std::invalid_argument("estimate_M: trajectory is empty");
  VectorXd g(traj.states.front().size());
  double worst = 0.0;
  for (const VectorXd& s : traj.states) {
    p.gradient(s, g);
    worst = std::max(worst, g.norm());
  }
  return std::max(floor_value, safety * worst);
}

struct ContractionReport {
  double worst_ratio = 0.0;  // max over samples of dist / (e^{-mu t} d0)
  double worst_time = 0.0;
  double d0 = 0.0;
  double slack = 0.0;        // multiplicative allowance on the envelope
  bool pass = false;
};

/// Checks the exponential envelope ||u(t) - u*|| <= e^{-mu t} ||u0 - u*||
/// at every recorded sample, with a small relative slack plus the
/// trajectory's own accuracy tolerance.
inline ContractionReport exponential_contraction_check(const FlowTrajectory& traj,
                                                       double mu,
                                                       const VectorXd& u_star,
                                                       double rel_slack = 1e-6) {
  if (traj.states.empty())
    throw std::invalid_argument("exponential_contraction_check: trajectory is empty");
  if (!(mu > 0))
    throw std::invalid_argument("exponential_contraction_check: mu must be positive");
  if (traj.states.front().size() != u_star.size())
    throw std::invalid_argument("exponential_contraction_check: dimension mismatch");

  ContractionReport rep;
  rep.d0 = (traj.states.front() - u_star).norm();
  rep.slack = 1.0 + rel_slack + traj.ode_tol;
  if (rep.d0 == 0.0) {
    double worst_dist = 0.0;
    for (std::size_t i = 0; i < traj.states.size(); ++i)
      worst_dist = std::max(worst_dist, (traj.states[i] - u_star).norm());
    rep.pass = worst_dist <= traj.ode_tol;
    rep.worst_ratio = rep.pass ? 1.0 : std::numeric_limits<double>::infinity();
    return rep;
  }
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const double envelope = std::exp(-mu * traj.times[i]) * rep.d0;
    const double ratio = (traj.states[i] - u_star).norm() / envelope;
    if (ratio > rep.worst_ratio) {
      rep.worst_ratio = ratio;
      rep.worst_time = traj.times[i];
    }
  }
  rep.pass = rep.worst_ratio <= rep.slack;
  return rep;
}

/// T*(eta) = max(0, log(d0/eta)/mu), an upper bound on the flow time needed
/// to contract the distance from d0 to eta.
inline double t_star_upper_bound(double mu, double d0, double eta) {
  if (!(mu > 0) || !(eta > 0) || d0 < 0)
    throw std::invalid_argument("t_star_upper_bound: need mu > 0, eta > 0, d0 >= 0");
  if (d0 <= eta) return 0.0;
  return std::log(d0 / eta) / mu;
}

/// Steps needed to track the flow to accuracy eta over horizon T*:
/// mu^{-1/alpha} beta^{1/alpha} M T* eta^{-1/alpha}, before the ceiling.
inline double k_u_value(double eta, double mu, double beta, double M, double t_star,
                        double alpha) {
  if (!(eta > 0 && mu > 0 && beta > 0 && M > 0) || t_star < 0)
    throw std::invalid_argument("k_u: eta, mu, beta, M must be positive, t_star >= 0");
  if (!(alpha > 0 && alpha <= 1))
    throw std::invalid_argument("k_u: alpha must lie in (0, 1]");
  const double ia = 1.0 / alpha;
  const double v = std::pow(mu, -ia) * std::pow(beta, ia) * M * t_star * std::pow(eta, -ia);
  if (!std::isfinite(v)) throw std::range_error("k_u: value overflowed");
  return v;
}

inline long long k_u(double eta, double mu, double beta, double M, double t_star,
                     double alpha) {
  return detail::ceil_count(k_u_value(eta, mu, beta, M, t_star, alpha), "k_u");
}

struct MinStepsReport {
  long long K = 0;
  std::string binding_constraint;    // ordinal name(s), ties joined with '/'
  std::array<double, 5> terms{};     // the five lower bounds on K
  double C_E = 0.0;                  // beta M^alpha / mu
};

/// Smallest admissible step count over horizon T: K must dominate
///   T,  4 mu T,  M T / delta,  C_E^{1/alpha} T / delta^{1/alpha},
///   (2 beta^2)^{1/q} T^{1+1/q} / C_E^{2(1-alpha)/q},  q = (1-alpha)^2 + alpha^2,
/// where C_E = beta M^alpha / mu. At alpha = 1 the exponent group q is 1 and
/// the last term reduces to 2 beta^2 T^2.
inline MinStepsReport min_steps_condition(double T, double mu, double M, double delta,
                                          double alpha, double beta) {
  if (!(T > 0 && mu > 0 && M > 0 && delta > 0 && beta > 0))
    throw std::invalid_argument(
        "min_steps_condition: T, mu, M, delta, beta must be positive");
  if (!(alpha > 0 && alpha <= 1))
    throw std::invalid_argument("min_steps_condition: alpha must lie in (0, 1]");

  MinStepsReport rep;
  rep.C_E = beta * std::pow(M, alpha) / mu;

  const double q = (1.0 - alpha) * (1.0 - alpha) + alpha * alpha;
  rep.terms[0] = T;
  rep.terms[1] = 4.0 * mu * T;
  rep.terms[2] = M * T / delta;
  rep.terms[3] = std::pow(rep.C_E, 1.0 / alpha) * T / std::pow(delta, 1.0 / alpha);
  rep.terms[4] = alpha == 1.0
                     ? 2.0 * beta * beta * T * T
                     : std::pow(2.0 * beta * beta, 1.0 / q) *
                           std::pow(T, 1.0 + 1.0 / q) /
                           std::pow(rep.C_E, 2.0 * (1.0 - alpha) / q);

  static const char* ordinal[5] = {"first", "second", "third", "fourth", "fifth"};
  double max_term = 0.0;
  for (int i = 0; i < 5; ++i) {
    if (!std::isfinite(rep.terms[i]))
      throw std::range_error(std::string("min_steps_condition: ") + ordinal[i] +
                             " term is not finite");
    max_term = std::max(max_term, rep.terms[i]);
  }
  for (int i = 0; i < 5; ++i) {
    if (rep.terms[i] >= max_term * (1.0 - 1e-12)) {
      if (!rep.binding_constraint.empty()) rep.binding_constraint += '/';
      rep.binding_constraint += ordinal[i];
    }
  }
  rep.binding_constraint += " term";

  rep.K = detail::ceil_count(max_term, "min_steps_condition");
  return rep;
}

struct LocalConsistencyReport {
  double worst_ratio = 0.0;   // residual / (beta_bar tau^{1+alpha})
  std::size_t worst_index = 0;
  double tau = 0.0;
  double beta_bar = 0.0;
  double bound = 0.0;         // beta_bar tau^{1+alpha}
  double allowance = 0.0;     // absolute slack for trajectory inaccuracy
  bool pass = false;
};

/// Verifies the one-step consistency of forward Euler against the flow:
/// ||u(t) - tau grad f(u(t)) - u(t+tau)|| <= beta_bar tau^{1+alpha} at every
/// recorded sample pair. Requires the trajectory to be sampled at spacing tau
/// and tau to be admissible (tau < delta / M with M estimated from the
/// trajectory).
template <Problem P>
LocalConsistencyReport local_consistency_check(const P& p, const FlowTrajectory& traj,
                                               double tau, double beta_bar) {
  if (traj.states.size() < 2)
    throw std::invalid_argument("local_consistency_check: need at least two samples");
  if (!(tau > 0) || !(beta_bar > 0))
    throw std::invalid_argument("local_consistency_check: tau and beta_bar must be positive");
  const ProblemSpec& ps = p.spec();
  const double M = estimate_M(traj, p);
  if (!(tau < ps.delta / M))
    throw std::invalid_argument(
        "local_consistency_check: tau must be below delta/M = " +
        std::to_string(ps.delta / M));
  for (std::size_t i = 0; i + 1 < traj.times.size(); ++i) {
    if (std::abs((traj.times[i + 1] - traj.times[i]) - tau) > 1e-9 * std::max(1.0, tau))
      throw std::invalid_argument(
          "local_consistency_check: trajectory is not sampled at spacing tau");
  }

  LocalConsistencyReport rep;
  rep.tau = tau;
  rep.beta_bar = beta_bar;
  rep.bound = beta_bar * std::pow(tau, 1.0 + ps.alpha);
  rep.allowance = 4.0 * traj.ode_tol;

  VectorXd g(traj.states.front().size());
  double worst_residual = 0.0;
  for (std::size_t i = 0; i + 1 < traj.states.size(); ++i) {
    p.gradient(traj.states[i], g);
    const double residual = (traj.states[i] - tau * g - traj.states[i + 1]).norm();
    if (residual > worst_residual) {
      worst_residual = residual;
      rep.worst_index = i;
    }
  }
  rep.worst_ratio = worst_residual / rep.bound;
  rep.pass = worst_residual <= rep.bound + rep.allowance;
  return rep;
}

/// Discretization-error certificate: the per-step distances E_l between the
/// fixed-step Euler sequence and the flow, against the envelope C_E tau^alpha.
struct ErrorCertificate {
  double tau = 0.0;
  long long K = 0;
  std::vector<double> E;             // l = 0..K, E[0] = 0
  double bound = 0.0;                // C_E tau^alpha
  double C_E = 0.0;
  double M = 0.0;
  double beta_bar = 0.0;
  bool pass = false;                 // max E <= bound (1 + 1e-9)
  std::string binding_constraint;    // which step-condition term fixed K_required
  bool guaranteed = false;           // K >= K_required at the certified constants
  long long K_required = 0;
  std::string problem_label;
  double ode_tol = 0.0;
  VectorXd final_state;              // last Euler iterate
};

/// Runs K forward-Euler steps of size tau = T/K (exactly the fixed-step
/// descent map used by run_gd) and measures E_l = ||u_l - u(l tau)|| against
/// a reference trajectory sampled at the same grid. ode_refinement <= 0
/// selects the auto-refining integrator. M_override > 0 substitutes a caller
/// supplied gradient bound for the trajectory estimate; the certificate's
/// constants (beta_bar, C_E, the step condition) all use the chosen M.
template <Problem P>
ErrorCertificate discretization_error_profile(const P& p, const VectorXd& u0, double T,
                                              long long K, long long ode_refinement = 0,
                                              double M_override = 0.0) {
  detail::check_dim(p.spec(), u0, "discretization_error_profile");
  if (!(T > 0) || !std::isfinite(T))
    throw std::invalid_argument("discretization_error_profile: T must be positive");
  if (K < 1)
    throw std::invalid_argument("discretization_error_profile: K must be >= 1");

  const ProblemSpec& ps = p.spec();
  ErrorCertificate cert;
  cert.K = K;
  cert.tau = T / static_cast<double>(K);
  cert.problem_label = ps.label;

  FlowTrajectory traj =
      ode_refinement >= 1
          ? integrate_flow(p, u0, T, cert.tau, ode_refinement)
          : integrate_flow_auto(p, u0, T, cert.tau);
  cert.ode_tol = traj.ode_tol;

  cert.M = M_override > 0.0 ? M_override : estimate_M(traj, p);
  cert.beta_bar = ps.beta * std::pow(cert.M, ps.alpha);
  cert.C_E = cert.beta_bar / ps.mu;
  cert.bound = cert.C_E * std::pow(cert.tau, ps.alpha);

  const MinStepsReport steps =
      min_steps_condition(T, ps.mu, cert.M, ps.delta, ps.alpha, ps.beta);
  cert.K_required = steps.K;
  cert.binding_constraint = steps.binding_constraint;
  cert.guaranteed = K >= steps.K;

  cert.E.resize(static_cast<std::size_t>(K) + 1);
  cert.E[0] = 0.0;
  VectorXd u = u0;
  VectorXd g(u0.size());
  double worst = 0.0;
  for (long long l = 1; l <= K; ++l) {
    p.gradient(u, g);
    if (!g.allFinite())
      throw std::runtime_error(
          "discretization_error_profile: gradient is not finite at step " +
          std::to_string(l));
    detail::euler_step_in_place(u, g, cert.tau);
    const double e = (u - traj.states[static_cast<std::size_t>(l)]).norm();
    cert.E[static_cast<std::size_t>(l)] = e;
    worst = std::max(worst, e);
  }
  cert.final_state = std::move(u);
  cert.pass = worst <= cert.bound * (1.0 + 1e-9);
  return cert;
}

}  // namespace hgd
