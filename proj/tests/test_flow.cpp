#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "hgd/descent.hpp"
#include "hgd/flow.hpp"
#include "hgd/problems.hpp"
#include "hgd/rng.hpp"

using namespace hgd;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

namespace {

VectorXd scalar_point(double x) {
  VectorXd u(1);
  u[0] = x;
  return u;
}

}  // namespace

TEST_CASE("integrate_flow_auto matches the scalar exponential solution", "[flow]") {
  const auto p = make_scalar_example(1.0);
  // on the negative half-line the flow is du/dt = -u, so u(t) = -e^{-t}
  const FlowTrajectory traj = integrate_flow_auto(p, scalar_point(-1.0), 1.0, 0.125);
  REQUIRE(traj.times.size() == 9);
  REQUIRE(traj.states.size() == 9);
  REQUIRE(traj.times.front() == 0.0);
  REQUIRE(traj.times.back() == Approx(1.0).epsilon(1e-12));
  REQUIRE(traj.check_diff <= traj.ode_tol);
  REQUIRE(traj.refinement >= 64);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double exact = -std::exp(-traj.times[i]);
    REQUIRE(std::abs(traj.states[i][0] - exact) <= traj.ode_tol);
  }
}

TEST_CASE("integrate_flow with T = 0 returns the single initial sample", "[flow]") {
  const auto p = make_scalar_example(1.0);
  const FlowTrajectory traj = integrate_flow(p, scalar_point(-0.5), 0.0, 0.25, 64);
  REQUIRE(traj.times == std::vector<double>{0.0});
  REQUIRE(traj.states.size() == 1);
  REQUIRE(traj.states[0][0] == -0.5);
  REQUIRE(traj.check_diff == 0.0);
}

TEST_CASE("integrate_flow validates its grid and arguments", "[flow]") {
  const auto p = make_scalar_example(1.0);
  const VectorXd u0 = scalar_point(-1.0);
  REQUIRE_THROWS_WITH(integrate_flow(p, u0, 1.0, 0.3, 64),
                      ContainsSubstring("report_step must divide T"));
  REQUIRE_THROWS_AS(integrate_flow(p, u0, -1.0, 0.25, 64), std::invalid_argument);
  REQUIRE_THROWS_AS(integrate_flow(p, u0, 1.0, 0.0, 64), std::invalid_argument);
  REQUIRE_THROWS_AS(integrate_flow(p, u0, 1.0, 0.25, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(integrate_flow(p, u0, 1.0, 0.25, 64, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(integrate_flow(p, VectorXd::Zero(2), 1.0, 0.25, 64),
                    std::invalid_argument);
}

TEST_CASE("integrate_flow raises a diagnosable error when accuracy is unreachable",
          "[flow]") {
  const auto p = make_scalar_example(1.0);
  const VectorXd u0 = scalar_point(-1.0);
  try {
    integrate_flow(p, u0, 1.0, 0.5, 1, 1e-14);
    FAIL("expected FlowAccuracyError");
  } catch (const FlowAccuracyError& e) {
    REQUIRE(e.achieved > e.tol);
    REQUIRE(e.tol == Approx(2e-14).epsilon(1e-12));
    REQUIRE(e.endpoint_coarse.size() == 1);
    REQUIRE(e.endpoint_fine.size() == 1);
  }

  // the auto-refiner rethrows once its refinement cap is reached
  REQUIRE_THROWS_AS(integrate_flow_auto(p, u0, 1.0, 0.5, 2, 4, 1e-14),
                    FlowAccuracyError);
  REQUIRE_THROWS_AS(integrate_flow_auto(p, u0, 1.0, 0.5, 8, 4), std::invalid_argument);
}

TEST_CASE("nested refinements agree within the enforced tolerance", "[flow]") {
  const auto p = make_composite_problem(5, 0.5, 3);
  SplitMix64 rng(31);
  const VectorXd u0 = ball_point(rng, *p.spec().minimizer, 1.0);
  const FlowTrajectory a = integrate_flow(p, u0, 1.0, 0.25, 2048);
  const FlowTrajectory b = integrate_flow(p, u0, 1.0, 0.25, 4096);
  REQUIRE(a.states.size() == b.states.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.states.size(); ++i)
    worst = std::max(worst, (a.states[i] - b.states[i]).norm());
  REQUIRE(worst <= a.ode_tol);
}

TEST_CASE("flow distance to the minimizer never increases", "[flow]") {
  const auto p = make_composite_problem(10, 0.5, 2);
  SplitMix64 rng(17);
  const VectorXd u0 = ball_point(rng, *p.spec().minimizer, 1.0);
  const FlowTrajectory traj = integrate_flow_auto(p, u0, 2.0, 0.125);
  for (std::size_t i = 0; i + 1 < traj.states.size(); ++i) {
    const double di = (traj.states[i] - *p.spec().minimizer).norm();
    const double dn = (traj.states[i + 1] - *p.spec().minimizer).norm();
    REQUIRE(dn <= di * (1.0 + 1e-9) + 2.0 * traj.ode_tol);
  }
}

TEST_CASE("exponential_contraction_check certifies the strong-convexity envelope",
          "[flow]") {
  const auto p = make_scalar_example(1.0);
  const FlowTrajectory traj = integrate_flow_auto(p, scalar_point(-1.0), 2.0, 0.125);
  const VectorXd star = scalar_point(0.0);
  const ContractionReport rep = exponential_contraction_check(traj, 1.0, star);
  REQUIRE(rep.pass);
  REQUIRE(rep.d0 == 1.0);
  // the scalar flow meets the envelope with equality, up to integrator noise
  REQUIRE(rep.worst_ratio == Approx(1.0).margin(1e-6 + traj.ode_tol));

  const auto pc = make_composite_problem(10, 0.5, 2);
  SplitMix64 rng(17);
  const VectorXd u0 = ball_point(rng, *pc.spec().minimizer, 1.0);
  const FlowTrajectory tc = integrate_flow_auto(pc, u0, 1.0, 0.0625);
  const ContractionReport rc =
      exponential_contraction_check(tc, pc.spec().mu, *pc.spec().minimizer);
  REQUIRE(rc.pass);
  REQUIRE(rc.worst_ratio <= rc.slack);

  // starting at the minimizer: the flow must stay there
  const FlowTrajectory ts = integrate_flow(p, star, 0.5, 0.25, 64);
  const ContractionReport rs = exponential_contraction_check(ts, 1.0, star);
  REQUIRE(rs.pass);
  REQUIRE(rs.worst_ratio == 1.0);

  REQUIRE_THROWS_AS(exponential_contraction_check(traj, 0.0, star),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(exponential_contraction_check(traj, 1.0, VectorXd::Zero(2)),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(exponential_contraction_check(FlowTrajectory{}, 1.0, star),
                    std::invalid_argument);
}

TEST_CASE("estimate_M tracks the largest gradient along the trajectory", "[flow]") {
  const auto p = make_scalar_example(1.0);
  const FlowTrajectory traj = integrate_flow_auto(p, scalar_point(-1.0), 1.0, 0.125);
  // the gradient norm decays along this flow, so the supremum sits at t = 0
  REQUIRE(estimate_M(traj, p) == Approx(1.05).epsilon(1e-9));
  REQUIRE(estimate_M(traj, p, 1.0) == Approx(1.0).epsilon(1e-9));

  const FlowTrajectory still = integrate_flow(p, scalar_point(0.0), 1.0, 0.5, 64);
  REQUIRE(estimate_M(still, p) == 1e-12);  // floored on stationary trajectories

  const auto pc = make_composite_problem(5, 0.5, 3);
  SplitMix64 rng(31);
  const VectorXd u0 = ball_point(rng, *pc.spec().minimizer, 1.0);
  const FlowTrajectory tc = integrate_flow_auto(pc, u0, 1.0, 0.25);
  REQUIRE(estimate_M(tc, pc) >= 1.05 * eval_grad(pc, u0).norm() * (1.0 - 1e-12));
  REQUIRE(estimate_M(tc, pc) == Approx(1.05 * estimate_M(tc, pc, 1.0)).epsilon(1e-12));

  REQUIRE_THROWS_AS(estimate_M(FlowTrajectory{}, p), std::invalid_argument);
}

TEST_CASE("t_star_upper_bound and k_u count flow time and tracking steps", "[flow]") {
  REQUIRE(t_star_upper_bound(1.0, 1.0, 1.0) == 0.0);
  REQUIRE(t_star_upper_bound(1.0, std::exp(1.0), 1.0) == Approx(1.0).epsilon(1e-14));
  REQUIRE(t_star_upper_bound(2.0, 100.0, 1.0) == Approx(std::log(100.0) / 2.0).epsilon(1e-14));
  REQUIRE(t_star_upper_bound(1.0, 0.25, 0.5) == 0.0);
  REQUIRE_THROWS_AS(t_star_upper_bound(0.0, 1.0, 1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(t_star_upper_bound(1.0, 1.0, 0.0), std::invalid_argument);

  REQUIRE(k_u_value(1.0, 1.0, 1.0, 1.0, 1.0, 0.5) == Approx(1.0).epsilon(1e-14));
  REQUIRE(k_u(0.5, 1.0, 1.0, 1.0, 1.0, 0.5) == 4);  // eta^{-2} = 4
  REQUIRE(k_u(1.0, 1.0, 1.0, 1.0, 0.0, 0.5) == 1);  // zero horizon still takes a step
  // with a Lipschitz gradient the count is inversely proportional to eta
  REQUIRE(2.0 * k_u_value(0.05, 1.0, 2.0, 1.5, 3.0, 1.0) ==
          Approx(k_u_value(0.025, 1.0, 2.0, 1.5, 3.0, 1.0)).epsilon(1e-14));
  REQUIRE_THROWS_AS(k_u_value(0.0, 1.0, 1.0, 1.0, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("the schedule stepsize equals horizon over tracking count", "[flow]") {
  const double mu = 1.0, beta = 2.0, M = 1.5, alpha = 0.5, eps = 0.1, d0 = 5.0;
  const double ts = t_star_upper_bound(mu, d0, eps / 2.0);
  const double kv = k_u_value(eps / 2.0, mu, beta, M, ts, alpha);
  REQUIRE(corollary_stepsize(mu, beta, M, alpha, eps) == Approx(ts / kv).epsilon(1e-14));
}

TEST_CASE("min_steps_condition reports the five bounds and the binding one", "[flow]") {
  const MinStepsReport rep = min_steps_condition(1.0, 1.0, 2.0, 1.0, 0.5, 2.0);
  REQUIRE(rep.C_E == Approx(2.0 * std::sqrt(2.0)).epsilon(1e-14));
  REQUIRE(rep.terms[0] == Approx(1.0).epsilon(1e-14));
  REQUIRE(rep.terms[1] == Approx(4.0).epsilon(1e-14));
  REQUIRE(rep.terms[2] == Approx(2.0).epsilon(1e-14));
  REQUIRE(rep.terms[3] == Approx(8.0).epsilon(1e-12));
  REQUIRE(rep.terms[4] == Approx(8.0).epsilon(1e-12));
  REQUIRE(rep.K == 8);  // exactly 8: the 8.000000000000002 artifact must not give 9
  REQUIRE(rep.binding_constraint == "fourth/fifth term");

  const MinStepsReport lip = min_steps_condition(1.0, 1.0, 1.0, 1.0, 1.0, 1.0);
  REQUIRE(lip.terms[4] == Approx(2.0).epsilon(1e-14));  // 2 beta^2 T^2
  REQUIRE(lip.K == 4);
  REQUIRE(lip.binding_constraint == "second term");

  const MinStepsReport twice = min_steps_condition(2.0, 1.0, 2.0, 1.0, 0.5, 2.0);
  REQUIRE(twice.K == 64);  // the last term scales as T^3 here
  REQUIRE(twice.K >= rep.K);

  REQUIRE_THROWS_AS(min_steps_condition(0.0, 1.0, 1.0, 1.0, 0.5, 1.0),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(min_steps_condition(1.0, 1.0, 1.0, 1.0, 0.0, 1.0),
                    std::invalid_argument);
  REQUIRE_THROWS_WITH(min_steps_condition(1.0, 1.0, 1.0, 1.0, 0.5, 1e308),
                      ContainsSubstring("fourth term"));
}

TEST_CASE("local_consistency_check bounds the one-step Euler residual", "[flow]") {
  const auto p = make_scalar_example(1.0);
  const VectorXd u0 = scalar_point(-1.0);
  const FlowTrajectory traj = integrate_flow(p, u0, 1.0, 0.1, 512);
  const double beta_bar = 2.0 * std::sqrt(1.05);  // beta * M^alpha at estimated M
  const LocalConsistencyReport rep = local_consistency_check(p, traj, 0.1, beta_bar);
  REQUIRE(rep.pass);
  REQUIRE(rep.worst_index == 0);  // the residual decays with the flow
  REQUIRE(rep.bound == Approx(0.0648074).epsilon(1e-4));
  // closed form: |e^{-0.1} - 0.9| / bound
  REQUIRE(rep.worst_ratio == Approx((std::exp(-0.1) - 0.9) / rep.bound).epsilon(1e-3));

  // stationary trajectory: zero residual
  const FlowTrajectory still = integrate_flow(p, scalar_point(0.0), 0.4, 0.2, 64);
  const LocalConsistencyReport rs = local_consistency_check(p, still, 0.2, 1.0);
  REQUIRE(rs.pass);
  REQUIRE(rs.worst_ratio == 0.0);

  REQUIRE_THROWS_WITH(local_consistency_check(p, traj, 0.97, beta_bar),
                      ContainsSubstring("delta/M"));
  REQUIRE_THROWS_WITH(local_consistency_check(p, traj, 0.2, beta_bar),
                      ContainsSubstring("spacing"));
  const FlowTrajectory single = integrate_flow(p, u0, 0.0, 0.1, 64);
  REQUIRE_THROWS_AS(local_consistency_check(p, single, 0.1, beta_bar),
                    std::invalid_argument);
}

TEST_CASE("local_consistency_check holds for a planted problem at half the admissible "
          "stepsize",
          "[flow]") {
  const auto p = make_composite_problem(5, 0.5, 3);
  SplitMix64 rng(31);
  const VectorXd u0 = ball_point(rng, *p.spec().minimizer, 1.0);
  const FlowTrajectory probe = integrate_flow_auto(p, u0, 1.0, 0.25);
  const double M = estimate_M(probe, p);
  const double tau = 0.5 * p.spec().delta / M;
  const FlowTrajectory traj = integrate_flow_auto(p, u0, 8.0 * tau, tau);
  const double beta_bar = p.spec().beta * std::pow(M, p.spec().alpha);
  const LocalConsistencyReport rep = local_consistency_check(p, traj, tau, beta_bar);
  REQUIRE(rep.pass);
  REQUIRE(rep.worst_ratio <= 0.5);
}

TEST_CASE("discretization_error_profile certifies the Euler error envelope", "[flow]") {
  const auto p = make_scalar_example(1.0);
  const VectorXd u0 = scalar_point(-1.0);

  const ErrorCertificate cert = discretization_error_profile(p, u0, 1.0, 8);
  REQUIRE(cert.tau == 0.125);
  REQUIRE(cert.E.size() == 9);
  REQUIRE(cert.E[0] == 0.0);
  REQUIRE(cert.M == Approx(1.05).epsilon(1e-9));
  REQUIRE(cert.pass);
  const double max_e = *std::max_element(cert.E.begin(), cert.E.end());
  REQUIRE(max_e <= cert.bound * (1.0 + 1e-9));
  REQUIRE(max_e == Approx(0.0242705).epsilon(1e-3));
  // the estimated constants demand more steps than the 8 provided
  REQUIRE_FALSE(cert.guaranteed);
  REQUIRE(cert.K_required == 16);
  REQUIRE(cert.binding_constraint == "fifth term");

  // Euler sequence and flow both have closed forms on the negative axis
  for (std::size_t l = 0; l < cert.E.size(); ++l) {
    const double exact =
        std::abs(std::pow(1.0 - 0.125, static_cast<double>(l)) -
                 std::exp(-0.125 * static_cast<double>(l)));
    REQUIRE(std::abs(cert.E[l] - exact) <= cert.ode_tol);
  }

  // supplying the interval gradient bound M = 2 tightens K_required to K
  const ErrorCertificate sup = discretization_error_profile(p, u0, 1.0, 8, 0, 2.0);
  REQUIRE(sup.M == 2.0);
  REQUIRE(sup.bound == Approx(1.0).epsilon(1e-14));
  REQUIRE(sup.pass);
  REQUIRE(sup.guaranteed);
  REQUIRE(sup.K_required == 8);
  REQUIRE(sup.binding_constraint == "fourth/fifth term");

  REQUIRE_THROWS_AS(discretization_error_profile(p, u0, 0.0, 8), std::invalid_argument);
  REQUIRE_THROWS_AS(discretization_error_profile(p, u0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("discretization profiles are stable under reference refinement and agree "
          "with the descent map",
          "[flow]") {
  const auto p = make_composite_problem(5, 0.5, 3);
  SplitMix64 rng(31);
  const VectorXd u0 = ball_point(rng, *p.spec().minimizer, 1.0);

  const ErrorCertificate a = discretization_error_profile(p, u0, 1.0, 8, 2048);
  const ErrorCertificate b = discretization_error_profile(p, u0, 1.0, 8, 4096);
  double worst = 0.0;
  for (std::size_t l = 0; l < a.E.size(); ++l)
    worst = std::max(worst, std::abs(a.E[l] - b.E[l]));
  REQUIRE(worst <= a.ode_tol);

  // the certificate's Euler leg is bit-identical to run_gd
  const RunRecord rec = run_gd(p, u0, StepsizePolicy::fixed_tau(a.tau), 8);
  REQUIRE(a.final_state == rec.final_point);
}
