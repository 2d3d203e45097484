#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>

#include "hgd/rng.hpp"

namespace hgd {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Certified constants of an objective: mu-strong convexity together with a
/// locally alpha-Hoelder-continuous gradient,
///   ||grad f(u) - grad f(v)|| <= beta ||u - v||^alpha   for ||u - v|| <= delta.
struct ProblemSpec {
  int n = 0;
  double mu = 0;     // strong convexity modulus
  double alpha = 0;  // Hoelder exponent, in (0, 1]
  double beta = 0;   // Hoelder constant
  double delta = 0;  // radius of validity of the Hoelder bound
  std::optional<VectorXd> minimizer;
  std::string label;

  void validate() const {
    if (n < 1) throw std::invalid_argument("ProblemSpec: n must be >= 1");
    if (!(mu > 0)) throw std::invalid_argument("ProblemSpec: mu must be positive");
    if (!(alpha > 0 && alpha <= 1))
      throw std::invalid_argument("ProblemSpec: alpha must lie in (0, 1]");
    if (!(beta > 0)) throw std::invalid_argument("ProblemSpec: beta must be positive");
    if (!(delta > 0)) throw std::invalid_argument("ProblemSpec: delta must be positive");
    if (minimizer && minimizer->size() != n)
      throw std::invalid_argument("ProblemSpec: minimizer dimension mismatch");
  }
};

/// (x_+)^a with the continuous extension of the derivative at 0: the value
/// and the gradient of the positive-part power both vanish at x <= 0.
inline double pos_pow(double x, double a) {
  if (x <= 0.0) return 0.0;
  if (a == 0.5) return std::sqrt(x);
  if (a == 1.0) return x;
  return std::pow(x, a);
}

template <typename P>
concept Problem = requires(const P& p, const VectorXd& u, VectorXd& g) {
  { p.spec() } -> std::convertible_to<const ProblemSpec&>;
  { p.value(u) } -> std::convertible_to<double>;
  p.gradient(u, g);
};

namespace detail {
inline void check_dim(const ProblemSpec& spec, const VectorXd& u, const char* what) {
  if (u.size() != spec.n) {
    std::ostringstream os;
    os << what << ": expected dimension " << spec.n << ", got " << u.size();
    throw std::invalid_argument(os.str());
  }
}
}  // namespace detail

/// f(u) = (lambda/2) u^2 + (2/3) (u_+)^{3/2}, the one-dimensional model of a
/// strongly convex objective whose gradient lambda*u + sqrt(u_+) is only
/// 1/2-Hoelder at the origin. Minimizer 0, mu = lambda, beta = 1 + lambda,
/// delta = 1.
struct ScalarExampleProblem {
  double lambda = 1.0;

  const ProblemSpec& spec() const { return spec_; }

  double value(const VectorXd& u) const {
    const double x = u[0];
    return 0.5 * lambda * x * x + (2.0 / 3.0) * pos_pow(x, 1.5);
  }

  void gradient(const VectorXd& u, VectorXd& g) const {
    g.resize(1);
    g[0] = lambda * u[0] + pos_pow(u[0], 0.5);
  }

  ProblemSpec spec_;
};

inline ScalarExampleProblem make_scalar_example(double lambda) {
  if (!(lambda > 0)) throw std::invalid_argument("make_scalar_example: lambda must be positive");
  ScalarExampleProblem p;
  p.lambda = lambda;
  p.spec_.n = 1;
  p.spec_.mu = lambda;
  p.spec_.alpha = 0.5;
  p.spec_.beta = 1.0 + lambda;
  p.spec_.delta = 1.0;
  p.spec_.minimizer = VectorXd::Zero(1);
  std::ostringstream os;
  os << "scalar(lambda=" << lambda << ")";
  p.spec_.label = os.str();
  p.spec_.validate();
  return p;
}

/// f(u) = 1/2 u'Au + 1/(1+alpha) sum_i (u_i)_+^{1+alpha} - c'u with A
/// symmetric positive definite. With c = A u* + (u*)_+^alpha the minimizer
/// is planted at u*.
struct CompositeQuadraticProblem {
  MatrixXd A;
  VectorXd c;
  double alpha = 0.5;
  std::uint64_t seed = 0;  // draw that produced A and u*, 0 if handmade

  const ProblemSpec& spec() const { return spec_; }

  double value(const VectorXd& u) const {
    const double quad = 0.5 * u.dot(A * u);
    double pen = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) pen += pos_pow(u[i], 1.0 + alpha);
    return quad + pen / (1.0 + alpha) - c.dot(u);
  }

  void gradient(const VectorXd& u, VectorXd& g) const {
    g.noalias() = A * u;
    for (Eigen::Index i = 0; i < u.size(); ++i) g[i] += pos_pow(u[i], alpha) - c[i];
  }

  ProblemSpec spec_;
};

/// A = R'R + I with R standard normal, filled column by column from the
/// seeded stream. The Gram entries are mirrored explicitly so the result is
/// symmetric to exact equality, and every eigenvalue is >= 1.
inline MatrixXd make_random_spd(int n, SplitMix64& rng) {
  if (n < 1) throw std::invalid_argument("make_random_spd: n must be >= 1");
  MatrixXd r(n, n);
  for (int j = 0; j < n; ++j) r.col(j) = normal_vector(rng, n);
  MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double v = r.col(i).dot(r.col(j));
      a(i, j) = v;
      a(j, i) = v;
    }
    a(i, i) += 1.0;
  }
  return a;
}

inline MatrixXd make_random_spd(int n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  return make_random_spd(n, rng);
}

/// Plants a minimizer: draws u* then A from the stream (in that order) and
/// sets c = A u* + (u*)_+^alpha, so grad f(u*) vanishes identically.
/// Certified constants: mu = lambda_min(A), beta = 1 + lambda_max(A),
/// delta = 1, via a dense symmetric eigensolve (intended for n <= 2000).
inline CompositeQuadraticProblem make_composite_problem(int n, double alpha,
                                                        SplitMix64& rng,
                                                        std::uint64_t seed_tag = 0) {
  if (n < 1) throw std::invalid_argument("make_composite_problem: n must be >= 1");
  if (!(alpha > 0 && alpha <= 1))
    throw std::invalid_argument("make_composite_problem: alpha must lie in (0, 1]");
  CompositeQuadraticProblem p;
  p.alpha = alpha;
  p.seed = seed_tag;
  VectorXd u_star = normal_vector(rng, n);
  p.A = make_random_spd(n, rng);
  p.c = p.A * u_star;
  for (int i = 0; i < n; ++i) p.c[i] += pos_pow(u_star[i], alpha);

  Eigen::SelfAdjointEigenSolver<MatrixXd> es(p.A, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("make_composite_problem: eigensolve failed");
  p.spec_.n = n;
  p.spec_.mu = es.eigenvalues()(0);
  p.spec_.alpha = alpha;
  p.spec_.beta = 1.0 + es.eigenvalues()(n - 1);
  p.spec_.delta = 1.0;
  p.spec_.minimizer = std::move(u_star);
  std::ostringstream os;
  os << "composite(n=" << n << ",alpha=" << alpha << ",seed=" << seed_tag << ")";
  p.spec_.label = os.str();
  p.spec_.validate();
  return p;
}

inline CompositeQuadraticProblem make_composite_problem(int n, double alpha,
                                                        std::uint64_t seed) {
  SplitMix64 rng(seed);
  return make_composite_problem(n, alpha, rng, seed);
}

/// Five-point discretization of -laplace(u) + nu sqrt(u_+) = 0 on the unit
/// square with Dirichlet value 1, m interior points per side, h = 1/(m+1):
///   fbar(u) = 1/2 u'Lu + (2 nu / 3) sum_i (u_i)_+^{3/2} - b'u,
/// L the scaled stencil (4/h^2 diagonal, -1/h^2 neighbours) and b
/// collecting k/h^2 per node with k boundary neighbours.
struct PoissonPlusProblem {
  int m = 0;
  double nu = 1.0;
  Eigen::SparseMatrix<double> L;
  VectorXd b;

  const ProblemSpec& spec() const { return spec_; }

  double value(const VectorXd& u) const {
    const double quad = 0.5 * u.dot(L * u);
    double pen = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) pen += pos_pow(u[i], 1.5);
    return quad + (2.0 * nu / 3.0) * pen - b.dot(u);
  }

  void gradient(const VectorXd& u, VectorXd& g) const {
    g.noalias() = L * u;
    for (Eigen::Index i = 0; i < u.size(); ++i) g[i] += nu * pos_pow(u[i], 0.5) - b[i];
  }

  ProblemSpec spec_;
};

/// The spectrum of the stencil is known in closed form; the certified mu is
/// lambda_min(L) = (8/h^2) sin^2(pi h / 2), which discards the extra
/// monotone curvature of the sqrt term and is therefore conservative.
inline PoissonPlusProblem make_poisson_plus(int m, double nu) {
  if (m < 1) throw std::invalid_argument("make_poisson_plus: m must be >= 1");
  if (!(nu > 0)) throw std::invalid_argument("make_poisson_plus: nu must be positive");
  PoissonPlusProblem p;
  p.m = m;
  p.nu = nu;
  const int n = m * m;
  const double h = 1.0 / (m + 1);
  const double w = 1.0 / (h * h);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(5 * n));
  p.b = VectorXd::Zero(n);
  auto idx = [m](int i, int j) { return i * m + j; };
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const int k = idx(i, j);
      trip.emplace_back(k, k, 4.0 * w);
      if (i > 0) trip.emplace_back(k, idx(i - 1, j), -w); else p.b[k] += w;
      if (i < m - 1) trip.emplace_back(k, idx(i + 1, j), -w); else p.b[k] += w;
      if (j > 0) trip.emplace_back(k, idx(i, j - 1), -w); else p.b[k] += w;
      if (j < m - 1) trip.emplace_back(k, idx(i, j + 1), -w); else p.b[k] += w;
    }
  }
  p.L.resize(n, n);
  p.L.setFromTriplets(trip.begin(), trip.end());

  const double s = std::sin(0.5 * M_PI * h);
  const double c = std::cos(0.5 * M_PI * h);
  const double lambda_min = 8.0 * w * s * s;
  const double lambda_max = 8.0 * w * c * c;
  p.spec_.n = n;
  p.spec_.mu = lambda_min;
  p.spec_.alpha = 0.5;
  p.spec_.beta = 1.0 + lambda_max;
  p.spec_.delta = 1.0;
  std::ostringstream os;
  os << "poisson(m=" << m << ",nu=" << nu << ")";
  p.spec_.label = os.str();
  p.spec_.validate();
  return p;
}

template <Problem P>
double eval_f(const P& p, const VectorXd& u) {
  detail::check_dim(p.spec(), u, "eval_f");
  return p.value(u);
}

template <Problem P>
VectorXd eval_grad(const P& p, const VectorXd& u) {
  detail::check_dim(p.spec(), u, "eval_grad");
  VectorXd g(u.size());
  p.gradient(u, g);
  return g;
}

/// Central-difference check of the analytic gradient. Requires every
/// |u_i| >= 10 h so no difference stencil straddles the kink at 0; returns
/// the worst component error relative to the gradient scale.
template <Problem P>
double finite_diff_grad_check(const P& p, const VectorXd& u, double h = 1e-6) {
  detail::check_dim(p.spec(), u, "finite_diff_grad_check");
  if (!(h > 0)) throw std::invalid_argument("finite_diff_grad_check: h must be positive");
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (std::abs(u[i]) < 10.0 * h) {
      std::ostringstream os;
      os << "finite_diff_grad_check: component " << i << " (value " << u[i]
         << ") is within 10h of the kink at 0";
      throw std::invalid_argument(os.str());
    }
  }
  const VectorXd g = eval_grad(p, u);
  VectorXd up = u, dn = u;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    up[i] = u[i] + h;
    dn[i] = u[i] - h;
    const double cd = (p.value(up) - p.value(dn)) / (2.0 * h);
    worst = std::max(worst, std::abs(cd - g[i]) / std::max(1.0, std::abs(g[i])));
    up[i] = u[i];
    dn[i] = u[i];
  }
  return worst;
}

/// Sampling region for the certifiers: the ball of radius 2 centered at the
/// minimizer when one is stored, at the origin otherwise.
struct CertifyOptions {
  std::optional<VectorXd> center;
  double radius = 2.0;
};

struct HolderReport {
  long long samples = 0;
  long long used = 0;        // pairs with nonzero distance
  double max_ratio = 0.0;    // max ||grad f(u)-grad f(v)|| / ||u-v||^alpha
  double arg_dist = 0.0;     // ||u-v|| at the maximizing pair
  bool pass = false;
};

namespace detail {
template <Problem P>
VectorXd certify_center(const P& p, const CertifyOptions& opts) {
  if (opts.center) {
    check_dim(p.spec(), *opts.center, "certify center");
    return *opts.center;
  }
  if (p.spec().minimizer) return *p.spec().minimizer;
  return VectorXd::Zero(p.spec().n);
}
}  // namespace detail

/// Samples pairs (u, v) with ||u - v|| <= delta, u uniform in the certifier
/// ball and v = u + r d with r uniform in (0, delta], and reports the
/// largest observed Hoelder ratio against the declared beta. The pass margin
/// 1 + 1e-9 absorbs rounding in the ratio itself.
template <Problem P>
HolderReport certify_holder(const P& p, double alpha, double beta, double delta,
                            long long samples, std::uint64_t seed,
                            const CertifyOptions& opts = {}) {
  if (!(alpha > 0 && alpha <= 1))
    throw std::invalid_argument("certify_holder: alpha must lie in (0, 1]");
  if (!(beta > 0) || !(delta > 0) || samples < 1)
    throw std::invalid_argument("certify_holder: beta, delta, samples must be positive");
  const VectorXd center = detail::certify_center(p, opts);
  SplitMix64 rng(seed);
  HolderReport rep;
  rep.samples = samples;
  const int n = p.spec().n;
  for (long long s = 0; s < samples; ++s) {
    const VectorXd u = ball_point(rng, center, opts.radius);
    const double r = delta * rng.uniform_open0();
    const VectorXd v = u + r * sphere_direction(rng, n);
    const double dist = (u - v).norm();
    if (dist <= 0.0) continue;  // degenerate pair, skipped
    ++rep.used;
    const double ratio = (eval_grad(p, u) - eval_grad(p, v)).norm() / std::pow(dist, alpha);
    if (ratio > rep.max_ratio) {
      rep.max_ratio = ratio;
      rep.arg_dist = dist;
    }
  }
  rep.pass = rep.max_ratio <= beta * (1.0 + 1e-9);
  return rep;
}

struct ConvexityReport {
  long long samples = 0;
  long long used = 0;
  double worst_value_modulus = 0.0;  // min over pairs of 2(f(u)-f(v)-g(v)'(u-v))/||u-v||^2
  double worst_mono_modulus = 0.0;   // min over pairs of (g(u)-g(v))'(u-v)/||u-v||^2
  bool pass = false;
};

/// Checks both characterizations of mu-strong convexity on sampled pairs:
/// the function-value inequality and gradient monotonicity. The value form
/// loses all precision once ||u-v||^2 reaches the rounding floor of f, so
/// its tolerance carries an explicit cancellation allowance.
template <Problem P>
ConvexityReport certify_strong_convexity(const P& p, double mu, long long samples,
                                         std::uint64_t seed,
                                         const CertifyOptions& opts = {}) {
  if (!(mu > 0) || samples < 1)
    throw std::invalid_argument("certify_strong_convexity: mu and samples must be positive");
  const VectorXd center = detail::certify_center(p, opts);
  SplitMix64 rng(seed);
  ConvexityReport rep;
  rep.samples = samples;
  const int n = p.spec().n;
  bool ok = true;
  bool first = true;
  for (long long s = 0; s < samples; ++s) {
    const VectorXd u = ball_point(rng, center, opts.radius);
    const VectorXd v = ball_point(rng, center, opts.radius);
    const double d2 = (u - v).squaredNorm();
    if (d2 <= 0.0) continue;  // u = v: both inequalities hold with equality
    ++rep.used;
    const double fu = p.value(u);
    const double fv = p.value(v);
    const VectorXd gu = eval_grad(p, u);
    const VectorXd gv = eval_grad(p, v);
    const double value_mod = 2.0 * (fu - fv - gv.dot(u - v)) / d2;
    const double mono_mod = (gu - gv).dot(u - v) / d2;
    if (first || value_mod < rep.worst_value_modulus) rep.worst_value_modulus = value_mod;
    if (first || mono_mod < rep.worst_mono_modulus) rep.worst_mono_modulus = mono_mod;
    first = false;
    const double cancel = 2e-13 * (std::abs(fu) + std::abs(fv)) / d2;
    if (value_mod < mu * (1.0 - 1e-9) - cancel) ok = false;
    if (mono_mod < mu * (1.0 - 1e-9) - 1e-12) ok = false;
  }
  rep.pass = ok;
  return rep;
}

namespace detail {
inline std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
}  // namespace detail

/// Structured text description sufficient to rebuild the problem: label,
/// dimension, parameters, seed, and the planted minimizer at full precision.
template <Problem P>
std::string describe_problem(const P& p) {
  const ProblemSpec& s = p.spec();
  std::ostringstream os;
  os << "label = " << s.label << "\n"
     << "n = " << s.n << "\n"
     << "mu = " << detail::fmt17(s.mu) << "\n"
     << "alpha = " << detail::fmt17(s.alpha) << "\n"
     << "beta = " << detail::fmt17(s.beta) << "\n"
     << "delta = " << detail::fmt17(s.delta) << "\n";
  if constexpr (std::is_same_v<P, CompositeQuadraticProblem>) {
    os << "seed = " << p.seed << "\n";
  }
  if constexpr (std::is_same_v<P, ScalarExampleProblem>) {
    os << "lambda = " << detail::fmt17(p.lambda) << "\n";
  }
  if constexpr (std::is_same_v<P, PoissonPlusProblem>) {
    os << "m = " << p.m << "\n"
       << "nu = " << detail::fmt17(p.nu) << "\n";
  }
  if (s.minimizer) {
    os << "u_star =";
    for (Eigen::Index i = 0; i < s.minimizer->size(); ++i)
      os << " " << detail::fmt17((*s.minimizer)[i]);
    os << "\n";
  }
  return os.str();
}

}  // namespace hgd
