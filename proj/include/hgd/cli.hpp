#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hgd/bench.hpp"
#include "hgd/descent.hpp"
#include "hgd/flow.hpp"
#include "hgd/problems.hpp"

namespace hgd {

/// Command-line misuse (unknown flag, bad value, missing argument); mapped
/// to exit status 2 by the entry point.
class CliUsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CliInvocation {
  std::string subcommand;
  std::map<std::string, std::string> flags;  // normalized key -> raw value
  std::optional<std::string> config_path;
};

inline const char* usage_text() {
  return
      "usage: hgd-bench <subcommand> [flags]\n"
      "\n"
      "subcommands:\n"
      "  sweep-stepsize   fixed-alpha descent runs over a stepsize grid (composite problem)\n"
      "  sweep-alpha      fixed-stepsize descent runs over an exponent grid (composite problem)\n"
      "  scaling          iterations-to-target study over a decreasing epsilon grid\n"
      "  flow-error       discretization-error certificate against the integrated flow\n"
      "  certify          sampled gradient-smoothness / strong-convexity / gradient checks\n"
      "  info             print the resolved problem constants and derived quantities\n"
      "\n"
      "flags (all optional unless noted):\n"
      "  --config FILE    read `key = value` lines first; explicit flags override the file\n"
      "  --problem NAME   composite | scalar | poisson (sweeps and scaling use composite)\n"
      "  --n N            problem dimension (poisson: grid side, unknowns are N*N)\n"
      "  --seed S         seed for every random draw\n"
      "  --alpha LIST     gradient exponent(s) in (0,1]; comma-separated for sweep-alpha\n"
      "  --tau LIST       stepsize(s); comma-separated for sweep-stepsize; required by flow-error\n"
      "  --eps LIST       decreasing target-distance grid for scaling\n"
      "  --max-iter K     iteration cap (flow-error: the number of Euler steps K)\n"
      "  --lambda V       scalar-problem curvature (default 1)\n"
      "  --nu V           poisson-problem semilinear coefficient (default 1)\n"
      "  --u0 LIST        explicit starting point (comma-separated, full dimension)\n"
      "  --samples N      certify: sampled pairs per check (default 10000)\n"
      "  --out DIR        output directory (default $HOLDER_DESCENT_OUT or ./results)\n"
      "  --jobs J         max concurrent runs (default: hardware threads)\n"
      "  --no-svg         skip chart output, write CSV only\n"
      "\n"
      "Each run writes CSV results plus a replayable config.txt into --out.\n"
      "Exit status: 0 all checks passed, 1 a check failed or a run errored, 2 usage.\n";
}

namespace cli_detail {

inline const std::set<std::string>& known_subcommands() {
  static const std::set<std::string> s = {"sweep-stepsize", "sweep-alpha", "scaling",
                                          "flow-error",     "certify",     "info"};
  return s;
}

inline const std::set<std::string>& known_keys() {
  static const std::set<std::string> s = {"problem", "n",       "seed",  "alpha",
                                          "tau",     "eps",     "max_iter", "lambda",
                                          "nu",      "u0",      "samples",  "out",
                                          "jobs",    "no_svg"};
  return s;
}

inline std::string normalize_key(std::string k) {
  for (char& c : k)
    if (c == '-') c = '_';
  return k;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw CliUsageError("flag --" + key + ": '" + v + "' is not a number");
  }
}

inline long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw CliUsageError("flag --" + key + ": '" + v + "' is not an integer");
  }
}

inline unsigned long long parse_uint(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size() || (!v.empty() && v[0] == '-'))
      throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw CliUsageError("flag --" + key + ": '" + v + "' is not a nonnegative integer");
  }
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw CliUsageError("flag --" + key + ": empty list element");
    out.push_back(parse_double(key, item));
  }
  if (out.empty()) throw CliUsageError("flag --" + key + ": empty list");
  return out;
}

// Validates one key/value pair; shared between flag parsing and config files.
inline void validate_kv(const std::string& key, const std::string& value) {
  if (key == "problem") {
    if (value != "composite" && value != "scalar" && value != "poisson")
      throw CliUsageError("flag --problem: '" + value +
                          "' is not one of composite|scalar|poisson");
  } else if (key == "n") {
    if (parse_int(key, value) < 1) throw CliUsageError("flag --n: must be >= 1");
  } else if (key == "seed") {
    parse_uint(key, value);
  } else if (key == "alpha") {
    for (double a : parse_list(key, value))
      if (!(a > 0 && a <= 1))
        throw CliUsageError("flag --alpha: value " + std::string(detail::fmt_g(a)) +
                            " is outside (0, 1]");
  } else if (key == "tau" || key == "eps") {
    for (double t : parse_list(key, value))
      if (!(t > 0))
        throw CliUsageError("flag --" + key + ": values must be positive");
  } else if (key == "max_iter") {
    if (parse_int(key, value) < 1) throw CliUsageError("flag --max-iter: must be >= 1");
  } else if (key == "lambda") {
    if (!(parse_double(key, value) > 0))
      throw CliUsageError("flag --lambda: must be positive");
  } else if (key == "nu") {
    if (!(parse_double(key, value) > 0)) throw CliUsageError("flag --nu: must be positive");
  } else if (key == "u0") {
    parse_list(key, value);
  } else if (key == "samples") {
    if (parse_int(key, value) < 1) throw CliUsageError("flag --samples: must be >= 1");
  } else if (key == "jobs") {
    if (parse_int(key, value) < 0) throw CliUsageError("flag --jobs: must be >= 0");
  } else if (key == "no_svg") {
    if (value != "true" && value != "false")
      throw CliUsageError("config key no_svg: expected true or false, got '" + value + "'");
  } else if (key == "out") {
    if (value.empty()) throw CliUsageError("flag --out: empty path");
  }
}

}  // namespace cli_detail

/// Parses a subcommand plus `--flag value` pairs (args exclude the program
/// name). Flag values are range-checked here; the config file named by
/// --config is read later, at execution time.
inline CliInvocation parse_invocation(const std::vector<std::string>& args) {
  if (args.empty()) throw CliUsageError("missing subcommand");
  CliInvocation inv;
  inv.subcommand = args[0];
  if (!cli_detail::known_subcommands().count(inv.subcommand))
    throw CliUsageError("unknown subcommand '" + inv.subcommand + "'");
  for (std::size_t i = 1; i < args.size(); ++i) {
    const std::string& tok = args[i];
    if (tok.rfind("--", 0) != 0)
      throw CliUsageError("unexpected token '" + tok + "' (flags start with --)");
    const std::string key = cli_detail::normalize_key(tok.substr(2));
    if (key == "config") {
      if (i + 1 >= args.size()) throw CliUsageError("flag --config requires a value");
      inv.config_path = args[++i];
      continue;
    }
    if (key == "no_svg") {
      inv.flags["no_svg"] = "true";
      continue;
    }
    if (!cli_detail::known_keys().count(key))
      throw CliUsageError("unknown flag '" + tok + "'");
    if (i + 1 >= args.size()) throw CliUsageError("flag '" + tok + "' requires a value");
    const std::string value = args[++i];
    cli_detail::validate_kv(key, value);
    inv.flags[key] = value;
  }
  return inv;
}

namespace cli_detail {

// Fully resolved settings: defaults, then config file, then explicit flags.
struct Resolved {
  std::string subcommand;
  std::string problem = "composite";
  int n = 50;
  unsigned long long seed = 2;
  std::vector<double> alphas;   // empty = subcommand default
  std::vector<double> taus;
  std::vector<double> epsilons;
  long long max_iter = -1;      // -1 = subcommand default
  double lambda = 1.0;
  double nu = 1.0;
  std::optional<std::vector<double>> u0;
  long long samples = 10000;
  std::string out;
  int jobs = 0;
  bool no_svg = false;
};

inline std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw CliUsageError("cannot read config file '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  long long lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw CliUsageError("config file " + path + ":" + std::to_string(lineno) +
                          ": expected `key = value`");
    const std::string key = normalize_key(trim(t.substr(0, eq)));
    const std::string value = trim(t.substr(eq + 1));
    if (!known_keys().count(key))
      throw CliUsageError("config file " + path + ":" + std::to_string(lineno) +
                          ": unknown key '" + key + "'");
    validate_kv(key, value);
    kv[key] = value;
  }
  return kv;
}

inline Resolved resolve(const CliInvocation& inv) {
  std::map<std::string, std::string> merged;
  if (inv.config_path)
    merged = read_config_file(*inv.config_path);
  for (const auto& [k, v] : inv.flags) merged[k] = v;  // flags win

  Resolved r;
  r.subcommand = inv.subcommand;
  if (merged.count("problem")) r.problem = merged["problem"];
  if (merged.count("n")) r.n = static_cast<int>(parse_int("n", merged["n"]));
  if (merged.count("seed")) r.seed = parse_uint("seed", merged["seed"]);
  if (merged.count("alpha")) r.alphas = parse_list("alpha", merged["alpha"]);
  if (merged.count("tau")) r.taus = parse_list("tau", merged["tau"]);
  if (merged.count("eps")) r.epsilons = parse_list("eps", merged["eps"]);
  if (merged.count("max_iter")) r.max_iter = parse_int("max_iter", merged["max_iter"]);
  if (merged.count("lambda")) r.lambda = parse_double("lambda", merged["lambda"]);
  if (merged.count("nu")) r.nu = parse_double("nu", merged["nu"]);
  if (merged.count("u0")) r.u0 = parse_list("u0", merged["u0"]);
  if (merged.count("samples")) r.samples = parse_int("samples", merged["samples"]);
  if (merged.count("jobs")) r.jobs = static_cast<int>(parse_int("jobs", merged["jobs"]));
  if (merged.count("no_svg")) r.no_svg = merged["no_svg"] == "true";
  if (merged.count("out")) {
    r.out = merged["out"];
  } else if (const char* env = std::getenv("HOLDER_DESCENT_OUT"); env && *env) {
    r.out = env;
  } else {
    r.out = "results";
  }
  return r;
}

inline std::string join17(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += detail::fmt17(v[i]);
  }
  return s;
}

// Echoes the fully resolved configuration as a config file that replays the
// run: `hgd-bench <subcommand> --config <dir>/config.txt`.
inline void write_config_echo(const Resolved& r, const std::string& problem_desc) {
  const std::filesystem::path path = std::filesystem::path(r.out) / "config.txt";
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << "# resolved configuration; replay with:\n";
  f << "#   hgd-bench " << r.subcommand << " --config " << path.string() << "\n";
  f << "problem = " << r.problem << "\n";
  f << "n = " << r.n << "\n";
  f << "seed = " << r.seed << "\n";
  if (!r.alphas.empty()) f << "alpha = " << join17(r.alphas) << "\n";
  if (!r.taus.empty()) f << "tau = " << join17(r.taus) << "\n";
  if (!r.epsilons.empty()) f << "eps = " << join17(r.epsilons) << "\n";
  if (r.max_iter > 0) f << "max_iter = " << r.max_iter << "\n";
  if (r.problem == "scalar") f << "lambda = " << detail::fmt17(r.lambda) << "\n";
  if (r.problem == "poisson") f << "nu = " << detail::fmt17(r.nu) << "\n";
  if (r.u0) f << "u0 = " << join17(*r.u0) << "\n";
  if (r.subcommand == "certify") f << "samples = " << r.samples << "\n";
  f << "out = " << r.out << "\n";
  f << "jobs = " << r.jobs << "\n";
  f << "no_svg = " << (r.no_svg ? "true" : "false") << "\n";
  std::istringstream desc(problem_desc);
  std::string line;
  f << "# resolved problem:\n";
  while (std::getline(desc, line)) f << "#   " << line << "\n";
  f.flush();
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

inline double single_alpha(const Resolved& r, double fallback) {
  if (r.alphas.empty()) return fallback;
  if (r.alphas.size() > 1)
    throw CliUsageError("subcommand " + r.subcommand + " takes a single --alpha");
  return r.alphas[0];
}

inline double single_tau(const Resolved& r, double fallback) {
  if (r.taus.empty()) return fallback;
  if (r.taus.size() > 1)
    throw CliUsageError("subcommand " + r.subcommand + " takes a single --tau");
  return r.taus[0];
}

inline VectorXd u0_for(const Resolved& r, int dim, const VectorXd& fallback) {
  if (!r.u0) return fallback;
  if (static_cast<int>(r.u0->size()) != dim)
    throw CliUsageError("flag --u0: expected " + std::to_string(dim) +
                        " components, got " + std::to_string(r.u0->size()));
  VectorXd u(dim);
  for (int i = 0; i < dim; ++i) u[i] = (*r.u0)[i];
  return u;
}

inline std::string out_path(const Resolved& r, const std::string& name) {
  return (std::filesystem::path(r.out) / name).string();
}

// The problem a sweep or scaling run actually uses: the starting point is
// drawn from the seed stream before the problem, so the echo must replay
// that order to describe the same draw.
inline CompositeQuadraticProblem sweep_problem(int n, double alpha,
                                               unsigned long long seed) {
  SplitMix64 rng(seed);
  normal_vector(rng, n);  // the u0 draw preceding the problem draw
  return make_composite_problem(n, alpha, rng, seed);
}

inline void print_sweep_summary(const SweepResult& sweep) {
  for (std::size_t i = 0; i < sweep.records.size(); ++i) {
    const RunRecord& rec = sweep.records[i];
    std::printf("%s: iterations=%lld stop=%s final_dist=%.6g", rec.label.c_str(),
                rec.iterations, to_string(rec.stop_reason),
                rec.dist.empty() ? std::nan("") : rec.dist.back());
    if (sweep.plateaus[i])
      std::printf(" plateau_level=%.6g plateau_onset=%lld", sweep.plateaus[i]->level,
                  sweep.plateaus[i]->onset);
    else
      std::printf(" plateau=none");
    std::printf("\n");
  }
}

template <Problem P>
int run_flow_error(const Resolved& r, const P& p, const VectorXd& u0) {
  const long long K = r.max_iter > 0 ? r.max_iter : 100;
  if (r.taus.empty()) throw CliUsageError("flow-error requires --tau");
  const double tau = single_tau(r, 0.0);
  const double T = tau * static_cast<double>(K);
  const ErrorCertificate cert = discretization_error_profile(p, u0, T, K);
  emit_csv(cert, out_path(r, "flow_error.csv"));
  double worst = 0;
  for (double e : cert.E) worst = std::max(worst, e);
  std::printf(
      "flow-error %s: tau=%.6g K=%lld max_E=%.6g bound=%.6g pass=%s guaranteed=%s "
      "(K_required=%lld, %s)\n",
      cert.problem_label.c_str(), cert.tau, cert.K, worst, cert.bound,
      cert.pass ? "yes" : "no", cert.guaranteed ? "yes" : "no", cert.K_required,
      cert.binding_constraint.c_str());
  return cert.pass ? 0 : 1;
}

template <Problem P>
int run_certify(const Resolved& r, const P& p) {
  const ProblemSpec& s = p.spec();
  const HolderReport hol =
      certify_holder(p, s.alpha, s.beta, s.delta, r.samples, r.seed);
  const ConvexityReport con = certify_strong_convexity(p, s.mu, r.samples, r.seed + 1);

  SplitMix64 rng(r.seed + 2);
  const VectorXd center = s.minimizer ? *s.minimizer : VectorXd::Zero(s.n);
  double worst_fd = 0.0;
  for (int trial = 0; trial < 32; ++trial) {
    VectorXd u = ball_point(rng, center, 2.0);
    for (int i = 0; i < s.n; ++i)
      if (std::abs(u[i]) < 1e-4) u[i] = u[i] < 0 ? -1e-3 : 1e-3;
    worst_fd = std::max(worst_fd, finite_diff_grad_check(p, u));
  }
  const bool fd_pass = worst_fd <= 1e-5;

  const std::string path = out_path(r, "certify.csv");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("emit_csv: cannot open " + path);
  f << "# problem = " << s.label << "\n";
  f << "# samples = " << r.samples << "\n";
  f << "# seed = " << r.seed << "\n";
  f << "check,metric,value,threshold,pass\n";
  f << "holder,max_ratio," << detail::fmt17(hol.max_ratio) << "," << detail::fmt17(s.beta)
    << "," << (hol.pass ? "true" : "false") << "\n";
  f << "strong_convexity,worst_value_modulus," << detail::fmt17(con.worst_value_modulus)
    << "," << detail::fmt17(s.mu) << "," << (con.pass ? "true" : "false") << "\n";
  f << "strong_convexity,worst_mono_modulus," << detail::fmt17(con.worst_mono_modulus)
    << "," << detail::fmt17(s.mu) << "," << (con.pass ? "true" : "false") << "\n";
  f << "finite_diff,worst_rel_err," << detail::fmt17(worst_fd) << "," << detail::fmt17(1e-5)
    << "," << (fd_pass ? "true" : "false") << "\n";
  f.flush();
  if (!f) throw std::runtime_error("emit_csv: write failed for " + path);

  std::printf("holder: max_ratio=%.6g vs beta=%.6g over %lld pairs -> %s\n", hol.max_ratio,
              s.beta, hol.used, hol.pass ? "pass" : "FAIL");
  std::printf(
      "strong convexity: worst value modulus=%.6g, worst monotonicity modulus=%.6g vs "
      "mu=%.6g -> %s\n",
      con.worst_value_modulus, con.worst_mono_modulus, s.mu, con.pass ? "pass" : "FAIL");
  std::printf("finite-diff gradient: worst rel err=%.6g vs 1e-05 -> %s\n", worst_fd,
              fd_pass ? "pass" : "FAIL");
  return (hol.pass && con.pass && fd_pass) ? 0 : 1;
}

template <Problem P>
int run_info(const Resolved& r, const P& p) {
  const ProblemSpec& s = p.spec();
  std::ostringstream os;
  os << describe_problem(p);
  os << "gd stability threshold (quadratic part): tau < " << detail::fmt17(2.0 / (s.beta))
     << " .. " << detail::fmt17(2.0 / s.mu) << " (spectrum-dependent)\n";
  const std::vector<double> taus =
      r.taus.empty() ? std::vector<double>{0.01, 0.005, 0.001, 0.0005} : r.taus;
  for (double tau : taus) {
    os << "tau = " << detail::fmt17(tau) << ": predicted stagnation level = ";
    const auto level = predict_stagnation_level(s.mu, s.beta, s.alpha, tau);
    os << (level ? detail::fmt17(*level) : std::string("none (alpha = 1)")) << "\n";
  }
  const std::string text = os.str();
  const std::string path = out_path(r, "info.txt");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
  f.flush();
  if (!f) throw std::runtime_error("write failed for " + path);
  std::fputs(text.c_str(), stdout);
  return 0;
}

}  // namespace cli_detail

/// Executes a parsed invocation: resolves flags against the optional config
/// file, writes outputs under the resolved directory, prints one summary
/// line per run. Returns the process exit status.
inline int execute(const CliInvocation& inv) {
  using namespace cli_detail;
  Resolved r = resolve(inv);

  std::filesystem::create_directories(r.out);

  if (r.subcommand == "sweep-stepsize" || r.subcommand == "sweep-alpha" ||
      r.subcommand == "scaling") {
    if (r.problem != "composite")
      throw CliUsageError("subcommand " + r.subcommand + " uses the composite problem");
  }

  if (r.subcommand == "sweep-stepsize") {
    ExperimentConfig c;
    c.kind = ExperimentKind::stepsize_sweep;
    c.n = r.n;
    c.seed = r.seed;
    c.alpha = single_alpha(r, 0.5);
    if (!r.taus.empty()) c.taus = r.taus;
    c.max_iter = r.max_iter > 0 ? r.max_iter : 10000;
    c.jobs = r.jobs;
    c.output_dir = r.out;
    r.alphas = {c.alpha};
    r.taus = c.taus;
    r.max_iter = c.max_iter;
    const SweepResult sweep = run_stepsize_sweep(c);
    write_config_echo(r, describe_problem(sweep_problem(c.n, c.alpha, c.seed)));
    emit_csv(sweep, out_path(r, "sweep_stepsize.csv"));
    if (!r.no_svg) emit_svg_chart(sweep, out_path(r, "sweep_stepsize.svg"), true);
    print_sweep_summary(sweep);
    return 0;
  }

  if (r.subcommand == "sweep-alpha") {
    ExperimentConfig c;
    c.kind = ExperimentKind::alpha_sweep;
    c.n = r.n;
    c.seed = r.seed;
    if (!r.alphas.empty()) c.alphas = r.alphas;
    c.taus = {single_tau(r, 0.001)};
    c.max_iter = r.max_iter > 0 ? r.max_iter : 10000;
    c.jobs = r.jobs;
    c.output_dir = r.out;
    r.alphas = c.alphas;
    r.taus = c.taus;
    r.max_iter = c.max_iter;
    const SweepResult sweep = run_alpha_sweep(c);
    write_config_echo(r,
                      describe_problem(sweep_problem(c.n, c.alphas.front(), c.seed)));
    emit_csv(sweep, out_path(r, "sweep_alpha.csv"));
    if (!r.no_svg) emit_svg_chart(sweep, out_path(r, "sweep_alpha.svg"), true);
    print_sweep_summary(sweep);
    return 0;
  }

  if (r.subcommand == "scaling") {
    ExperimentConfig c;
    c.kind = ExperimentKind::scaling;
    c.n = r.n;
    c.seed = r.seed;
    c.alpha = single_alpha(r, 0.5);
    if (!r.epsilons.empty()) c.epsilons = r.epsilons;
    c.max_iter = r.max_iter > 0 ? r.max_iter : 200000000;
    c.jobs = r.jobs;
    c.output_dir = r.out;
    r.alphas = {c.alpha};
    r.epsilons = c.epsilons;
    r.max_iter = c.max_iter;
    const ScalingFit fit = run_complexity_scaling(c);
    write_config_echo(r, describe_problem(sweep_problem(c.n, c.alpha, c.seed)));
    emit_csv(fit, out_path(r, "scaling.csv"));
    bool dominated = true;
    for (std::size_t i = 0; i < fit.epsilons.size(); ++i) {
      const bool ok = fit.excluded[i] || !fit.in_hypothesis[i] ||
                      fit.iterations[i] <= fit.bounds[i];
      dominated = dominated && ok;
      std::printf("eps=%.6g: iterations=%lld bound=%lld tau=%.6g %s\n", fit.epsilons[i],
                  fit.iterations[i], fit.bounds[i], fit.taus[i],
                  fit.excluded[i] ? "(hit max_iter, excluded from fit)"
                                  : (ok ? "(within bound)" : "(BOUND VIOLATED)"));
    }
    std::printf("fit: slope=%.6g intercept=%.6g r2=%.6g\n", fit.slope, fit.intercept,
                fit.r2);
    return dominated ? 0 : 1;
  }

  if (r.subcommand == "flow-error" || r.subcommand == "certify" || r.subcommand == "info") {
    if (r.problem == "scalar") {
      const auto p = make_scalar_example(r.lambda);
      VectorXd def(1);
      def[0] = -1.0;
      write_config_echo(r, describe_problem(p));
      if (r.subcommand == "flow-error") return run_flow_error(r, p, u0_for(r, 1, def));
      if (r.subcommand == "certify") return run_certify(r, p);
      return run_info(r, p);
    }
    if (r.problem == "poisson") {
      const auto p = make_poisson_plus(r.n, r.nu);
      const int dim = p.spec().n;
      write_config_echo(r, describe_problem(p));
      const VectorXd def = VectorXd::Zero(dim);
      if (r.subcommand == "flow-error") return run_flow_error(r, p, u0_for(r, dim, def));
      if (r.subcommand == "certify") return run_certify(r, p);
      return run_info(r, p);
    }
    const double alpha = single_alpha(r, 0.5);
    SplitMix64 rng(r.seed);
    const VectorXd raw = normal_vector(rng, r.n);
    const auto p = make_composite_problem(r.n, alpha, rng, r.seed);
    r.alphas = {alpha};
    write_config_echo(r, describe_problem(p));
    if (r.subcommand == "flow-error") return run_flow_error(r, p, u0_for(r, r.n, raw));
    if (r.subcommand == "certify") return run_certify(r, p);
    return run_info(r, p);
  }

  throw CliUsageError("unknown subcommand '" + r.subcommand + "'");
}

}  // namespace hgd
