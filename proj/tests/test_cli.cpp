#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hgd/cli.hpp"

using namespace hgd;
using Catch::Matchers::ContainsSubstring;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string out_dir(const std::string& name) {
  const fs::path p = fs::path("test_cli_out") / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

int run_cli(const std::vector<std::string>& args) { return execute(parse_invocation(args)); }

}  // namespace

TEST_CASE("parse_invocation reports precise usage errors", "[cli]") {
  REQUIRE_THROWS_WITH(parse_invocation({}), ContainsSubstring("missing subcommand"));
  REQUIRE_THROWS_WITH(parse_invocation({"frobnicate"}),
                      ContainsSubstring("unknown subcommand 'frobnicate'"));
  REQUIRE_THROWS_WITH(parse_invocation({"scaling", "extra"}),
                      ContainsSubstring("unexpected token 'extra' (flags start with --)"));
  REQUIRE_THROWS_WITH(parse_invocation({"scaling", "--bogus", "1"}),
                      ContainsSubstring("unknown flag '--bogus'"));
  REQUIRE_THROWS_WITH(parse_invocation({"scaling", "--n"}),
                      ContainsSubstring("flag '--n' requires a value"));
  REQUIRE_THROWS_WITH(parse_invocation({"scaling", "--n", "abc"}),
                      ContainsSubstring("'abc' is not an integer"));
  REQUIRE_THROWS_WITH(parse_invocation({"scaling", "--n", "0"}),
                      ContainsSubstring("--n: must be >= 1"));
  REQUIRE_THROWS_WITH(parse_invocation({"scaling", "--alpha", "1.5"}),
                      ContainsSubstring("flag --alpha: value 1.5 is outside (0, 1]"));
  REQUIRE_THROWS_WITH(parse_invocation({"scaling", "--tau", "-0.1"}),
                      ContainsSubstring("--tau: values must be positive"));
  REQUIRE_THROWS_WITH(parse_invocation({"sweep-stepsize", "--max-iter", "0"}),
                      ContainsSubstring("--max-iter: must be >= 1"));
  REQUIRE_THROWS_WITH(parse_invocation({"certify", "--seed", "-3"}),
                      ContainsSubstring("not a nonnegative integer"));
  REQUIRE_THROWS_WITH(parse_invocation({"info", "--config"}),
                      ContainsSubstring("--config requires a value"));
}

TEST_CASE("parse_invocation normalizes flags and collects the config path", "[cli]") {
  const CliInvocation inv = parse_invocation(
      {"certify", "--problem", "scalar", "--lambda", "2", "--max-iter", "7", "--no-svg"});
  REQUIRE(inv.subcommand == "certify");
  REQUIRE(inv.flags.at("problem") == "scalar");
  REQUIRE(inv.flags.at("lambda") == "2");
  REQUIRE(inv.flags.at("max_iter") == "7");  // dash normalized to underscore
  REQUIRE(inv.flags.at("no_svg") == "true");
  REQUIRE_FALSE(inv.config_path.has_value());

  const CliInvocation with_cfg = parse_invocation({"info", "--config", "x.txt"});
  REQUIRE(with_cfg.config_path == std::optional<std::string>("x.txt"));
}

TEST_CASE("config files are parsed, validated and overridden by flags", "[cli]") {
  const std::string dir = out_dir("config_parse");
  const std::string good = dir + "/good.txt";
  {
    std::ofstream f(good);
    f << "# a comment\n\nn = 8\nseed = 5\nmax-iter = 123\n";
  }
  const auto kv = cli_detail::read_config_file(good);
  REQUIRE(kv.at("n") == "8");
  REQUIRE(kv.at("seed") == "5");
  REQUIRE(kv.at("max_iter") == "123");

  const std::string unknown = dir + "/unknown.txt";
  {
    std::ofstream f(unknown);
    f << "n = 8\n\nbogus = 1\n";
  }
  REQUIRE_THROWS_WITH(cli_detail::read_config_file(unknown),
                      ContainsSubstring("unknown key 'bogus'"));
  REQUIRE_THROWS_WITH(cli_detail::read_config_file(unknown), ContainsSubstring(":3:"));

  const std::string bad = dir + "/bad.txt";
  {
    std::ofstream f(bad);
    f << "just words\n";
  }
  REQUIRE_THROWS_WITH(cli_detail::read_config_file(bad),
                      ContainsSubstring("expected `key = value`"));
  REQUIRE_THROWS_WITH(cli_detail::read_config_file(dir + "/missing.txt"),
                      ContainsSubstring("cannot read config file"));

  CliInvocation inv;
  inv.subcommand = "info";
  inv.config_path = good;
  inv.flags["n"] = "12";  // explicit flag wins over the file
  const cli_detail::Resolved r = cli_detail::resolve(inv);
  REQUIRE(r.n == 12);
  REQUIRE(r.seed == 5);
  REQUIRE(r.max_iter == 123);
}

TEST_CASE("resolve applies defaults and the output directory fallback chain", "[cli]") {
  unsetenv("HOLDER_DESCENT_OUT");
  CliInvocation inv;
  inv.subcommand = "info";
  cli_detail::Resolved r = cli_detail::resolve(inv);
  REQUIRE(r.problem == "composite");
  REQUIRE(r.n == 50);
  REQUIRE(r.seed == 2);
  REQUIRE(r.samples == 10000);
  REQUIRE(r.max_iter == -1);
  REQUIRE(r.jobs == 0);
  REQUIRE_FALSE(r.no_svg);
  REQUIRE(r.out == "results");

  setenv("HOLDER_DESCENT_OUT", "from_env", 1);
  r = cli_detail::resolve(inv);
  REQUIRE(r.out == "from_env");

  inv.flags["out"] = "from_flag";  // explicit flag beats the environment
  r = cli_detail::resolve(inv);
  REQUIRE(r.out == "from_flag");
  unsetenv("HOLDER_DESCENT_OUT");
}

TEST_CASE("info writes a replayable config whose rerun is byte-identical", "[cli]") {
  const std::string dir = out_dir("info_scalar");
  const int rc = run_cli({"info", "--problem", "scalar", "--lambda", "2", "--seed", "9",
                          "--out", dir});
  REQUIRE(rc == 0);

  const std::string cfg = slurp(dir + "/config.txt");
  REQUIRE_THAT(cfg, ContainsSubstring("problem = scalar\n"));
  REQUIRE_THAT(cfg, ContainsSubstring("lambda = 2\n"));
  REQUIRE_THAT(cfg, ContainsSubstring("seed = 9\n"));
  REQUIRE_THAT(cfg, ContainsSubstring("# resolved configuration; replay with:\n"));
  REQUIRE_THAT(cfg, ContainsSubstring("#   hgd-bench info --config "));

  const std::string info = slurp(dir + "/info.txt");
  REQUIRE_THAT(info, ContainsSubstring("label = scalar(lambda=2)"));
  REQUIRE_THAT(info, ContainsSubstring("mu = 2"));
  REQUIRE_THAT(info, ContainsSubstring("predicted stagnation level"));
  REQUIRE_THAT(info, ContainsSubstring("gd stability threshold"));

  // replaying the echoed config reproduces both files byte for byte
  REQUIRE(run_cli({"info", "--config", dir + "/config.txt"}) == 0);
  REQUIRE(slurp(dir + "/config.txt") == cfg);
  REQUIRE(slurp(dir + "/info.txt") == info);
}

TEST_CASE("flow-error certifies the scalar example end to end", "[cli]") {
  const std::string dir = out_dir("flow_scalar");
  const int rc = run_cli({"flow-error", "--problem", "scalar", "--lambda", "1", "--tau",
                          "0.125", "--max-iter", "8", "--out", dir});
  REQUIRE(rc == 0);
  const std::string csv = slurp(dir + "/flow_error.csv");
  REQUIRE_THAT(csv, ContainsSubstring("# problem = scalar(lambda=1)\n"));
  REQUIRE_THAT(csv, ContainsSubstring("# K = 8\n"));
  REQUIRE_THAT(csv, ContainsSubstring("# pass = true\n"));
  REQUIRE_THAT(csv, ContainsSubstring("l,t,E_l,bound\n"));

  const std::string dir2 = out_dir("flow_scalar_rerun");
  REQUIRE(run_cli({"flow-error", "--problem", "scalar", "--lambda", "1", "--tau", "0.125",
                   "--max-iter", "8", "--out", dir2}) == 0);
  REQUIRE(slurp(dir2 + "/flow_error.csv") == csv);

  REQUIRE_THROWS_WITH(run_cli({"flow-error", "--problem", "scalar", "--out", dir}),
                      ContainsSubstring("flow-error requires --tau"));
  REQUIRE_THROWS_WITH(run_cli({"flow-error", "--problem", "scalar", "--tau", "0.1",
                               "--u0", "0.5,0.5", "--out", dir}),
                      ContainsSubstring("flag --u0: expected 1 components, got 2"));
}

TEST_CASE("certify rates a problem against its declared constants", "[cli]") {
  const std::string dir = out_dir("certify_scalar");
  const int rc = run_cli({"certify", "--problem", "scalar", "--samples", "500", "--seed",
                          "3", "--out", dir});
  REQUIRE(rc == 0);
  const std::string csv = slurp(dir + "/certify.csv");
  REQUIRE_THAT(csv, ContainsSubstring("# samples = 500\n"));
  REQUIRE_THAT(csv, ContainsSubstring("check,metric,value,threshold,pass\n"));
  REQUIRE_THAT(csv, ContainsSubstring("holder,max_ratio,"));
  REQUIRE_THAT(csv, ContainsSubstring("strong_convexity,worst_value_modulus,"));
  REQUIRE_THAT(csv, ContainsSubstring("strong_convexity,worst_mono_modulus,"));
  REQUIRE_THAT(csv, ContainsSubstring("finite_diff,worst_rel_err,"));
  std::size_t lines = 0;
  for (char ch : csv)
    if (ch == '\n') ++lines;
  REQUIRE(lines == 8);  // 3 comments + header + 4 check rows
  const std::string cfg = slurp(dir + "/config.txt");
  REQUIRE_THAT(cfg, ContainsSubstring("samples = 500\n"));
}

TEST_CASE("sweep-stepsize writes CSV, chart and the default grid", "[cli]") {
  const std::string dir = out_dir("sweep_small");
  const int rc =
      run_cli({"sweep-stepsize", "--n", "8", "--seed", "3", "--max-iter", "50", "--out", dir});
  REQUIRE(rc == 0);
  const std::string csv = slurp(dir + "/sweep_stepsize.csv");
  REQUIRE_THAT(csv, ContainsSubstring("# taus = 0.01,0.005,0.001,0.0005\n"));
  REQUIRE_THAT(csv, ContainsSubstring("run_label,k,dist,grad_norm\n"));
  REQUIRE(fs::exists(dir + "/sweep_stepsize.svg"));
  const std::string cfg = slurp(dir + "/config.txt");
  REQUIRE_THAT(cfg,
               ContainsSubstring("tau = 0.01,0.0050000000000000001,0.001,"
                                 "0.00050000000000000001\n"));
  REQUIRE_THAT(cfg, ContainsSubstring("max_iter = 50\n"));

  const std::string dir2 = out_dir("sweep_nosvg");
  REQUIRE(run_cli({"sweep-stepsize", "--n", "8", "--seed", "3", "--max-iter", "50",
                   "--no-svg", "--out", dir2}) == 0);
  REQUIRE_FALSE(fs::exists(dir2 + "/sweep_stepsize.svg"));
  REQUIRE(slurp(dir2 + "/sweep_stepsize.csv") == csv);  // same seed, same data

  REQUIRE_THROWS_WITH(run_cli({"sweep-stepsize", "--problem", "scalar", "--out", dir}),
                      ContainsSubstring("uses the composite problem"));
  REQUIRE_THROWS_WITH(run_cli({"sweep-alpha", "--tau", "0.01,0.001", "--out", dir}),
                      ContainsSubstring("takes a single --tau"));
}

TEST_CASE("scaling honours a custom epsilon grid and reports domination", "[cli]") {
  const std::string dir = out_dir("scaling_small");
  const int rc = run_cli({"scaling", "--n", "6", "--seed", "3", "--eps", "0.2,0.1,0.05",
                          "--out", dir});
  REQUIRE(rc == 0);
  const std::string csv = slurp(dir + "/scaling.csv");
  REQUIRE_THAT(csv, ContainsSubstring("# kind = scaling\n"));
  REQUIRE_THAT(csv, ContainsSubstring("epsilon,tau,iterations,bound,in_hypothesis\n"));
  REQUIRE_THAT(csv, ContainsSubstring("# notes = all runs reached their target\n"));
  const std::string cfg = slurp(dir + "/config.txt");
  REQUIRE_THAT(cfg, ContainsSubstring("eps = "));
  REQUIRE_THAT(cfg, ContainsSubstring("n = 6\n"));
}
