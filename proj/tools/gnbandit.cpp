// gnbandit: run, sweep, verify and compare Geometric Narrowing experiments.
//
// Exit codes: 0 success, 1 a verifier failed, 2 usage or config error,
// 3 runtime failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <thread>

#include "geonarrow/harness.hpp"

namespace gn = geonarrow;

namespace {

struct Common {
  std::string config;
  std::string out;
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::optional<std::uint64_t> seed_offset;
};

void add_common(CLI::App* cmd, Common& c, bool needs_config) {
  auto* opt = cmd->add_option("--config", c.config, "experiment config (JSON)");
  if (needs_config) opt->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, "output path; JSON-lines, a .csv sibling is written for tables");
  cmd->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--seed-offset", c.seed_offset, "added to every seed; overrides GEONARROW_SEED_OFFSET");
}

gn::ExperimentConfig load(const Common& c) {
  gn::ExperimentConfig cfg = gn::load_config(c.config);
  gn::apply_seed_offset(cfg, c.seed_offset ? *c.seed_offset : gn::seed_offset_from_env());
  return cfg;
}

std::string out_path(const Common& c, const gn::ExperimentConfig& cfg, const char* fallback) {
  if (!c.out.empty()) return c.out;
  if (!cfg.output.empty()) return cfg.output;
  return fallback;
}

std::string csv_sibling(const std::string& path) {
  const auto dot = path.find_last_of('.');
  const auto slash = path.find_last_of('/');
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  return (has_ext ? path.substr(0, dot) : path) + ".csv";
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw gn::UsageError("cannot open output " + path);
  return os;
}

int cmd_run(const Common& c) {
  const auto cfg = load(c);
  const auto records = gn::run_all(cfg, c.workers);
  auto os = open_out(out_path(c, cfg, "runs.jsonl"));
  for (const auto& r : records) os << gn::to_json(r).dump() << '\n';
  return 0;
}

int cmd_sweep(const Common& c) {
  const auto cfg = load(c);
  std::set<long long> distinct(cfg.T.begin(), cfg.T.end());
  if (distinct.size() < 3) throw gn::UsageError("sweep: need at least three distinct T values");
  const auto records = gn::run_all(cfg, c.workers);
  const auto summary = gn::summarize(cfg.algorithm, records);
  const std::string path = out_path(c, cfg, "sweep.jsonl");
  auto os = open_out(path);
  for (const auto& r : records) os << gn::to_json(r).dump() << '\n';
  os << gn::to_json(summary).dump() << '\n';
  auto csv = open_out(csv_sibling(path));
  gn::write_sweep_csv(csv, summary);
  std::cout << "slope " << gn::format_double(summary.slope) << " se " << gn::format_double(summary.slope_se) << '\n';
  return 0;
}

int cmd_compare(const Common& c) {
  const auto cfg = load(c);
  const auto rows = gn::compare_static(cfg, c.workers);
  const std::string path = out_path(c, cfg, "compare.jsonl");
  auto os = open_out(path);
  for (const auto& r : rows) os << gn::to_json(r).dump() << '\n';
  auto csv = open_out(csv_sibling(path));
  gn::write_pairs_csv(csv, rows);
  return 0;
}

int cmd_verify(const Common& c, const std::string& scope) {
  gn::LowerBoundSuite suite;
  if (!c.config.empty()) {
    std::ifstream in(c.config);
    if (!in) throw gn::UsageError("cannot open " + c.config);
    nlohmann::json j;
    try {
      in >> j;
      if (j.contains("d")) suite.d = j.at("d").get<std::vector<int>>();
      if (j.contains("q")) suite.q = j.at("q").get<std::vector<double>>();
      if (j.contains("M")) suite.M = j.at("M").get<std::vector<int>>();
      if (j.contains("T")) suite.T = j.at("T").get<std::vector<long long>>();
    } catch (const nlohmann::json::exception& e) {
      throw gn::UsageError(std::string("verify config: ") + e.what());
    }
  }
  const auto res = gn::run_verify(scope, suite);
  const std::string text = res.report.dump(2);
  if (c.out.empty()) {
    std::cout << text << '\n';
  } else {
    open_out(c.out) << text << '\n';
  }
  std::cerr << "verify " << scope << ": " << (res.pass ? "pass" : "FAIL") << '\n';
  return res.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometric Narrowing batched-bandit experiments"};
  app.require_subcommand(1);

  Common run_opts, sweep_opts, verify_opts, compare_opts;
  std::string scope = "all";
  auto* run = app.add_subcommand("run", "one JSON record per (T, seed) cell");
  add_common(run, run_opts, true);
  auto* sweep = app.add_subcommand("sweep", "records plus per-T summary and fitted log-log slope");
  add_common(sweep, sweep_opts, true);
  auto* verify = app.add_subcommand("verify", "deterministic property checks");
  add_common(verify, verify_opts, false);
  verify->add_option("--scope", scope, "instances | lowerbound | ls | all")
      ->check(CLI::IsMember({"instances", "lowerbound", "ls", "all"}));
  auto* compare = app.add_subcommand("compare-static", "adaptive vs static grid on paired seeds");
  add_common(compare, compare_opts, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(run_opts);
    if (*sweep) return cmd_sweep(sweep_opts);
    if (*verify) return cmd_verify(verify_opts, scope);
    if (*compare) return cmd_compare(compare_opts);
  } catch (const gn::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
