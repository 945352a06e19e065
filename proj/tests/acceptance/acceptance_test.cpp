// Acceptance run: one PASS/FAIL line per criterion. Tolerances are pinned
// here and nowhere else. Exit status is nonzero if any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "geonarrow/harness.hpp"

namespace gn = geonarrow;
using nlohmann::json;

namespace {

// criterion 1 and 7
constexpr double kSlopeLo = 0.40;
constexpr double kSlopeHi = 0.65;
// criterion 2
constexpr int kMaxBatchesAtLargestT = 15;
// criterion 3
constexpr int kSimpleRegretMinHits = 99;
// criterion 4
constexpr int kMaxNoisyRetentionFailures = 1;
// criterion 6
constexpr double kStaticRegretRatio = 2.5;

const std::vector<long long> kSweepT{1 << 14, 1 << 16, 1 << 18, 1 << 20};

std::vector<std::uint64_t> seeds(int n) {
  std::vector<std::uint64_t> s(n);
  for (int i = 0; i < n; ++i) s[i] = static_cast<std::uint64_t>(i + 1);
  return s;
}

gn::ExperimentConfig config(const std::string& algorithm, int d, double q, std::vector<long long> T,
                            std::vector<std::uint64_t> seed_list, const std::string& noise = "gaussian") {
  json j{{"instance", {{"name", "power"}, {"d", d}, {"q", q}}},
         {"algorithm", algorithm},
         {"T", T},
         {"seeds", seed_list},
         {"noise", noise}};
  return gn::parse_config(j);
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
};

void report(int id, const char* title, Outcome& o) {
  std::printf("criterion %d %s: %s | %s\n", id, title, o.pass ? "PASS" : "FAIL", o.detail.str().c_str());
  std::fflush(stdout);
}

std::string fmt(double v) { return gn::format_double(std::round(v * 1e4) / 1e4); }

bool spent_horizon(const gn::RunRecord& r) {
  return !r.communication_points.empty() && r.communication_points.back() == r.T;
}

// Every record produced below is checked for the exact-budget property.
long long g_records = 0;
long long g_budget_violations = 0;

void audit_budget(const std::vector<gn::RunRecord>& rs) {
  for (const auto& r : rs) {
    ++g_records;
    if (!spent_horizon(r)) ++g_budget_violations;
  }
}

std::vector<gn::RunRecord> run(const gn::ExperimentConfig& c) {
  auto rs = gn::run_all(c, 1);
  audit_budget(rs);
  return rs;
}

// ---------------------------------------------------------------------------

Outcome regret_rate(const std::vector<gn::RunRecord>& sweep) {
  Outcome o;
  const auto s = gn::summarize("gn", sweep);
  o.pass = s.slope >= kSlopeLo && s.slope <= kSlopeHi;
  o.detail << "slope " << fmt(s.slope) << " (se " << fmt(s.slope_se) << "), target [" << kSlopeLo << ", "
           << kSlopeHi << "]; mean regret by T:";
  for (const auto& row : s.rows) o.detail << ' ' << row.T << ':' << fmt(row.mean_regret);
  return o;
}

Outcome communication(const std::vector<gn::RunRecord>& sweep) {
  Outcome o;
  int worst_top = 0;
  int violations = 0;
  for (const auto& r : sweep) {
    const int cap = 2 * gn::choose_M(r.T, 1, 2.0) + 1;
    if (r.batches_used > cap) ++violations;
    if (r.T == kSweepT.back()) worst_top = std::max(worst_top, r.batches_used);
  }
  o.pass = violations == 0 && worst_top <= kMaxBatchesAtLargestT;
  o.detail << "runs above 2M+1: " << violations << "; max batches at T=2^20: " << worst_top << " (cap "
           << kMaxBatchesAtLargestT << ")";
  return o;
}

Outcome simple_regret() {
  Outcome o;
  const long long T = 100000;
  const double lambda = 1.0, L = 1.0, q = 2.0;
  const double bound = std::exp(0.5) * L * std::pow(2.0 + 2.0 * std::pow((lambda + L) / lambda, 1.0 / q), q) *
                       std::sqrt(std::log(static_cast<double>(T)) / static_cast<double>(T));
  const auto rs = run(config("gn", 1, q, {T}, seeds(100)));
  int hits = 0;
  double worst = 0.0;
  for (const auto& r : rs) {
    hits += r.simple_regret <= bound;
    worst = std::max(worst, r.simple_regret);
  }
  o.pass = hits >= kSimpleRegretMinHits;
  o.detail << hits << "/100 within " << fmt(bound) << "; worst " << fmt(worst);
  return o;
}

Outcome retention() {
  Outcome o;
  int zero_runs = 0, zero_failures = 0;
  for (int d : {1, 2}) {
    for (double q : {1.0, 2.0}) {
      for (double x : {0.0, 0.3, 0.5, 0.77}) {
        for (long long T : {10000LL, 1000000LL}) {
          json j{{"instance", {{"name", "power"}, {"d", d}, {"q", q}, {"x_star", std::vector<double>(d, x)}}},
                 {"T", {T}},
                 {"seeds", {1}},
                 {"noise", "none"}};
          for (const auto& r : run(gn::parse_config(j))) {
            ++zero_runs;
            zero_failures += !r.optimum_retained;
          }
        }
      }
    }
  }
  for (long long T : {10000LL, 1000000LL}) {
    json j{{"instance", {{"name", "piecewise"}, {"d", 1}}}, {"T", {T}}, {"seeds", {1}}, {"noise", "none"}};
    for (const auto& r : run(gn::parse_config(j))) {
      ++zero_runs;
      zero_failures += !r.optimum_retained;
    }
  }
  int noisy_failures = 0;
  for (const auto& r : run(config("gn", 1, 2.0, {10000}, seeds(200)))) noisy_failures += !r.optimum_retained;
  o.pass = zero_failures == 0 && noisy_failures <= kMaxNoisyRetentionFailures;
  o.detail << "zero-noise failures " << zero_failures << "/" << zero_runs << "; noisy failures " << noisy_failures
           << "/200 (allowed " << kMaxNoisyRetentionFailures << ")";
  return o;
}

Outcome instance_families() {
  Outcome o;
  const auto res = gn::run_verify("all", gn::LowerBoundSuite{});
  int failed = 0, total = 0;
  for (const auto& r : res.report.at("reports")) {
    ++total;
    failed += !r.at("pass").get<bool>();
  }
  // sanity run: uniform play pays the floor on every out-of-region pull
  int floor_total = 0, floor_failed = 0;
  for (double q : {1.0, 2.0}) {
    const auto g = gn::reference_grid(10000, 2, 1, q);
    for (int j = 1; j <= 2; ++j) {
      for (int l = 1; l <= 2; ++l) {
        const auto rep = gn::check_baseline_floor(g, j, 1, l, 1.0 / 64, 20000, 1);
        ++floor_total;
        floor_failed += !rep.pass;
      }
    }
  }
  o.pass = res.pass && failed == 0 && floor_failed == 0;
  o.detail << "property reports failed " << failed << "/" << total << "; baseline floor failed " << floor_failed
           << "/" << floor_total;
  return o;
}

Outcome static_grid_equivalence() {
  Outcome o;
  int grids = 0, bad_grids = 0, infeasible = 0;
  for (int d : {1, 2}) {
    for (long long T : kSweepT) {
      try {
        const auto g = gn::static_grid(T, d, 2.0, 1.0, 1.0);
        ++grids;
        bool ok = g.tau.back() <= T;
        for (std::size_t m = 1; m < g.tau.size(); ++m) ok = ok && g.tau[m - 1] < g.tau[m];
        bad_grids += !ok;
      } catch (const gn::ScheduleInfeasible&) {
        ++infeasible;
      }
    }
  }

  int pairs = 0, mismatched = 0;
  std::set<std::pair<int, long long>> where;
  for (int d : {1, 2}) {
    const auto rows = gn::compare_static(config("gn", d, 2.0, kSweepT, seeds(3), "none"), 1);
    for (const auto& r : rows) {
      if (!r.static_feasible) continue;
      ++pairs;
      if (r.adaptive_x_out != r.static_x_out) {
        where.insert({d, r.T});
        ++mismatched;
      }
    }
  }

  const auto noisy = gn::compare_static(config("gn", 1, 2.0, kSweepT, seeds(20)), 1);
  std::map<long long, std::pair<double, double>> sums;
  for (const auto& r : noisy) {
    if (!r.static_feasible) continue;
    sums[r.T].first += r.adaptive_regret;
    sums[r.T].second += r.static_regret;
  }
  double worst_ratio = 0.0;
  std::ostringstream ratios;
  for (const auto& [T, s] : sums) {
    const double ratio = s.second / s.first;
    worst_ratio = std::max(worst_ratio, ratio);
    ratios << ' ' << T << ':' << fmt(ratio);
  }

  o.pass = bad_grids == 0 && grids > 0 && pairs > 0 && mismatched == 0 && !sums.empty() &&
           worst_ratio <= kStaticRegretRatio;
  o.detail << "grids ok " << grids - bad_grids << "/" << grids << " (" << infeasible << " infeasible); zero-noise x_out"
           << " mismatches " << mismatched << "/" << pairs;
  for (const auto& [d, T] : where) o.detail << " [d=" << d << " T=" << T << "]";
  o.detail
           << "; static/adaptive regret by T:" << ratios.str() << " (cap " << kStaticRegretRatio << ")";
  return o;
}

Outcome level_smooth() {
  Outcome o;
  json j{{"instance", {{"name", "power"}, {"d", 1}, {"q", 1}, {"x_star", {0.4}}}},
         {"algorithm", "gn-prime"},
         {"ell", 1.0},
         {"T", kSweepT},
         {"seeds", seeds(20)}};
  const auto rs = run(gn::parse_config(j));
  const auto s = gn::summarize("gn-prime", rs);
  const bool slope_ok = s.slope >= kSlopeLo && s.slope <= kSlopeHi;

  const long long cap = gn::gn_prime_cap({1.0, 1.0}, 1);
  bool cap_exact = cap == 16;
  long long largest_kept = 0;
  for (const auto& r : rs) {
    for (const auto& t : r.elimination_trace) {
      if (t.kept != std::min(t.pre, cap)) cap_exact = false;
      largest_kept = std::max(largest_kept, t.kept);
    }
  }
  const auto cover = gn::run_verify("ls", {});
  o.pass = slope_ok && cap_exact && cover.pass;
  o.detail << "slope " << fmt(s.slope) << " (se " << fmt(s.slope_se) << "), target [" << kSlopeLo << ", "
           << kSlopeHi << "]; cap " << cap << ", largest kept " << largest_kept
           << (cap_exact ? ", kept = min(pre, cap) in every batch" : ", cap not applied exactly")
           << "; covering sandwich " << (cover.pass ? "pass" : "fail") << " on 2 examples";
  return o;
}

Outcome determinism() {
  Outcome o;
  static_assert(std::is_void_v<decltype(std::declval<gn::BatchedEnvironment&>().pull(std::declval<const gn::PointD&>()))>,
                "pull must not return observations");
  static_assert(std::is_same_v<decltype(std::declval<gn::BatchedEnvironment&>().flush()), gn::Batch>);

  auto serialize = [](const gn::ExperimentConfig& c, int workers) {
    std::string out;
    for (const auto& r : gn::run_all(c, workers)) out += gn::to_json(r).dump() + '\n';
    return out;
  };
  int identical = 0, configs = 0;
  for (const auto* alg : {"gn", "gn-static", "gn-simple", "uniform"}) {
    auto c = config(alg, 2, 1.0, {1000000}, seeds(3));
    ++configs;
    identical += serialize(c, 1) == serialize(c, 3);
  }

  // the pending buffer is invisible: communication points appear only on flush
  const auto f = gn::build_instance({});
  gn::BatchedEnvironment env(f, gn::NoiseSpec::gaussian(), 10, 1);
  env.pull(gn::PointD::Constant(1, 0.5));
  const bool hidden = env.communication_points().empty();
  const bool released = env.flush().size() == 1;

  o.pass = identical == configs && g_budget_violations == 0 && g_records > 0 && hidden && released;
  o.detail << "byte-identical reruns " << identical << "/" << configs << "; runs not spending exactly T "
           << g_budget_violations << "/" << g_records << "; pre-flush buffer " << (hidden ? "hidden" : "VISIBLE");
  return o;
}

}  // namespace

int main() {
  bool all = true;
  auto record = [&](int id, const char* title, Outcome o) {
    report(id, title, o);
    all = all && o.pass;
  };

  const auto sweep = run(config("gn", 1, 2.0, kSweepT, seeds(20)));
  record(1, "regret rate", regret_rate(sweep));
  record(2, "communication complexity", communication(sweep));
  record(3, "simple regret", simple_regret());
  record(4, "optimum retention", retention());
  record(5, "instance families", instance_families());
  record(6, "static grid", static_grid_equivalence());
  record(7, "level-smooth variant", level_smooth());
  record(8, "determinism and budget", determinism());
  return all ? 0 : 1;
}
