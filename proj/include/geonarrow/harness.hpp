#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "geonarrow/gn.hpp"
#include "geonarrow/instances.hpp"
#include "geonarrow/lowerbound.hpp"

namespace geonarrow {

inline constexpr int kSchemaVersion = 1;

/// Environment variable consulted when --seed-offset is absent.
inline constexpr const char* kSeedOffsetEnv = "GEONARROW_SEED_OFFSET";

/// Malformed or unsupported configuration; the CLI maps it to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InstanceConfig {
  std::string name = "power";  // power | piecewise
  int d = 1;
  double q = 2.0;
  double scale = 1.0;
  std::vector<double> x_star;  // empty: 0.3 on every axis
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  InstanceConfig instance;
  std::string algorithm = "gn";  // gn | gn-static | gn-simple | gn-prime | uniform
  std::optional<double> lambda;  // declared; defaults to the instance's
  std::optional<double> big_l;
  std::optional<double> q;
  double ell = 1.0;              // gn-prime only
  int simple_depth = 0;          // gn-simple; 0 picks 2 * choose_M
  double cover_radius = 1.0 / 64;  // uniform only
  std::vector<long long> T;
  std::vector<std::uint64_t> seeds;
  double noise_std = 1.0;
  std::string noise = "gaussian";  // gaussian | none
  std::string output;
};

/// Throws UsageError on unknown names, T < 8, duplicate seeds or a
/// schema_version other than kSchemaVersion.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& c);

InstanceD build_instance(const InstanceConfig& c);
NoiseSpec build_noise(const ExperimentConfig& c);

/// One (T, seed) cell.
RunRecord run_cell(const ExperimentConfig& c, long long T, std::uint64_t seed);

/// Every (T, seed) cell in (T, seed) order, computed on `workers` threads.
std::vector<RunRecord> run_all(const ExperimentConfig& c, int workers);

/// The offset from kSeedOffsetEnv, or 0.
std::uint64_t seed_offset_from_env();
void apply_seed_offset(ExperimentConfig& c, std::uint64_t offset);

nlohmann::json to_json(const RunRecord& r);
RunRecord record_from_json(const nlohmann::json& j);

struct SweepRow {
  long long T = 0;
  long long runs = 0;
  double mean_regret = 0;
  double sd_regret = 0;
  double median_regret = 0;
  double mean_simple_regret = 0;
  double mean_batches = 0;
  int max_batches = 0;
  double retention_rate = 0;
};

struct SweepSummary {
  std::string algorithm;
  std::vector<SweepRow> rows;
  double slope = 0;     // OLS of ln(mean regret) on ln T
  double slope_se = 0;
  double intercept = 0;
};

/// Needs at least three distinct T values.
SweepSummary summarize(const std::string& algorithm, const std::vector<RunRecord>& records);
nlohmann::json to_json(const SweepSummary& s);

/// Least squares fit y = a + b x; returns {b, se(b), a}.
struct LineFit {
  double slope = 0;
  double slope_se = 0;
  double intercept = 0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Shortest round-trip decimal form.
std::string format_double(double v);

void write_sweep_csv(std::ostream& os, const SweepSummary& s);
/// Parses a CSV written by write_sweep_csv back into rows.
std::vector<SweepRow> read_sweep_csv(std::istream& is);

struct PairRow {
  long long T = 0;
  std::uint64_t seed = 0;
  bool static_feasible = true;
  double adaptive_regret = 0;
  double static_regret = 0;
  int adaptive_batches = 0;
  int static_batches = 0;
  std::vector<long long> adaptive_points;
  std::vector<long long> static_points;
  PointD adaptive_x_out;
  PointD static_x_out;
};

/// Adaptive vs static GN on the same seeds. Infeasible static grids are
/// flagged, not fatal.
std::vector<PairRow> compare_static(const ExperimentConfig& c, int workers);
nlohmann::json to_json(const PairRow& r);
void write_pairs_csv(std::ostream& os, const std::vector<PairRow>& rows);

struct VerifyResult {
  nlohmann::json report;
  bool pass = true;
};

struct LowerBoundSuite {
  std::vector<int> d{1, 2};
  std::vector<double> q{1.0, 2.0};
  std::vector<int> M{2, 3};
  std::vector<long long> T{10000, 1000000};
};

/// scope: instances | lowerbound | ls | all.
VerifyResult run_verify(const std::string& scope, const LowerBoundSuite& suite, const VerifyOptions& opt = {});

/// Round robin over a grid of [-R, R]^d on f_{j,k,l}: each pull outside
/// S_l^{2^{1/q} eps_j} must cost at least eps_j^q / 3^q.
PropertyReport check_baseline_floor(const ReferenceGrid& g, int j, int k, int l, double cover_radius,
                                    long long horizon, std::uint64_t seed);

}  // namespace geonarrow
