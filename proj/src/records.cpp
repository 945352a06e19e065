#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "geonarrow/harness.hpp"

namespace geonarrow {

using nlohmann::json;

namespace {

std::vector<double> to_vector(const PointD& p) { return {p.data(), p.data() + p.size()}; }

PointD to_point(const std::vector<double>& v) {
  PointD p(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) p(static_cast<Eigen::Index>(i)) = v[i];
  return p;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

const std::set<std::string> kAlgorithms{"gn", "gn-static", "gn-simple", "gn-prime", "uniform"};
const std::set<std::string> kInstances{"power", "piecewise"};

}  // namespace

ExperimentConfig parse_config(const json& j) {
  try {
    ExperimentConfig c;
    c.schema_version = get_or(j, "schema_version", kSchemaVersion);
    if (c.schema_version != kSchemaVersion) throw UsageError("config: unsupported schema_version");
    if (j.contains("instance")) {
      const json& ji = j.at("instance");
      c.instance.name = get_or<std::string>(ji, "name", c.instance.name);
      c.instance.d = get_or(ji, "d", c.instance.d);
      c.instance.q = get_or(ji, "q", c.instance.q);
      c.instance.scale = get_or(ji, "scale", c.instance.scale);
      c.instance.x_star = get_or(ji, "x_star", c.instance.x_star);
    }
    if (!kInstances.count(c.instance.name)) throw UsageError("config: unknown instance '" + c.instance.name + "'");
    c.algorithm = get_or<std::string>(j, "algorithm", c.algorithm);
    if (!kAlgorithms.count(c.algorithm)) throw UsageError("config: unknown algorithm '" + c.algorithm + "'");
    if (j.contains("lambda")) c.lambda = j.at("lambda").get<double>();
    if (j.contains("L")) c.big_l = j.at("L").get<double>();
    if (j.contains("q")) c.q = j.at("q").get<double>();
    c.ell = get_or(j, "ell", c.ell);
    c.simple_depth = get_or(j, "simple_depth", c.simple_depth);
    c.cover_radius = get_or(j, "cover_radius", c.cover_radius);
    c.T = j.at("T").get<std::vector<long long>>();
    c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    c.noise = get_or<std::string>(j, "noise", c.noise);
    c.noise_std = get_or(j, "noise_std", c.noise_std);
    c.output = get_or<std::string>(j, "output", c.output);

    if (c.T.empty()) throw UsageError("config: T list is empty");
    if (c.seeds.empty()) throw UsageError("config: seeds list is empty");
    for (long long t : c.T) {
      if (t < 8) throw UsageError("config: every T must be at least 8");
    }
    if (std::set<std::uint64_t>(c.seeds.begin(), c.seeds.end()).size() != c.seeds.size()) {
      throw UsageError("config: seeds must be distinct");
    }
    if (c.noise != "gaussian" && c.noise != "none") throw UsageError("config: noise must be 'gaussian' or 'none'");
    if (!(c.noise_std >= 0.0 && c.noise_std <= 1.0)) throw UsageError("config: noise_std must lie in [0, 1]");
    if (c.instance.d < 1) throw UsageError("config: instance.d must be >= 1");
    if (!c.instance.x_star.empty() && static_cast<int>(c.instance.x_star.size()) != c.instance.d) {
      throw UsageError("config: instance.x_star length must equal d");
    }
    return c;
  } catch (const json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
  json j{{"schema_version", c.schema_version},
         {"instance",
          {{"name", c.instance.name}, {"d", c.instance.d}, {"q", c.instance.q}, {"scale", c.instance.scale}}},
         {"algorithm", c.algorithm},
         {"ell", c.ell},
         {"simple_depth", c.simple_depth},
         {"cover_radius", c.cover_radius},
         {"T", c.T},
         {"seeds", c.seeds},
         {"noise", c.noise},
         {"noise_std", c.noise_std}};
  if (!c.instance.x_star.empty()) j["instance"]["x_star"] = c.instance.x_star;
  if (c.lambda) j["lambda"] = *c.lambda;
  if (c.big_l) j["L"] = *c.big_l;
  if (c.q) j["q"] = *c.q;
  if (!c.output.empty()) j["output"] = c.output;
  return j;
}

json to_json(const RunRecord& r) {
  json trace = json::array();
  for (const auto& t : r.elimination_trace) {
    trace.push_back({{"index", t.index},
                     {"radius_exp", t.radius_exp},
                     {"pre", t.pre},
                     {"kept", t.kept},
                     {"pulls", t.pulls},
                     {"surplus", t.surplus},
                     {"retained_diameter", t.retained_diameter},
                     {"optimum_retained", t.optimum_retained}});
  }
  return {{"schema_version", kSchemaVersion},
          {"kind", "run"},
          {"seed", r.seed},
          {"T", r.T},
          {"algorithm", r.algorithm},
          {"rng", r.rng},
          {"batches_used", r.batches_used},
          {"communication_points", r.communication_points},
          {"cum_regret", r.cum_regret},
          {"simple_regret", r.simple_regret},
          {"x_out", to_vector(r.x_out)},
          {"optimum_retained", r.optimum_retained},
          {"truncated", r.truncated},
          {"elimination_trace", trace},
          {"concentration_checks", r.concentration_checks},
          {"concentration_exceedances", r.concentration_exceedances}};
}

RunRecord record_from_json(const json& j) {
  RunRecord r;
  r.seed = j.at("seed").get<std::uint64_t>();
  r.T = j.at("T").get<long long>();
  r.algorithm = j.at("algorithm").get<std::string>();
  r.rng = j.at("rng").get<std::string>();
  r.batches_used = j.at("batches_used").get<int>();
  r.communication_points = j.at("communication_points").get<std::vector<long long>>();
  r.cum_regret = j.at("cum_regret").get<double>();
  r.simple_regret = j.at("simple_regret").get<double>();
  r.x_out = to_point(j.at("x_out").get<std::vector<double>>());
  r.optimum_retained = j.at("optimum_retained").get<bool>();
  r.truncated = j.at("truncated").get<bool>();
  for (const auto& t : j.at("elimination_trace")) {
    BatchTrace b;
    b.index = t.at("index").get<int>();
    b.radius_exp = t.at("radius_exp").get<int>();
    b.radius = std::ldexp(1.0, -b.radius_exp);
    b.pre = t.at("pre").get<long long>();
    b.kept = t.at("kept").get<long long>();
    b.pulls = t.at("pulls").get<long long>();
    b.surplus = t.at("surplus").get<long long>();
    b.retained_diameter = t.at("retained_diameter").get<double>();
    b.optimum_retained = t.at("optimum_retained").get<bool>();
    r.elimination_trace.push_back(b);
  }
  r.concentration_checks = j.at("concentration_checks").get<long long>();
  r.concentration_exceedances = j.at("concentration_exceedances").get<long long>();
  return r;
}

json to_json(const SweepSummary& s) {
  json rows = json::array();
  for (const auto& r : s.rows) {
    rows.push_back({{"T", r.T},
                    {"runs", r.runs},
                    {"mean_regret", r.mean_regret},
                    {"sd_regret", r.sd_regret},
                    {"median_regret", r.median_regret},
                    {"mean_simple_regret", r.mean_simple_regret},
                    {"mean_batches", r.mean_batches},
                    {"max_batches", r.max_batches},
                    {"retention_rate", r.retention_rate}});
  }
  return {{"schema_version", kSchemaVersion}, {"kind", "sweep"},  {"algorithm", s.algorithm},
          {"rows", rows},                     {"slope", s.slope}, {"slope_se", s.slope_se},
          {"intercept", s.intercept}};
}

json to_json(const PairRow& r) {
  return {{"schema_version", kSchemaVersion},
          {"kind", "pair"},
          {"T", r.T},
          {"seed", r.seed},
          {"static_feasible", r.static_feasible},
          {"adaptive_regret", r.adaptive_regret},
          {"static_regret", r.static_regret},
          {"adaptive_batches", r.adaptive_batches},
          {"static_batches", r.static_batches},
          {"adaptive_points", r.adaptive_points},
          {"static_points", r.static_points},
          {"adaptive_x_out", to_vector(r.adaptive_x_out)},
          {"static_x_out", to_vector(r.static_x_out)}};
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {
const char* kSweepHeader =
    "schema_version,T,runs,mean_regret,sd_regret,median_regret,mean_simple_regret,mean_batches,max_batches,"
    "retention_rate";
}

void write_sweep_csv(std::ostream& os, const SweepSummary& s) {
  os << kSweepHeader << '\n';
  for (const auto& r : s.rows) {
    os << kSchemaVersion << ',' << r.T << ',' << r.runs << ',' << format_double(r.mean_regret) << ','
       << format_double(r.sd_regret) << ',' << format_double(r.median_regret) << ','
       << format_double(r.mean_simple_regret) << ',' << format_double(r.mean_batches) << ',' << r.max_batches
       << ',' << format_double(r.retention_rate) << '\n';
  }
}

std::vector<SweepRow> read_sweep_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kSweepHeader) throw std::runtime_error("sweep csv: bad header");
  std::vector<SweepRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 10) throw std::runtime_error("sweep csv: wrong field count");
    auto num = [](const std::string& s) {
      double v = 0;
      const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
      if (res.ec != std::errc()) throw std::runtime_error("sweep csv: bad number '" + s + "'");
      return v;
    };
    SweepRow r;
    r.T = std::stoll(f[1]);
    r.runs = std::stoll(f[2]);
    r.mean_regret = num(f[3]);
    r.sd_regret = num(f[4]);
    r.median_regret = num(f[5]);
    r.mean_simple_regret = num(f[6]);
    r.mean_batches = num(f[7]);
    r.max_batches = std::stoi(f[8]);
    r.retention_rate = num(f[9]);
    rows.push_back(r);
  }
  return rows;
}

void write_pairs_csv(std::ostream& os, const std::vector<PairRow>& rows) {
  os << "schema_version,T,seed,static_feasible,adaptive_regret,static_regret,adaptive_batches,static_batches,"
        "same_x_out\n";
  for (const auto& r : rows) {
    const bool same = r.static_feasible && r.adaptive_x_out.size() == r.static_x_out.size() &&
                      r.adaptive_x_out == r.static_x_out;
    os << kSchemaVersion << ',' << r.T << ',' << r.seed << ',' << (r.static_feasible ? 1 : 0) << ','
       << format_double(r.adaptive_regret) << ',' << format_double(r.static_regret) << ',' << r.adaptive_batches
       << ',' << r.static_batches << ',' << (same ? 1 : 0) << '\n';
  }
}

}  // namespace geonarrow
