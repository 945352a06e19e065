#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include <Eigen/Dense>

#include "geonarrow/harness.hpp"
#include "geonarrow/scheduler.hpp"

namespace geonarrow {

using nlohmann::json;

InstanceD build_instance(const InstanceConfig& c) {
  if (c.name == "piecewise") {
    if (c.d != 1) throw UsageError("instance 'piecewise' is one-dimensional");
    return make_piecewise_interval_instance<double>();
  }
  if (c.name == "power") {
    PointD x = PointD::Constant(c.d, 0.3);
    for (std::size_t i = 0; i < c.x_star.size(); ++i) x(static_cast<Eigen::Index>(i)) = c.x_star[i];
    try {
      return make_power_instance(DomainD::unit(c.d), x, c.q, c.scale);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  throw UsageError("unknown instance '" + c.name + "'");
}

NoiseSpec build_noise(const ExperimentConfig& c) {
  return c.noise == "none" ? NoiseSpec::noiseless() : NoiseSpec::gaussian(c.noise_std);
}

namespace {

GNParams declared(const ExperimentConfig& c, const InstanceD& inst, long long T) {
  GNParams p;
  p.lambda = c.lambda.value_or(inst.lambda);
  p.big_l = c.big_l.value_or(inst.big_l);
  p.q = c.q.value_or(inst.q);
  p.T = T;
  return p;
}

}  // namespace

RunRecord run_cell(const ExperimentConfig& c, long long T, std::uint64_t seed) {
  const InstanceD inst = build_instance(c.instance);
  BatchedEnvironment env(inst, build_noise(c), T, seed);
  const int d = inst.domain.dim();
  GNParams p = declared(c, inst, T);
  if (c.algorithm == "gn") {
    return run_gn(env, p, rr_schedule(T, d, p.q, p.lambda));
  }
  if (c.algorithm == "gn-simple") {
    p.variant = GNVariant::simple_radii;
    const int depth = c.simple_depth > 0 ? c.simple_depth : 2 * choose_M(T, d, p.q);
    return run_gn(env, p, simple_schedule(T, p.lambda, p.q, depth, d));
  }
  if (c.algorithm == "gn-static") {
    p.variant = GNVariant::static_grid;
    return run_gn_static(env, p, static_grid(T, d, p.q, p.lambda, p.big_l));
  }
  if (c.algorithm == "gn-prime") {
    const LSParams ls{p.lambda, c.ell};
    return run_gn_prime(env, ls, rr_schedule(T, d, 1.0, ls.lambda));
  }
  if (c.algorithm == "uniform") return run_uniform_baseline(env, c.cover_radius);
  throw UsageError("unknown algorithm '" + c.algorithm + "'");
}

namespace {

/// Runs job(i) for i in [0, n) on a fixed pool; the first exception wins.
template <typename Job>
void parallel_for(std::size_t n, int workers, Job job) {
  const auto w = static_cast<std::size_t>(std::max(1, workers));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        job(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  if (w == 1 || n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(w, n); ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::vector<RunRecord> run_all(const ExperimentConfig& c, int workers) {
  const std::size_t ns = c.seeds.size();
  std::vector<RunRecord> out(c.T.size() * ns);
  parallel_for(out.size(), workers, [&](std::size_t i) { out[i] = run_cell(c, c.T[i / ns], c.seeds[i % ns]); });
  return out;
}

std::uint64_t seed_offset_from_env() {
  const char* v = std::getenv(kSeedOffsetEnv);
  if (v == nullptr || *v == '\0') return 0;
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v, &end, 10);
  if (*end != '\0') throw UsageError(std::string(kSeedOffsetEnv) + " must be a nonnegative integer");
  return x;
}

void apply_seed_offset(ExperimentConfig& c, std::uint64_t offset) {
  for (auto& s : c.seeds) s += offset;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<Eigen::Index>(x.size());
  if (n < 3 || y.size() != x.size()) throw std::invalid_argument("fit_line: need at least three points");
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = x[static_cast<std::size_t>(i)];
    b(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector2d beta = A.colPivHouseholderQr().solve(b);
  const Eigen::VectorXd resid = b - A * beta;
  const double sigma2 = resid.squaredNorm() / static_cast<double>(n - 2);
  const Eigen::Matrix2d cov = sigma2 * (A.transpose() * A).inverse();
  return {beta(1), std::sqrt(cov(1, 1)), beta(0)};
}

SweepSummary summarize(const std::string& algorithm, const std::vector<RunRecord>& records) {
  std::map<long long, std::vector<const RunRecord*>> by_t;
  for (const auto& r : records) by_t[r.T].push_back(&r);
  if (by_t.size() < 3) throw UsageError("sweep: need at least three distinct T values");

  SweepSummary s;
  s.algorithm = algorithm;
  std::vector<double> lx, ly;
  for (const auto& [T, rs] : by_t) {
    SweepRow row;
    row.T = T;
    row.runs = static_cast<long long>(rs.size());
    std::vector<double> reg;
    for (const auto* r : rs) {
      reg.push_back(r->cum_regret);
      row.mean_simple_regret += r->simple_regret;
      row.mean_batches += r->batches_used;
      row.max_batches = std::max(row.max_batches, r->batches_used);
      row.retention_rate += r->optimum_retained ? 1.0 : 0.0;
    }
    const double n = static_cast<double>(rs.size());
    for (double v : reg) row.mean_regret += v;
    row.mean_regret /= n;
    for (double v : reg) row.sd_regret += (v - row.mean_regret) * (v - row.mean_regret);
    row.sd_regret = rs.size() > 1 ? std::sqrt(row.sd_regret / (n - 1.0)) : 0.0;
    std::sort(reg.begin(), reg.end());
    row.median_regret = reg.size() % 2 ? reg[reg.size() / 2] : 0.5 * (reg[reg.size() / 2 - 1] + reg[reg.size() / 2]);
    row.mean_simple_regret /= n;
    row.mean_batches /= n;
    row.retention_rate /= n;
    s.rows.push_back(row);
    lx.push_back(std::log(static_cast<double>(T)));
    ly.push_back(std::log(row.mean_regret));
  }
  const LineFit fit = fit_line(lx, ly);
  s.slope = fit.slope;
  s.slope_se = fit.slope_se;
  s.intercept = fit.intercept;
  return s;
}

std::vector<PairRow> compare_static(const ExperimentConfig& c, int workers) {
  const std::size_t ns = c.seeds.size();
  std::vector<PairRow> rows(c.T.size() * ns);
  ExperimentConfig adaptive = c;
  adaptive.algorithm = "gn";
  ExperimentConfig fixed = c;
  fixed.algorithm = "gn-static";
  parallel_for(rows.size(), workers, [&](std::size_t i) {
    PairRow& row = rows[i];
    row.T = c.T[i / ns];
    row.seed = c.seeds[i % ns];
    const RunRecord a = run_cell(adaptive, row.T, row.seed);
    row.adaptive_regret = a.cum_regret;
    row.adaptive_batches = a.batches_used;
    row.adaptive_points = a.communication_points;
    row.adaptive_x_out = a.x_out;
    try {
      const RunRecord s = run_cell(fixed, row.T, row.seed);
      row.static_regret = s.cum_regret;
      row.static_batches = s.batches_used;
      row.static_points = s.communication_points;
      row.static_x_out = s.x_out;
    } catch (const ScheduleInfeasible&) {
      row.static_feasible = false;
    }
  });
  return rows;
}

PropertyReport check_baseline_floor(const ReferenceGrid& g, int j, int k, int l, double cover_radius,
                                    long long horizon, std::uint64_t seed) {
  const auto f = make_f_jkl(g, j, k, l);
  double R = 0.0;
  for (int i = 1; i <= g.M; ++i) R = std::max(R, 5.0 * g.eps(i));
  const InstanceD inst = make_lowerbound_instance(f, R, std::pow(9.0, -g.q), std::pow(std::pow(3.0, g.q) + 1.0, 2.0));
  BatchedEnvironment env(inst, NoiseSpec::gaussian(1.0), horizon, seed, true);
  run_uniform_baseline(env, cover_radius * R);

  const double s = std::pow(2.0, 1.0 / g.q);
  const BallD sl = s_region(l, s * g.eps(j), g.d);
  const double floor_val = g.eps_pow_q(j) / std::pow(3.0, g.q);
  PropertyReport rep;
  rep.property = "uniform_baseline.regret_floor";
  rep.indices = {j, k, l};
  rep.min_ratio = std::numeric_limits<double>::infinity();
  rep.max_ratio = -std::numeric_limits<double>::infinity();
  rep.pass = true;
  for (const auto& run : env.pull_log()) {
    if (distance(run.x, sl.center) <= sl.radius) continue;
    const double ratio = env.audit_gap(run.x) / floor_val;
    rep.min_ratio = std::min(rep.min_ratio, ratio);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    rep.points += run.count;
    if (ratio < 1.0 - 1e-9) rep.pass = false;
  }
  if (rep.points == 0) rep.pass = false;
  return rep;
}

namespace {

json report_json(const PropertyReport& r, const json& params) {
  return {{"property", r.property}, {"indices", r.indices}, {"params", params},   {"min_ratio", r.min_ratio},
          {"max_ratio", r.max_ratio}, {"points", r.points},  {"pass", r.pass}};
}

void add(VerifyResult& out, const PropertyReport& r, const json& params) {
  out.report["reports"].push_back(report_json(r, params));
  if (!r.pass) out.pass = false;
}

void verify_instances(VerifyResult& out) {
  std::vector<InstanceD> shipped;
  for (int d = 1; d <= 2; ++d) {
    for (double q : {1.0, 2.0}) shipped.push_back(make_power_instance(DomainD::unit(d), PointD(PointD::Constant(d, 0.3)), q, 1.0));
  }
  shipped.push_back(make_power_instance(DomainD::unit(1), PointD(PointD::Constant(1, 0.4)), 1.0, 1.0));
  shipped.push_back(make_piecewise_interval_instance<double>());
  for (const auto& inst : shipped) {
    const auto a = audit_nondegeneracy(inst, default_audit_resolution(inst.domain.dim()));
    PropertyReport r;
    r.property = "instance.audit";
    r.min_ratio = a.lambda_hat;
    r.max_ratio = a.big_l_hat;
    r.points = static_cast<long long>(a.points);
    r.pass = a.pass;
    add(out, r, {{"name", inst.name}, {"d", inst.domain.dim()}, {"q", inst.q}});
  }
}

void verify_lowerbound(VerifyResult& out, const LowerBoundSuite& suite, const VerifyOptions& opt) {
  for (int d : suite.d) {
    for (double q : suite.q) {
      for (int M : suite.M) {
        for (long long T : suite.T) {
          const ReferenceGrid g = reference_grid(T, M, d, q);
          const json params{{"d", d}, {"q", q}, {"M", M}, {"T", T}};
          for (auto fam : {LowerBoundFamily::f_jk, LowerBoundFamily::f_jkl}) {
            for (const auto& r : check_prop_nondegen(fam, g, opt)) add(out, r, params);
          }
          for (const auto& r : check_gap_props(g, opt)) add(out, r, params);
        }
      }
      // the f_k_eps family does not depend on M
      for (long long T : suite.T) {
        const ReferenceGrid g = reference_grid(T, 1, d, q);
        const json params{{"d", d}, {"q", q}, {"T", T}};
        for (const auto& r : check_prop_nondegen(LowerBoundFamily::f_k_eps, g, opt)) add(out, r, params);
        for (const auto& r : check_orthant_gap(T, d, q, opt)) add(out, r, params);
      }
    }
  }
}

void verify_ls(VerifyResult& out) {
  struct Case {
    InstanceD f;
    double lambda, ell, eps, delta;
  };
  const std::vector<Case> cases{
      {make_power_instance(DomainD::cube(1, -1.0, 1.0), PointD(PointD::Zero(1)), 1.0, 1.0), 1.0, 1.0, 0.5, 0.25},
      {make_power_instance(DomainD::cube(2, -1.0, 1.0), PointD(PointD::Zero(2)), 1.0, 1.0), 1.0, 1.0, 0.5, 0.25},
  };
  for (const auto& c : cases) {
    const auto rep = check_ls_covering(c.f, c.lambda, c.ell, c.eps, c.delta);
    PropertyReport r;
    r.property = "level_set.covering";
    r.min_ratio = static_cast<double>(rep.packing) / rep.lower_bound;
    r.max_ratio = static_cast<double>(rep.N) / rep.upper_bound;
    r.points = rep.N;
    r.pass = rep.pass;
    add(out, r,
        {{"d", c.f.domain.dim()}, {"eps", c.eps}, {"delta", c.delta}, {"N", rep.N}, {"packing", rep.packing},
         {"lower_bound", rep.lower_bound}, {"upper_bound", rep.upper_bound}});
  }
}

}  // namespace

VerifyResult run_verify(const std::string& scope, const LowerBoundSuite& suite, const VerifyOptions& opt) {
  if (scope != "instances" && scope != "lowerbound" && scope != "ls" && scope != "all") {
    throw UsageError("verify: scope must be instances, lowerbound, ls or all");
  }
  VerifyResult out;
  out.report = {{"schema_version", kSchemaVersion}, {"kind", "verify"}, {"scope", scope}, {"reports", json::array()}};
  if (scope == "instances" || scope == "all") verify_instances(out);
  if (scope == "lowerbound" || scope == "all") verify_lowerbound(out, suite, opt);
  if (scope == "ls" || scope == "all") verify_ls(out);
  out.report["pass"] = out.pass;
  return out;
}

}  // namespace geonarrow
