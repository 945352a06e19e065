#include "geonarrow/gn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace geonarrow {

namespace {

struct Estimate {
  double mean = 0;
  long long count = 0;
};

/// Index of the smallest estimate; ties go to the lexicographically lowest
/// center. Balls without pulls are ignored.
std::size_t argmin_estimate(const std::vector<BallD>& balls, const std::vector<Estimate>& est) {
  std::size_t best = balls.size();
  for (std::size_t i = 0; i < balls.size(); ++i) {
    if (est[i].count == 0) continue;
    if (best == balls.size() || est[i].mean < est[best].mean ||
        (est[i].mean == est[best].mean && detail::lex_less(balls[i].center, balls[best].center))) {
      best = i;
    }
  }
  return best;
}

std::vector<BallD> refine_all(const DomainD& dom, const std::vector<BallD>& balls, double r_child) {
  std::vector<BallD> out;
  for (const auto& b : balls) {
    auto kids = refine_ball(dom, b, r_child);
    std::move(kids.begin(), kids.end(), std::back_inserter(out));
  }
  return out;
}

double union_diameter(const DomainD& dom, const std::vector<BallD>& balls) {
  if (balls.empty()) return 0.0;
  PointD lo, hi, l2, h2;
  dom.clip(balls.front(), lo, hi);
  for (const auto& b : balls) {
    dom.clip(b, l2, h2);
    lo = lo.cwiseMin(l2);
    hi = hi.cwiseMax(h2);
  }
  return (hi - lo).maxCoeff();
}

bool covers(const DomainD& dom, const std::vector<BallD>& balls, const PointD& x) {
  return std::any_of(balls.begin(), balls.end(), [&](const BallD& b) { return dom.contains(b, x); });
}

/// Shared state of one elimination run.
class Narrowing {
 public:
  Narrowing(BatchedEnvironment& env, std::string algorithm) : env_(env) {
    if (env_.pulled() != 0) throw std::invalid_argument("run: environment must be fresh");
    rec_.seed = env_.seed();
    rec_.T = env_.horizon();
    rec_.algorithm = std::move(algorithm);
  }

  /// Pull every ball `counts[i]` times at its center, release the batch and
  /// return per-ball means. Stops early when the budget runs out.
  std::vector<Estimate> play(const std::vector<BallD>& balls, const std::vector<long long>& counts) {
    std::vector<Estimate> est(balls.size());
    for (std::size_t i = 0; i < balls.size(); ++i) {
      const long long c = std::min(counts[i], env_.remaining_budget());
      for (long long t = 0; t < c; ++t) env_.pull(balls[i].center);
      est[i].count = c;
    }
    const Batch batch = env_.flush();
    const auto& y = batch.values();
    std::size_t pos = 0;
    for (auto& e : est) {
      double s = 0.0;
      for (long long t = 0; t < e.count; ++t) s += y[pos++];
      if (e.count > 0) e.mean = s / static_cast<double>(e.count);
    }
    return est;
  }

  /// Records the concentration diagnostic for balls that got `n` pulls.
  void audit_concentration(const std::vector<BallD>& balls, const std::vector<Estimate>& est, long long n) {
    const double width = std::sqrt(4.0 * std::log(static_cast<double>(env_.horizon())) / static_cast<double>(n));
    for (std::size_t i = 0; i < balls.size(); ++i) {
      if (est[i].count != n) continue;
      ++rec_.concentration_checks;
      if (std::abs(est[i].mean - env_.audit_value(balls[i].center)) > width) ++rec_.concentration_exceedances;
    }
  }

  void trace(BatchTrace t, const std::vector<BallD>& kept) {
    t.kept = static_cast<long long>(kept.size());
    t.retained_diameter = union_diameter(env_.domain(), kept);
    t.optimum_retained = covers(env_.domain(), kept, env_.audit_minimizer());
    if (!t.optimum_retained) rec_.optimum_retained = false;
    rec_.elimination_trace.push_back(t);
  }

  /// Spends the rest of the budget at `x` and closes the record.
  RunRecord finish(const PointD& x) {
    while (env_.remaining_budget() > 0) env_.pull(x);
    env_.flush();
    rec_.x_out = x;
    rec_.cum_regret = env_.cumulative_regret();
    rec_.simple_regret = env_.audit_gap(x);
    rec_.communication_points = env_.communication_points();
    rec_.batches_used = static_cast<int>(rec_.communication_points.size());
    return rec_;
  }

  RunRecord& record() { return rec_; }
  BatchedEnvironment& env() { return env_; }

 private:
  BatchedEnvironment& env_;
  RunRecord rec_;
};

using RetentionRule =
    std::function<std::vector<BallD>(const std::vector<BallD>&, const std::vector<Estimate>&, std::size_t, double)>;

/// Line-5 skip, or a radius above the one already held (see run_gn).
bool playable(const RRSchedule& s, int m, int held_exp) {
  const int S = s.size();
  if (m < S && s.r_bar[m] > s.r_bar[m - 1]) return false;
  return s.radius_exp[m - 1] >= held_exp;
}

RunRecord run_adaptive(BatchedEnvironment& env, const RRSchedule& s, const RetentionRule& retain,
                       std::string algorithm) {
  if (s.T != env.horizon()) throw std::invalid_argument("run: schedule and environment horizons differ");
  if (s.d != env.domain().dim()) throw std::invalid_argument("run: schedule dimension differs from the domain");
  Narrowing run(env, std::move(algorithm));
  const DomainD& dom = env.domain();
  const int S = s.size();

  int held_exp = s.radius_exp[0];
  std::vector<BallD> balls = initial_cover(dom, s.r_bar[0]);
  PointD best = balls.front().center;

  int m = 1;
  while (m <= S && !playable(s, m, held_exp)) ++m;
  while (m <= S) {
    if (s.radius_exp[m - 1] > held_exp) {
      balls = refine_all(dom, balls, s.r_bar[m - 1]);
      held_exp = s.radius_exp[m - 1];
    }
    const long long n = s.n[m - 1];
    const std::vector<long long> counts(balls.size(), n);
    const bool full = env.remaining_budget() >= static_cast<long long>(balls.size()) * n;
    const auto est = run.play(balls, counts);
    const std::size_t imin = argmin_estimate(balls, est);
    best = balls[imin].center;

    BatchTrace t;
    t.index = m;
    t.radius_exp = held_exp;
    t.radius = s.r_bar[m - 1];
    t.pre = static_cast<long long>(balls.size());
    t.pulls = std::accumulate(est.begin(), est.end(), 0LL, [](long long a, const Estimate& e) { return a + e.count; });
    if (!full) {
      run.record().truncated = true;
      t.kept = t.pre;
      run.record().elimination_trace.push_back(t);
      break;
    }
    run.audit_concentration(balls, est, n);
    std::vector<BallD> kept = retain(balls, est, imin, s.r_bar[m - 1]);
    run.trace(t, kept);

    int next = m + 1;
    const int child_exp = m < S ? s.radius_exp[m] : held_exp;
    while (next <= S && !playable(s, next, child_exp)) ++next;
    if (next > S) break;
    const int target_exp = s.radius_exp[next - 1];
    balls = refine_all(dom, kept, s.r_bar[next - 1]);
    held_exp = target_exp;
    const long long projected = static_cast<long long>(balls.size()) * s.n[next - 1];
    if (env.pulled() + projected >= env.horizon()) break;
    m = next;
  }
  return run.finish(best);
}

}  // namespace

double retention_threshold(double lambda, double big_l, double q, double radius) {
  return (2.0 + std::pow((lambda + big_l) / lambda, 1.0 / q)) * radius;
}

long long gn_prime_cap(const LSParams& ls, int d) {
  if (!(ls.lambda > 0.0) || !(ls.ell > 0.0)) throw std::invalid_argument("LSParams: lambda and ell must be positive");
  return static_cast<long long>(std::pow(round_pow2((9.0 * ls.ell + 2.0 * ls.lambda) / ls.lambda), d));
}

RunRecord run_gn(BatchedEnvironment& env, const GNParams& p, const RRSchedule& schedule) {
  if (!(p.lambda > 0.0) || !(p.big_l >= p.lambda) || !(p.q >= 1.0)) {
    throw std::invalid_argument("GNParams: need L >= lambda > 0 and q >= 1");
  }
  if (p.T != 0 && p.T != env.horizon()) throw std::invalid_argument("run_gn: params and environment horizons differ");
  const DomainD& dom = env.domain();
  auto rule = [&](const std::vector<BallD>& balls, const std::vector<Estimate>&, std::size_t imin, double r) {
    const double thr = retention_threshold(p.lambda, p.big_l, p.q, r);
    std::vector<BallD> kept;
    for (const auto& b : balls) {
      if (set_diameter(dom, b, balls[imin]) <= thr) kept.push_back(b);
    }
    return kept;
  };
  const char* name = p.variant == GNVariant::simple_radii ? "gn-simple" : "gn";
  return run_adaptive(env, schedule, rule, name);
}

RunRecord run_gn_prime(BatchedEnvironment& env, const LSParams& ls, const RRSchedule& schedule) {
  if (schedule.q != 1.0) throw std::invalid_argument("run_gn_prime: schedule must be built with q = 1");
  const long long cap = gn_prime_cap(ls, env.domain().dim());
  auto rule = [cap](const std::vector<BallD>& balls, const std::vector<Estimate>& est, std::size_t, double) {
    std::vector<std::size_t> order(balls.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (est[a].mean != est[b].mean) return est[a].mean < est[b].mean;
      return detail::lex_less(balls[a].center, balls[b].center);
    });
    const std::size_t keep = std::min<std::size_t>(order.size(), static_cast<std::size_t>(cap));
    std::sort(order.begin(), order.begin() + static_cast<long>(keep));
    std::vector<BallD> kept;
    for (std::size_t i = 0; i < keep; ++i) kept.push_back(balls[order[i]]);
    return kept;
  };
  return run_adaptive(env, schedule, rule, "gn-prime");
}

RunRecord run_gn_static(BatchedEnvironment& env, const GNParams& p, const StaticGrid& grid) {
  const RRSchedule& s = grid.schedule;
  if (s.T != env.horizon()) throw std::invalid_argument("run_gn_static: grid and environment horizons differ");
  if (s.d != env.domain().dim()) throw std::invalid_argument("run_gn_static: grid dimension differs from the domain");
  Narrowing run(env, "gn-static");
  const DomainD& dom = env.domain();
  RandomStream surplus_rng(env.seed(), 1);

  std::vector<BallD> balls = initial_cover(dom, s.r_bar[0]);
  int held_exp = s.radius_exp[0];
  PointD best = balls.front().center;
  for (int m = 1; m <= grid.M_s; ++m) {
    const int idx = grid.s[m - 1];
    if (s.radius_exp[idx - 1] != held_exp) {
      balls = refine_all(dom, balls, s.r_bar[idx - 1]);
      held_exp = s.radius_exp[idx - 1];
    }
    const long long n = s.n[idx - 1];
    const long long quota = grid.tau[m] - grid.tau[m - 1];
    const long long surplus = quota - static_cast<long long>(balls.size()) * n;
    if (surplus < 0) {
      throw InternalConsistencyError("run_gn_static: active set exceeds the static allowance; declared parameters are wrong");
    }
    std::vector<long long> counts(balls.size(), n);
    for (long long e = 0; e < surplus; ++e) ++counts[surplus_rng.below(balls.size())];
    const auto est = run.play(balls, counts);
    const std::size_t imin = argmin_estimate(balls, est);
    best = balls[imin].center;
    run.audit_concentration(balls, est, n);

    const double thr = retention_threshold(p.lambda, p.big_l, p.q, s.r_bar[idx - 1]);
    std::vector<BallD> kept;
    for (const auto& b : balls) {
      if (set_diameter(dom, b, balls[imin]) <= thr) kept.push_back(b);
    }
    BatchTrace t;
    t.index = idx;
    t.radius_exp = held_exp;
    t.radius = s.r_bar[idx - 1];
    t.pre = static_cast<long long>(balls.size());
    t.pulls = quota;
    t.surplus = surplus;
    run.trace(t, kept);
    balls = std::move(kept);
  }
  return run.finish(best);
}

RunRecord run_uniform_baseline(BatchedEnvironment& env, double cover_radius) {
  Narrowing run(env, "uniform");
  const auto balls = initial_cover(env.domain(), cover_radius);
  const long long T = env.horizon();
  const auto k = static_cast<long long>(balls.size());
  std::vector<long long> counts(balls.size(), T / k);
  for (long long i = 0; i < T % k; ++i) ++counts[i];
  // round robin order: the batch is released once, so pull order only
  // affects the log, not any decision
  std::vector<double> sums(balls.size(), 0.0);
  for (long long t = 0; t < T; ++t) env.pull(balls[t % k].center);
  const Batch batch = env.flush();
  const auto& y = batch.values();
  for (std::size_t i = 0; i < y.size(); ++i) sums[i % balls.size()] += y[i];
  std::vector<Estimate> est(balls.size());
  for (std::size_t i = 0; i < balls.size(); ++i) {
    est[i].count = counts[i];
    if (counts[i] > 0) est[i].mean = sums[i] / static_cast<double>(counts[i]);
  }
  const std::size_t imin = argmin_estimate(balls, est);
  return run.finish(balls[imin].center);
}

CoveringReport check_ls_covering(const InstanceD& f, double lambda, double ell, double eps, double delta,
                                 int grid_per_axis) {
  if (!(eps > 0.0) || !(delta > 0.0)) throw std::invalid_argument("check_ls_covering: eps and delta must be positive");
  const int d = f.domain.dim();
  const int n = grid_per_axis > 0 ? grid_per_axis : (d == 1 ? 4001 : 201);
  const double f_star = f.optimum();
  std::vector<PointD> level;
  for (auto& x : grid_points(f.domain, n)) {
    if (f.eval(x) <= f_star + eps * (1.0 + 1e-12)) level.push_back(std::move(x));
  }
  if (level.empty()) throw std::invalid_argument("check_ls_covering: empty level set");

  CoveringReport rep;
  PointD lo = level.front(), hi = level.front();
  for (const auto& x : level) {
    lo = lo.cwiseMin(x);
    hi = hi.cwiseMax(x);
  }
  std::vector<long> cells(d);
  for (int i = 0; i < d; ++i) {
    cells[i] = std::max(1L, static_cast<long>(std::ceil((hi(i) - lo(i)) / (2.0 * delta) - 1e-12)));
  }
  std::vector<std::vector<long>> occupied;
  for (const auto& x : level) {
    std::vector<long> c(d);
    for (int i = 0; i < d; ++i) {
      c[i] = std::min(cells[i] - 1, static_cast<long>(std::floor((x(i) - lo(i)) / (2.0 * delta))));
    }
    occupied.push_back(std::move(c));
  }
  std::sort(occupied.begin(), occupied.end());
  rep.N = std::unique(occupied.begin(), occupied.end()) - occupied.begin();

  std::vector<PointD> pack;
  for (const auto& x : level) {
    bool far = std::all_of(pack.begin(), pack.end(), [&](const PointD& p) { return distance(x, p) > 2.0 * delta; });
    if (far) pack.push_back(x);
  }
  rep.packing = static_cast<long long>(pack.size());
  rep.lower_bound = std::pow(round_pow2(eps / (delta * ell)), d);
  rep.upper_bound = std::pow(round_pow2((2.0 * eps + delta * ell) / (delta * lambda)), d);
  rep.pass = static_cast<double>(rep.packing) >= rep.lower_bound && static_cast<double>(rep.N) <= rep.upper_bound;
  return rep;
}

}  // namespace geonarrow
