#include "geonarrow/scheduler.hpp"

#include <cmath>

#include "geonarrow/metric.hpp"

namespace geonarrow {

namespace {

void require_horizon(long long T) {
  if (T < 8) throw std::invalid_argument("schedule: horizon must be at least 8");
}

void require_shape(int d, double q, double lambda) {
  if (d < 1) throw std::invalid_argument("schedule: dimension must be >= 1");
  if (!(q >= 1.0)) throw std::invalid_argument("schedule: q must be >= 1");
  if (!(lambda > 0.0)) throw std::invalid_argument("schedule: lambda must be positive");
}

}  // namespace

long long samples_per_ball(long long T, double lambda, double q, double radius) {
  const double n = 16.0 * std::log(static_cast<double>(T)) / (lambda * lambda * std::pow(radius, 2.0 * q));
  return std::max<long long>(1, static_cast<long long>(std::ceil(n)));
}

int choose_M(long long T, int d, double q) {
  require_horizon(T);
  const double t = static_cast<double>(T);
  const double eta = (q + d) / (2.0 * q + d);
  const double m_star = std::log(std::log(t / std::log(t))) / std::log(1.0 / eta);
  return std::max(1, static_cast<int>(std::ceil(m_star)));
}

RRSchedule rr_schedule(long long T, int d, double q, double lambda) {
  require_horizon(T);
  require_shape(d, q, lambda);
  const double t = static_cast<double>(T);

  RRSchedule s;
  s.T = T;
  s.d = d;
  s.q = q;
  s.lambda = lambda;
  s.M = choose_M(T, d, q);
  s.eta_hat = (q + d) / (2.0 * q + d);

  double c = std::log(t / std::log(t)) / (2.0 * (2.0 * q + d) * std::log(2.0));
  double partial = 0.0;
  for (int k = 0; k < s.M; ++k) {
    s.c_hat.push_back(c);
    partial += c;
    s.r_hat.push_back(std::exp2(-partial));
    const int lo = static_cast<int>(std::floor(partial));
    const int hi = static_cast<int>(std::ceil(partial));
    s.radius_exp.push_back(lo);
    s.radius_exp.push_back(hi);
    c *= s.eta_hat;
  }
  for (int e : s.radius_exp) {
    const double r = std::ldexp(1.0, -e);
    s.r_bar.push_back(r);
    s.n.push_back(samples_per_ball(T, lambda, q, r));
  }
  return s;
}

RRSchedule simple_schedule(long long T, double lambda, double q, int depth, int d) {
  if (depth < 1) throw std::invalid_argument("simple_schedule: depth must be >= 1");
  if (T < 2) throw std::invalid_argument("simple_schedule: horizon must be at least 2");
  require_shape(d, q, lambda);
  RRSchedule s;
  s.T = T;
  s.d = d;
  s.q = q;
  s.lambda = lambda;
  s.M = (depth + 1) / 2;
  s.eta_hat = (q + d) / (2.0 * q + d);
  for (int m = 1; m <= depth; ++m) {
    const double r = std::ldexp(1.0, -m);
    s.radius_exp.push_back(m);
    s.r_bar.push_back(r);
    s.n.push_back(samples_per_ball(T, lambda, q, r));
  }
  return s;
}

double retained_ball_bound(double lambda, double big_l, double q) {
  return round_pow2(3.0 + 2.0 * std::pow((lambda + big_l) / lambda, 1.0 / q));
}

StaticGrid static_grid(long long T, int d, double q, double lambda, double big_l) {
  if (!(big_l >= lambda)) throw std::invalid_argument("static_grid: L must be >= lambda");
  StaticGrid g;
  g.schedule = rr_schedule(T, d, q, lambda);
  g.B_const = retained_ball_bound(lambda, big_l, q);
  const auto& r = g.schedule.r_bar;
  const auto& n = g.schedule.n;
  const int count = g.schedule.size();
  const double b_pow = std::pow(g.B_const, d);

  const double first = std::pow(1.0 / (2.0 * r[0]), d) * b_pow * static_cast<double>(n[0]);
  const auto tau1 = static_cast<long long>(std::ceil(first));
  if (tau1 > T) throw ScheduleInfeasible("static_grid: horizon too small for the first batch");

  // walk the (tau, s) recursion over at most 2M batches, then truncate at T
  std::vector<long long> tau{0, tau1};
  std::vector<int> s{1};
  for (int m = 1; m < count; ++m) {
    const int cur = s.back();
    int next = 0;
    for (int k = m + 1; k <= count; ++k) {
      if (r[k - 1] <= r[cur - 1]) {
        next = k;
        break;
      }
    }
    if (next == 0) break;
    const double ratio = std::pow(r[cur - 1] / r[next - 1], d);
    const double inc = ratio * b_pow * static_cast<double>(n[next - 1]);
    s.push_back(next);
    tau.push_back(tau.back() + static_cast<long long>(std::ceil(inc)));
  }

  const int cap = 2 * g.schedule.M;
  int last = 0;
  for (int m = 1; m < static_cast<int>(tau.size()) && m <= cap; ++m) {
    if (tau[m] <= T) last = m;
  }
  g.M_s = last;
  g.tau.assign(tau.begin(), tau.begin() + last + 1);
  g.s.assign(s.begin(), s.begin() + last);
  return g;
}

}  // namespace geonarrow
