#pragma once

#include <stdexcept>
#include <vector>

namespace geonarrow {

class ScheduleInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rounded radius sequence and per-batch sample counts.
///
/// Radii are exact powers of two; `radius_exp[m]` holds e with r_bar = 2^-e.
/// Vectors are 0-based: index m holds batch m+1. All logarithms are natural.
struct RRSchedule {
  long long T = 0;
  int d = 0;
  double q = 0;
  double lambda = 0;
  int M = 0;  // batch pairs; r_bar has 2M entries (depth entries for the simple variant)
  double eta_hat = 0;
  std::vector<double> c_hat;
  std::vector<double> r_hat;
  std::vector<int> radius_exp;
  std::vector<double> r_bar;
  std::vector<long long> n;

  int size() const { return static_cast<int>(r_bar.size()); }
};

/// Deadlines fixed before any observation. tau[0] = 0 and tau[m] closes batch
/// m; s[m-1] is the 1-based RR index whose radius batch m uses.
struct StaticGrid {
  std::vector<long long> tau;
  std::vector<int> s;
  int M_s = 0;
  double B_const = 0;
  RRSchedule schedule;
};

/// ceil(16 ln T / (lambda^2 r^(2q))), at least 1.
long long samples_per_ball(long long T, double lambda, double q, double radius);

/// ceil(ln ln(T / ln T) / ln(1/eta_hat)), at least 1. Requires T >= 8.
int choose_M(long long T, int d, double q);

RRSchedule rr_schedule(long long T, int d, double q, double lambda);

/// Radii 2^-1, ..., 2^-depth with the same sample-count rule.
RRSchedule simple_schedule(long long T, double lambda, double q, int depth, int d = 1);

/// [3 + 2((lambda+L)/lambda)^(1/q)]_2, the per-batch retained-ball bound.
double retained_ball_bound(double lambda, double big_l, double q);

StaticGrid static_grid(long long T, int d, double q, double lambda, double big_l);

}  // namespace geonarrow
