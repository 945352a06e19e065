#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "geonarrow/environment.hpp"
#include "geonarrow/metric.hpp"
#include "geonarrow/scheduler.hpp"

namespace geonarrow {

/// Raised when the static grid cannot fund the active set; only reachable
/// with misdeclared (lambda, L, q).
class InternalConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class GNVariant { adaptive, static_grid, simple_radii };

struct GNParams {
  double lambda = 1.0;
  double big_l = 1.0;
  double q = 1.0;
  GNVariant variant = GNVariant::adaptive;
  long long T = 0;
};

struct LSParams {
  double lambda = 1.0;
  double ell = 1.0;
};

/// One elimination batch.
struct BatchTrace {
  int index = 0;       // 1-based RR index that set the radius
  int radius_exp = 0;  // radius = 2^-radius_exp
  double radius = 0;
  long long pre = 0;   // |A_pre|
  long long kept = 0;  // |A|
  long long pulls = 0;
  long long surplus = 0;
  double retained_diameter = 0;
  bool optimum_retained = false;
};

struct RunRecord {
  std::uint64_t seed = 0;
  long long T = 0;
  std::string algorithm;
  std::string rng = Philox4x32::kAlgorithmId;
  int batches_used = 0;
  std::vector<long long> communication_points;
  double cum_regret = 0;
  double simple_regret = 0;
  PointD x_out;
  bool optimum_retained = true;  // in every elimination batch
  bool truncated = false;        // the last elimination batch ran out of budget
  std::vector<BatchTrace> elimination_trace;
  long long concentration_checks = 0;
  long long concentration_exceedances = 0;
};

/// Geometric Narrowing on an adaptive grid. The schedule may come from rr_schedule
/// or simple_schedule; params.variant only labels the record.
RunRecord run_gn(BatchedEnvironment& env, const GNParams& params, const RRSchedule& schedule);

/// Same narrowing on a predetermined grid; surplus pulls go to uniformly
/// drawn balls of the active set (stream 1 of the run seed).
RunRecord run_gn_static(BatchedEnvironment& env, const GNParams& params, const StaticGrid& grid);

/// Rank-based retention: keep the [(9 ell + 2 lambda)/lambda]_2^d lowest
/// estimates. The schedule must be built with q = 1.
RunRecord run_gn_prime(BatchedEnvironment& env, const LSParams& ls, const RRSchedule& schedule);

/// Round robin over a fixed cover, one communication point at T.
RunRecord run_uniform_baseline(BatchedEnvironment& env, double cover_radius);

/// (2 + ((lambda+L)/lambda)^(1/q)) * radius.
double retention_threshold(double lambda, double big_l, double q, double radius);

/// [(9 ell + 2 lambda)/lambda]_2^d.
long long gn_prime_cap(const LSParams& ls, int d);

struct CoveringReport {
  long long N = 0;          // lattice cover with cells of side 2 delta
  long long packing = 0;    // greedy set of level-set points pairwise > 2 delta apart
  double lower_bound = 0;   // [eps / (delta ell)]_2^d
  double upper_bound = 0;   // [(2 eps + delta ell) / (delta lambda)]_2^d
  bool pass = false;
};

/// Level set {f <= f* + eps} sampled on a grid; N is an upper estimate of the
/// delta-covering number and `packing` a lower one.
CoveringReport check_ls_covering(const InstanceD& f, double lambda, double ell, double eps, double delta,
                                 int grid_per_axis = 0);

}  // namespace geonarrow
