#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "geonarrow/instances.hpp"
#include "geonarrow/metric.hpp"

namespace geonarrow {

/// Reference communication points T_j and gaps eps_j^q, j = 1..M (0-based
/// storage).
struct ReferenceGrid {
  int M = 0;
  long long T = 0;
  int d = 0;
  double q = 0;
  std::vector<long long> T_j;
  std::vector<double> eps_j_pow_q;

  double eps(int j) const { return std::pow(eps_j_pow_q.at(j - 1), 1.0 / q); }
  double eps_pow_q(int j) const { return eps_j_pow_q.at(j - 1); }
};

ReferenceGrid reference_grid(long long T, int M, int d, double q);

/// eps with eps^q = sqrt(2(2^d - 1)) / (2^q + 2) / sqrt(T).
double theorem2_epsilon(long long T, int d, double q);

inline int orthant_count(int d) { return 1 << d; }

/// Sign of axis i for orthant k: bit i of k-1, 0 -> +1, 1 -> -1.
inline int corner_sign(int k, int axis) { return ((k - 1) >> axis) & 1 ? -1 : 1; }

/// x*_{k,eps}: coordinates s_i^k * eps.
template <typename Scalar>
Point<Scalar> corner_point(int k, Scalar eps, int d) {
  if (d < 1 || k < 1 || k > orthant_count(d)) throw std::invalid_argument("corner_point: index out of range");
  Point<Scalar> p(d);
  for (int i = 0; i < d; ++i) p(i) = corner_sign(k, i) * eps;
  return p;
}

/// 1-based orthant index of x; a zero coordinate counts as positive.
template <typename Scalar>
int orthant_of(const Point<Scalar>& x) {
  int k = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i) < Scalar(0)) k |= 1 << i;
  }
  return k + 1;
}

/// Closed outer ball minus the closed origin ball of radius `inner`.
template <typename Scalar>
struct BittenRegion {
  Point<Scalar> center;
  Scalar outer{};
  Scalar inner{};

  bool contains(const Point<Scalar>& x) const {
    return distance(x, center) <= outer && norm_inf(x) > inner;
  }
};

/// ||x||^q except on a list of bitten regions, where the value is
/// ||x - c||^q - ||c||^q. The first matching region wins.
template <typename Scalar>
class BittenFunction {
 public:
  BittenFunction(int d, Scalar q, std::vector<BittenRegion<Scalar>> regions, std::string label = {})
      : d_(d), q_(q), regions_(std::move(regions)), label_(std::move(label)) {
    for (const auto& r : regions_) detail::require_same_dim(r.center.size(), d_);
    Point<Scalar> best = Point<Scalar>::Zero(d_);
    Scalar best_val = (*this)(best);
    for (const auto& r : regions_) {
      const Scalar v = (*this)(r.center);
      if (v < best_val) {
        best_val = v;
        best = r.center;
      }
    }
    minimizer_ = best;
    min_value_ = best_val;
  }

  Scalar operator()(const Point<Scalar>& x) const {
    for (const auto& r : regions_) {
      if (r.contains(x)) return std::pow(distance(x, r.center), q_) - std::pow(norm_inf(r.center), q_);
    }
    return std::pow(norm_inf(x), q_);
  }

  int dim() const { return d_; }
  Scalar q() const { return q_; }
  const std::vector<BittenRegion<Scalar>>& regions() const { return regions_; }
  const Point<Scalar>& minimizer() const { return minimizer_; }
  Scalar min_value() const { return min_value_; }
  const std::string& label() const { return label_; }

 private:
  int d_;
  Scalar q_;
  std::vector<BittenRegion<Scalar>> regions_;
  std::string label_;
  Point<Scalar> minimizer_;
  Scalar min_value_{};
};

using BittenFunctionD = BittenFunction<double>;

/// f_{j,k}; for j = M the k-independent f_{M,k}.
BittenFunctionD make_f_jk(const ReferenceGrid& g, int j, int k);

/// f_{j,k,l} with all of its special cases.
BittenFunctionD make_f_jkl(const ReferenceGrid& g, int j, int k, int l);

/// f_k^eps; k = 1 is the plain ||x||^q with minimizer at the origin.
BittenFunctionD make_f_k_eps(int k, double eps, double q, int d);

inline double f_jk(const ReferenceGrid& g, int j, int k, const PointD& x) { return make_f_jk(g, j, k)(x); }
inline double f_jkl(const ReferenceGrid& g, int j, int k, int l, const PointD& x) {
  return make_f_jkl(g, j, k, l)(x);
}
inline double f_k_eps(int k, double eps, double q, const PointD& x) {
  return make_f_k_eps(k, eps, q, static_cast<int>(x.size()))(x);
}

/// S_k^eps = closed ball around x*_{k,eps} of radius eps.
BallD s_region(int k, double eps, int d);

/// U_1 = O_1 plus the origin ball of radius eps/2; U_k = O_k minus it.
bool in_u_region(int k, double eps, const PointD& x);

/// One verified property over one index tuple.
struct PropertyReport {
  std::string property;
  std::vector<int> indices;
  double min_ratio = 0;
  double max_ratio = 0;
  long long points = 0;
  bool pass = false;
};

struct VerifyOptions {
  int grid_per_axis = 0;      // 0: 401 for d <= 2, 61 otherwise
  int region_samples = 10000; // quasi-random points per bitten region
  double box_scale = 5.0;     // audit box half-width in units of the largest eps
  double slack = 1e-9;        // relative
};

/// Audit points: a regular grid over [-R, R]^d plus Halton points inside
/// every bitten region of the supplied functions.
std::vector<PointD> lowerbound_audit_points(int d, double R, const std::vector<const BittenFunctionD*>& fs,
                                            const VerifyOptions& opt);

/// Ratio (f(x) - min f) / ||x - x_min||^q must lie in [c_low, c_high]. Points
/// within slack * (audit reach) of the minimizer only need a gap below slack.
PropertyReport check_nondegenerate(const BittenFunctionD& f, const std::vector<PointD>& pts, double c_low,
                                   double c_high, double slack, std::string property, std::vector<int> indices);

enum class LowerBoundFamily { f_jk, f_jkl, f_k_eps };

/// Two-sided growth around the minimizer for every member of a family.
/// Constants: f_jk 9^-q and (2^q+1)^2; f_jkl 9^-q and (3^q+1)^2; f_k_eps
/// 2^(1-q) and 3^(q+1), with eps from theorem2_epsilon(T, d, q).
std::vector<PropertyReport> check_prop_nondegen(LowerBoundFamily family, const ReferenceGrid& g,
                                                const VerifyOptions& opt = {});

/// |f_jk - f_Mk| <= (2^q+2) eps_j^q on the bitten region of f_jk and 0 off it;
/// |f_jkl - f_jkk| <= 2(2^q+2) eps_j^q on S_l^{2^{1/q} eps_j} and 0 off it;
/// f_jkl - min f_jkl >= eps_j^q / 3^q off S_l^{2^{1/q} eps_j}.
std::vector<PropertyReport> check_gap_props(const ReferenceGrid& g, const VerifyOptions& opt = {});

/// |f_k - f_1| <= (2^q+2) eps^q on U_k and 0 off it, plus the U partition.
/// Points on a coordinate hyperplane are skipped for the gap: there the
/// orthant label is a convention and the bitten region can leak across it.
std::vector<PropertyReport> check_orthant_gap(long long T, int d, double q, const VerifyOptions& opt = {});

/// Wrap a bitten function as an instance on [-R, R]^d with the given
/// declared (lambda, L).
InstanceD make_lowerbound_instance(const BittenFunctionD& f, double R, double lambda, double big_l);

}  // namespace geonarrow
