#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "geonarrow/metric.hpp"

namespace geonarrow {

/// A loss with a unique minimizer and declared nondegeneracy parameters:
///   lambda * dist(x, x*)^q <= f(x) - f(x*) <= big_l * dist(x, x*)^q.
/// The declared parameters are claims; audit_nondegeneracy checks them.
template <typename Scalar>
struct NondegenerateInstance {
  using PointType = Point<Scalar>;

  std::string name;
  Domain<Scalar> domain;
  PointType minimizer;
  Scalar lambda{};
  Scalar big_l{};
  Scalar q{};
  std::function<Scalar(const PointType&)> eval;

  Scalar optimum() const { return eval(minimizer); }
  Scalar gap(const PointType& x) const { return eval(x) - optimum(); }
};

using InstanceD = NondegenerateInstance<double>;

enum class NoiseKind { gaussian, none };

struct NoiseSpec {
  NoiseKind kind = NoiseKind::gaussian;
  double std = 1.0;

  static NoiseSpec gaussian(double s = 1.0) { return validated({NoiseKind::gaussian, s}); }
  static NoiseSpec noiseless() { return {NoiseKind::none, 0.0}; }

  static NoiseSpec validated(NoiseSpec n) {
    if (!(n.std >= 0.0 && n.std <= 1.0)) {
      throw std::invalid_argument("NoiseSpec: std must lie in [0, 1]");
    }
    return n;
  }
};

namespace detail {

template <typename Scalar>
void validate_parameters(Scalar lambda, Scalar big_l, Scalar q) {
  if (!(lambda > Scalar(0)) || !(big_l >= lambda) || !(q >= Scalar(1))) {
    throw std::invalid_argument("instance parameters must satisfy L >= lambda > 0 and q >= 1");
  }
}

}  // namespace detail

/// f(x) = scale * ||x - x*||_inf^q, so lambda = L = scale.
template <typename Scalar>
NondegenerateInstance<Scalar> make_power_instance(const Domain<Scalar>& domain, const Point<Scalar>& x_star,
                                                  Scalar q, Scalar scale) {
  if (!domain.contains(x_star)) throw std::invalid_argument("make_power_instance: x* outside domain");
  if (!(scale > Scalar(0))) throw std::invalid_argument("make_power_instance: scale must be positive");
  detail::validate_parameters(scale, scale, q);
  Point<Scalar> c = x_star;
  auto f = [c, q, scale](const Point<Scalar>& x) { return scale * std::pow(distance(x, c), q); };
  return {"power", domain, x_star, scale, scale, q, std::move(f)};
}

/// The discontinuous example on [-2, 2]:
///   -x on [-2, -1),  x^2 on [-1, 1],  x + 1 on (1, 2],
/// enveloped by x^2/2 and 2x^2.
template <typename Scalar>
NondegenerateInstance<Scalar> make_piecewise_interval_instance() {
  auto f = [](const Point<Scalar>& p) {
    const Scalar x = p(0);
    if (x < Scalar(-1)) return -x;
    if (x <= Scalar(1)) return x * x;
    return x + Scalar(1);
  };
  return {"piecewise", Domain<Scalar>::cube(1, Scalar(-2), Scalar(2)), Point<Scalar>::Zero(1),
          Scalar(0.5), Scalar(2), Scalar(2), std::move(f)};
}

template <typename Scalar>
struct AuditReport {
  Scalar lambda_hat{};
  Scalar big_l_hat{};
  bool minimum_ok = false;  // f(x*) strictly below every audited grid value
  bool pass = false;
  std::size_t points = 0;
};

/// Empirical nondegeneracy envelope on a regular grid. Points closer to x*
/// than one grid step are skipped, so x* itself never enters a ratio.
template <typename Scalar>
AuditReport<Scalar> audit_nondegeneracy(const NondegenerateInstance<Scalar>& inst, int grid_per_axis) {
  if (grid_per_axis < 2) throw std::invalid_argument("audit_nondegeneracy: grid_per_axis must be >= 2");
  const Scalar step = inst.domain.side().minCoeff() / Scalar(grid_per_axis - 1);
  const Scalar f_star = inst.optimum();

  AuditReport<Scalar> rep;
  rep.lambda_hat = std::numeric_limits<Scalar>::infinity();
  rep.big_l_hat = Scalar(0);
  rep.minimum_ok = true;
  for (const auto& x : grid_points(inst.domain, grid_per_axis)) {
    const Scalar dist = distance(x, inst.minimizer);
    if (dist < step) continue;
    const Scalar gap = inst.eval(x) - f_star;
    if (!(gap > Scalar(0))) rep.minimum_ok = false;
    const Scalar ratio = gap / std::pow(dist, inst.q);
    rep.lambda_hat = std::min(rep.lambda_hat, ratio);
    rep.big_l_hat = std::max(rep.big_l_hat, ratio);
    ++rep.points;
  }
  if (rep.points == 0) throw std::invalid_argument("audit_nondegeneracy: grid has no point away from x*");
  const Scalar tol = Scalar(1e-9) * std::max(Scalar(1), rep.big_l_hat);
  rep.pass = rep.minimum_ok && inst.lambda <= rep.lambda_hat + tol && rep.big_l_hat <= inst.big_l + tol;
  return rep;
}

/// Grid resolution at which shipped instances are audited.
inline int default_audit_resolution(int d) {
  switch (d) {
    case 1: return 401;
    case 2: return 101;
    default: return 31;
  }
}

}  // namespace geonarrow
