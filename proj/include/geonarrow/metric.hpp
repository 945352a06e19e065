#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace geonarrow {

template <typename Scalar>
using Point = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using PointD = Point<double>;

/// Closed l-infinity ball. When attached to a Domain it is always read as
/// its intersection with the domain box.
template <typename Scalar>
struct Ball {
  Point<Scalar> center;
  Scalar radius{};
};

using BallD = Ball<double>;

/// Axis-aligned box [lower, upper] under the l-infinity metric. For a box the
/// doubling dimension equals the ambient dimension.
template <typename Scalar>
class Domain {
 public:
  using PointType = Point<Scalar>;

  Domain(PointType lower, PointType upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.size() == 0 || lower_.size() != upper_.size()) {
      throw std::invalid_argument("Domain: bounds must be nonempty and of equal dimension");
    }
    if (!lower_.allFinite() || !upper_.allFinite()) {
      throw std::invalid_argument("Domain: bounds must be finite");
    }
    if ((upper_.array() <= lower_.array()).any()) {
      throw std::invalid_argument("Domain: upper must exceed lower on every axis");
    }
  }

  static Domain unit(int d) { return Domain(PointType::Zero(d), PointType::Ones(d)); }

  static Domain cube(int d, Scalar lo, Scalar hi) {
    return Domain(PointType::Constant(d, lo), PointType::Constant(d, hi));
  }

  int dim() const { return static_cast<int>(lower_.size()); }
  const PointType& lower() const { return lower_; }
  const PointType& upper() const { return upper_; }
  PointType side() const { return upper_ - lower_; }
  Scalar diameter() const { return (upper_ - lower_).maxCoeff(); }

  bool contains(const PointType& x) const {
    return x.size() == lower_.size() && (x.array() >= lower_.array()).all() &&
           (x.array() <= upper_.array()).all();
  }

  /// Per-axis interval [lo, hi] of a ball clipped to the box.
  void clip(const Ball<Scalar>& b, PointType& lo, PointType& hi) const {
    lo = (b.center.array() - b.radius).max(lower_.array()).matrix();
    hi = (b.center.array() + b.radius).min(upper_.array()).matrix();
  }

  bool contains(const Ball<Scalar>& b, const PointType& x) const {
    if (!contains(x)) return false;
    return ((x - b.center).cwiseAbs().array() <= b.radius).all();
  }

 private:
  PointType lower_;
  PointType upper_;
};

using DomainD = Domain<double>;

namespace detail {

inline void require_same_dim(Eigen::Index a, Eigen::Index b) {
  if (a != b) throw std::invalid_argument("dimension mismatch");
}

/// Lexicographic order on coordinates; used wherever a deterministic
/// tie-break between centers is needed.
template <typename Scalar>
bool lex_less(const Point<Scalar>& a, const Point<Scalar>& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

/// Cartesian product of per-axis coordinate lists, axis 0 most significant.
template <typename Scalar>
std::vector<Point<Scalar>> grid_product(const std::vector<std::vector<Scalar>>& axes) {
  const int d = static_cast<int>(axes.size());
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.size();
  std::vector<Point<Scalar>> out;
  out.reserve(total);
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t n = 0; n < total; ++n) {
    Point<Scalar> p(d);
    for (int i = 0; i < d; ++i) p(i) = axes[i][idx[i]];
    out.push_back(std::move(p));
    for (int i = d - 1; i >= 0; --i) {
      if (++idx[i] < axes[i].size()) break;
      idx[i] = 0;
    }
  }
  return out;
}

}  // namespace detail

template <typename Scalar>
Scalar distance(const Point<Scalar>& a, const Point<Scalar>& b) {
  detail::require_same_dim(a.size(), b.size());
  if (a.size() == 0) return Scalar(0);
  return (a - b).cwiseAbs().maxCoeff();
}

template <typename Scalar>
Scalar norm_inf(const Point<Scalar>& x) {
  return x.size() == 0 ? Scalar(0) : x.cwiseAbs().maxCoeff();
}

/// sup over x in S, x' in S2 of distance(x, x'), both balls clipped to `dom`.
template <typename Scalar>
Scalar set_diameter(const Domain<Scalar>& dom, const Ball<Scalar>& s, const Ball<Scalar>& s2) {
  detail::require_same_dim(s.center.size(), s2.center.size());
  detail::require_same_dim(s.center.size(), dom.dim());
  Point<Scalar> lo, hi, lo2, hi2;
  dom.clip(s, lo, hi);
  dom.clip(s2, lo2, hi2);
  return (hi - lo2).cwiseAbs().cwiseMax((hi2 - lo).cwiseAbs()).maxCoeff();
}

/// [z]_2: smallest power of two not below z.
template <typename Scalar>
Scalar round_pow2(Scalar z) {
  if (!(z > Scalar(0)) || !std::isfinite(z)) {
    throw std::invalid_argument("round_pow2: argument must be positive and finite");
  }
  Scalar p = std::exp2(std::ceil(std::log2(z)));
  // log2 may be off by an ulp near exact powers
  if (p < z) p *= Scalar(2);
  if (p / Scalar(2) >= z) p /= Scalar(2);
  return p;
}

/// Regular grid cover of the box by closed balls of radius r: ceil(side/2r)
/// cells per axis, last cell shifted inward so every center is feasible.
template <typename Scalar>
std::vector<Ball<Scalar>> initial_cover(const Domain<Scalar>& dom, Scalar r) {
  if (!(r > Scalar(0))) throw std::invalid_argument("initial_cover: radius must be positive");
  std::vector<std::vector<Scalar>> axes(dom.dim());
  for (int i = 0; i < dom.dim(); ++i) {
    const Scalar lo = dom.lower()(i);
    const Scalar hi = dom.upper()(i);
    const Scalar side = hi - lo;
    if (Scalar(2) * r >= side) {
      axes[i].push_back(lo + side / Scalar(2));
      continue;
    }
    const auto cells = static_cast<long>(std::ceil(side / (Scalar(2) * r)));
    for (long j = 0; j < cells; ++j) {
      axes[i].push_back(std::min(lo + r * Scalar(2 * j + 1), hi - r));
    }
  }
  std::vector<Ball<Scalar>> out;
  for (auto& c : detail::grid_product(axes)) out.push_back({std::move(c), r});
  return out;
}

/// Splits the clipped box of `b` into (b.radius / r_child)^d equal cells and
/// returns one ball of radius r_child per cell, centered in the cell.
template <typename Scalar>
std::vector<Ball<Scalar>> refine_ball(const Domain<Scalar>& dom, const Ball<Scalar>& b, Scalar r_child) {
  if (!(r_child > Scalar(0))) throw std::invalid_argument("refine_ball: child radius must be positive");
  const Scalar ratio = b.radius / r_child;
  const Scalar k_real = std::round(ratio);
  const auto k = static_cast<long>(k_real);
  if (k < 1 || std::abs(ratio - k_real) > Scalar(1e-9) * ratio || (k & (k - 1)) != 0) {
    throw std::invalid_argument("refine_ball: radius ratio must be a positive power of two");
  }
  Point<Scalar> lo, hi;
  dom.clip(b, lo, hi);
  std::vector<std::vector<Scalar>> axes(dom.dim());
  for (int i = 0; i < dom.dim(); ++i) {
    const Scalar w = (hi(i) - lo(i)) / Scalar(k);
    for (long j = 0; j < k; ++j) axes[i].push_back(lo(i) + w * (Scalar(j) + Scalar(0.5)));
  }
  std::vector<Ball<Scalar>> out;
  for (auto& c : detail::grid_product(axes)) out.push_back({std::move(c), r_child});
  return out;
}

/// Regular grid of n points per axis spanning the box, endpoints included.
template <typename Scalar>
std::vector<Point<Scalar>> grid_points(const Domain<Scalar>& dom, int n) {
  if (n < 2) throw std::invalid_argument("grid_points: need at least two points per axis");
  std::vector<std::vector<Scalar>> axes(dom.dim());
  for (int i = 0; i < dom.dim(); ++i) {
    const Scalar lo = dom.lower()(i);
    const Scalar step = (dom.upper()(i) - lo) / Scalar(n - 1);
    for (int j = 0; j < n; ++j) axes[i].push_back(j == n - 1 ? dom.upper()(i) : lo + step * Scalar(j));
  }
  return detail::grid_product(axes);
}

}  // namespace geonarrow
