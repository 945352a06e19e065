#include "geonarrow/lowerbound.hpp"

#include <algorithm>
#include <limits>

namespace geonarrow {

namespace {

double radical_inverse(std::uint64_t n, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base);
  double f = inv;
  double r = 0.0;
  while (n > 0) {
    r += f * static_cast<double>(n % base);
    n /= base;
    f *= inv;
  }
  return r;
}

constexpr std::uint64_t kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19};

void require_grid_index(const ReferenceGrid& g, int j, int k) {
  if (j < 1 || j > g.M) throw std::invalid_argument("lowerbound: j out of range");
  if (k < 1 || k > orthant_count(g.d) - 1) throw std::invalid_argument("lowerbound: k out of range");
}

BittenRegion<double> corner_region(int k, double eps, int d, double stretch = 1.0) {
  return {corner_point(k, stretch * eps, d), stretch * eps, stretch * eps / 2.0};
}

PropertyReport make_report(std::string property, std::vector<int> indices) {
  PropertyReport r;
  r.property = std::move(property);
  r.indices = std::move(indices);
  r.min_ratio = std::numeric_limits<double>::infinity();
  r.max_ratio = -std::numeric_limits<double>::infinity();
  r.pass = true;
  return r;
}

void observe(PropertyReport& r, double v) {
  r.min_ratio = std::min(r.min_ratio, v);
  r.max_ratio = std::max(r.max_ratio, v);
  ++r.points;
}

double largest_eps(const ReferenceGrid& g) {
  double e = 0.0;
  for (int j = 1; j <= g.M; ++j) e = std::max(e, g.eps(j));
  return e;
}

}  // namespace

ReferenceGrid reference_grid(long long T, int M, int d, double q) {
  if (M < 1 || T < M) throw std::invalid_argument("reference_grid: need T >= M >= 1");
  if (d < 1 || !(q >= 1.0)) throw std::invalid_argument("reference_grid: need d >= 1 and q >= 1");
  ReferenceGrid g;
  g.M = M;
  g.T = T;
  g.d = d;
  g.q = q;
  const double t = static_cast<double>(T);
  const double denom = 1.0 - std::exp2(-M);
  const double base = 0.25 * (std::sqrt(2.0) / 2.0) * (std::sqrt(std::exp2(d) - 1.0) / (std::pow(2.0, q) + 2.0)) / M;
  for (int j = 1; j <= M; ++j) {
    const long long tj = j == M ? T : static_cast<long long>(std::floor(std::pow(t, (1.0 - std::exp2(-j)) / denom)));
    g.T_j.push_back(tj);
    g.eps_j_pow_q.push_back(base * std::pow(t, -0.5 * (1.0 - std::exp2(1 - j)) / denom));
  }
  return g;
}

double theorem2_epsilon(long long T, int d, double q) {
  if (T < 1) throw std::invalid_argument("theorem2_epsilon: T must be >= 1");
  const double eq = std::sqrt(2.0 * (std::exp2(d) - 1.0)) / (std::pow(2.0, q) + 2.0) / std::sqrt(static_cast<double>(T));
  return std::pow(eq, 1.0 / q);
}

BittenFunctionD make_f_jk(const ReferenceGrid& g, int j, int k) {
  require_grid_index(g, j, k);
  const int top = orthant_count(g.d);
  std::vector<BittenRegion<double>> regions;
  if (j < g.M) regions.push_back(corner_region(k, g.eps(j), g.d));
  regions.push_back(corner_region(top, g.eps(g.M) / 3.0, g.d));
  return BittenFunctionD(g.d, g.q, std::move(regions), "f_jk");
}

BittenFunctionD make_f_jkl(const ReferenceGrid& g, int j, int k, int l) {
  require_grid_index(g, j, k);
  const int top = orthant_count(g.d);
  if (l < 1 || l > top) throw std::invalid_argument("lowerbound: l out of range");
  const double s = std::pow(2.0, 1.0 / g.q);
  std::vector<BittenRegion<double>> regions;
  if (j < g.M) {
    if (l == k) return make_f_jk(g, j, k);
    regions.push_back(corner_region(k, g.eps(j), g.d));
    regions.push_back(corner_region(l, g.eps(j), g.d, s));
    if (l < top) regions.push_back(corner_region(top, g.eps(g.M) / 3.0, g.d));
  } else {
    if (l == top) return make_f_jk(g, j, k);
    regions.push_back(corner_region(l, g.eps(g.M) / 3.0, g.d, s));
    regions.push_back(corner_region(top, g.eps(g.M) / 3.0, g.d));
  }
  return BittenFunctionD(g.d, g.q, std::move(regions), "f_jkl");
}

BittenFunctionD make_f_k_eps(int k, double eps, double q, int d) {
  if (d < 1 || k < 1 || k > orthant_count(d)) throw std::invalid_argument("f_k_eps: k out of range");
  if (!(eps > 0.0)) throw std::invalid_argument("f_k_eps: eps must be positive");
  std::vector<BittenRegion<double>> regions;
  if (k > 1) regions.push_back(corner_region(k, eps, d));
  return BittenFunctionD(d, q, std::move(regions), "f_k_eps");
}

BallD s_region(int k, double eps, int d) { return {corner_point(k, eps, d), eps}; }

bool in_u_region(int k, double eps, const PointD& x) {
  const bool core = norm_inf(x) <= eps / 2.0;
  const bool in_orthant = orthant_of(x) == k;
  return k == 1 ? (in_orthant || core) : (in_orthant && !core);
}

std::vector<PointD> lowerbound_audit_points(int d, double R, const std::vector<const BittenFunctionD*>& fs,
                                            const VerifyOptions& opt) {
  const int n = opt.grid_per_axis > 0 ? opt.grid_per_axis : (d <= 2 ? 401 : 61);
  std::vector<std::vector<double>> axes(d);
  for (int i = 0; i < d; ++i) {
    for (int a = 0; a < n; ++a) axes[i].push_back(-R + 2.0 * R * a / (n - 1));
  }
  std::vector<PointD> pts = detail::grid_product(axes);

  // the regions shrink with eps_M and can fall between grid nodes
  if (d > static_cast<int>(std::size(kPrimes))) throw std::invalid_argument("audit points: d too large");
  for (const auto* f : fs) {
    for (const auto& r : f->regions()) {
      int accepted = 0;
      for (std::uint64_t idx = 1; accepted < opt.region_samples && idx < 64ull * opt.region_samples + 64; ++idx) {
        PointD p(d);
        for (int i = 0; i < d; ++i) p(i) = r.center(i) + r.outer * (2.0 * radical_inverse(idx, kPrimes[i]) - 1.0);
        if (!r.contains(p)) continue;
        pts.push_back(std::move(p));
        ++accepted;
      }
      pts.push_back(r.center);
    }
  }
  return pts;
}

PropertyReport check_nondegenerate(const BittenFunctionD& f, const std::vector<PointD>& pts, double c_low,
                                   double c_high, double slack, std::string property, std::vector<int> indices) {
  PropertyReport rep = make_report(std::move(property), std::move(indices));
  const double fmin = f.min_value();
  double reach = 0.0;
  for (const auto& x : pts) reach = std::max(reach, distance(x, f.minimizer()));
  // grid nodes a few ulps from the minimizer carry no ratio information:
  // the gap is pure rounding, so only its size is checked there
  const double near = slack * reach;
  for (const auto& x : pts) {
    const double dist = distance(x, f.minimizer());
    if (dist <= near) {
      if (std::abs(f(x) - fmin) > slack * std::max(1.0, std::abs(fmin))) rep.pass = false;
      continue;
    }
    const double gap = f(x) - fmin;
    const double ratio = gap / std::pow(dist, f.q());
    observe(rep, ratio);
  }
  if (rep.points == 0) rep.pass = false;
  if (rep.min_ratio < c_low * (1.0 - slack) || rep.max_ratio > c_high * (1.0 + slack)) rep.pass = false;
  return rep;
}

std::vector<PropertyReport> check_prop_nondegen(LowerBoundFamily family, const ReferenceGrid& g,
                                                const VerifyOptions& opt) {
  const int top = orthant_count(g.d);
  const double q = g.q;
  std::vector<PropertyReport> out;

  if (family == LowerBoundFamily::f_k_eps) {
    const double eps = theorem2_epsilon(g.T, g.d, q);
    std::vector<BittenFunctionD> fs;
    for (int k = 1; k <= top; ++k) fs.push_back(make_f_k_eps(k, eps, q, g.d));
    std::vector<const BittenFunctionD*> ptrs;
    for (const auto& f : fs) ptrs.push_back(&f);
    const auto pts = lowerbound_audit_points(g.d, opt.box_scale * eps, ptrs, opt);
    for (int k = 1; k <= top; ++k) {
      out.push_back(check_nondegenerate(fs[k - 1], pts, std::pow(2.0, 1.0 - q), std::pow(3.0, q + 1.0), opt.slack,
                                        "f_k_eps.nondegenerate", {k}));
    }
    return out;
  }

  const double R = opt.box_scale * largest_eps(g);
  const double c_low = std::pow(9.0, -q);
  if (family == LowerBoundFamily::f_jk) {
    const double c_high = std::pow(std::pow(2.0, q) + 1.0, 2.0);
    for (int j = 1; j <= g.M; ++j) {
      for (int k = 1; k < top; ++k) {
        const auto f = make_f_jk(g, j, k);
        const auto pts = lowerbound_audit_points(g.d, R, {&f}, opt);
        out.push_back(check_nondegenerate(f, pts, c_low, c_high, opt.slack, "f_jk.nondegenerate", {j, k}));
        if (j == g.M) break;  // k-independent
      }
    }
    return out;
  }

  const double c_high = std::pow(std::pow(3.0, q) + 1.0, 2.0);
  for (int j = 1; j <= g.M; ++j) {
    for (int k = 1; k < top; ++k) {
      for (int l = 1; l <= top; ++l) {
        const auto f = make_f_jkl(g, j, k, l);
        const auto pts = lowerbound_audit_points(g.d, R, {&f}, opt);
        out.push_back(check_nondegenerate(f, pts, c_low, c_high, opt.slack, "f_jkl.nondegenerate", {j, k, l}));
      }
    }
  }
  return out;
}

std::vector<PropertyReport> check_gap_props(const ReferenceGrid& g, const VerifyOptions& opt) {
  const int top = orthant_count(g.d);
  const double q = g.q;
  const double s = std::pow(2.0, 1.0 / q);
  const double R = opt.box_scale * largest_eps(g);
  const double pq = std::pow(2.0, q) + 2.0;
  std::vector<PropertyReport> out;

  const auto f_m = make_f_jk(g, g.M, 1);
  for (int j = 1; j < g.M; ++j) {
    const double bound = pq * g.eps_pow_q(j);
    for (int k = 1; k < top; ++k) {
      const auto f = make_f_jk(g, j, k);
      const auto region = corner_region(k, g.eps(j), g.d);
      const auto pts = lowerbound_audit_points(g.d, R, {&f, &f_m}, opt);
      PropertyReport rep = make_report("f_jk.gap_to_f_Mk", {j, k});
      for (const auto& x : pts) {
        const double diff = std::abs(f(x) - f_m(x));
        if (region.contains(x)) {
          observe(rep, diff / bound);
          if (diff > bound * (1.0 + opt.slack)) rep.pass = false;
        } else if (diff != 0.0) {
          rep.pass = false;
          observe(rep, diff / bound);
        }
      }
      out.push_back(rep);
    }
  }

  for (int j = 1; j <= g.M; ++j) {
    const double floor_val = g.eps_pow_q(j) / std::pow(3.0, q);
    const double bound = 2.0 * pq * g.eps_pow_q(j);
    for (int k = 1; k < top; ++k) {
      const auto base = j < g.M ? make_f_jkl(g, j, k, k) : make_f_jkl(g, j, k, top);
      for (int l = 1; l <= top; ++l) {
        const auto f = make_f_jkl(g, j, k, l);
        const BallD sl = s_region(l, s * g.eps(j), g.d);
        const auto pts = lowerbound_audit_points(g.d, R, {&f, &base}, opt);
        const bool reference = (j < g.M && l == k) || (j == g.M && l == top);

        if (!reference) {
          PropertyReport rep = make_report("f_jkl.gap_to_f_jkk", {j, k, l});
          for (const auto& x : pts) {
            const double diff = std::abs(f(x) - base(x));
            const bool inside = distance(x, sl.center) <= sl.radius;
            if (inside) {
              observe(rep, diff / bound);
              if (diff > bound * (1.0 + opt.slack)) rep.pass = false;
            } else if (diff != 0.0) {
              rep.pass = false;
              observe(rep, diff / bound);
            }
          }
          out.push_back(rep);
        }

        PropertyReport floor_rep = make_report("f_jkl.regret_floor", {j, k, l});
        for (const auto& x : pts) {
          if (distance(x, sl.center) <= sl.radius) continue;
          const double r = (f(x) - f.min_value()) / floor_val;
          observe(floor_rep, r);
          if (r < 1.0 - opt.slack) floor_rep.pass = false;
        }
        if (floor_rep.points == 0) floor_rep.pass = false;
        out.push_back(floor_rep);
      }
    }
  }
  return out;
}

std::vector<PropertyReport> check_orthant_gap(long long T, int d, double q, const VerifyOptions& opt) {
  const int top = orthant_count(d);
  const double eps = theorem2_epsilon(T, d, q);
  const double bound = (std::pow(2.0, q) + 2.0) * std::pow(eps, q);
  const auto f1 = make_f_k_eps(1, eps, q, d);
  std::vector<BittenFunctionD> fs;
  for (int k = 1; k <= top; ++k) fs.push_back(make_f_k_eps(k, eps, q, d));
  std::vector<const BittenFunctionD*> ptrs;
  for (const auto& f : fs) ptrs.push_back(&f);
  const auto pts = lowerbound_audit_points(d, opt.box_scale * eps, ptrs, opt);

  std::vector<PropertyReport> out;
  for (int k = 2; k <= top; ++k) {
    PropertyReport rep = make_report("f_k_eps.gap_to_f_1", {k});
    const auto& f = fs[k - 1];
    for (const auto& x : pts) {
      if ((x.array() == 0.0).any()) continue;
      const double diff = std::abs(f(x) - f1(x));
      if (in_u_region(k, eps, x)) {
        observe(rep, diff / bound);
        if (diff > bound * (1.0 + opt.slack)) rep.pass = false;
      } else if (diff != 0.0) {
        rep.pass = false;
        observe(rep, diff / bound);
      }
    }
    out.push_back(rep);
  }

  PropertyReport part = make_report("u_regions.partition", {});
  for (const auto& x : pts) {
    int hits = 0;
    for (int k = 1; k <= top; ++k) hits += in_u_region(k, eps, x) ? 1 : 0;
    observe(part, hits);
    if (hits != 1) part.pass = false;
  }
  out.push_back(part);
  return out;
}

InstanceD make_lowerbound_instance(const BittenFunctionD& f, double R, double lambda, double big_l) {
  InstanceD inst{
      f.label(), DomainD::cube(f.dim(), -R, R), f.minimizer(), lambda, big_l, f.q(),
      [f](const PointD& x) { return f(x); }};
  if (!inst.domain.contains(inst.minimizer)) throw std::invalid_argument("lowerbound instance: box misses the minimizer");
  return inst;
}

}  // namespace geonarrow
