#pragma once

// Model closed oriented manifolds (round S^2, flat T^2 and T^3), their
// reference volume forms, midpoint quadrature grids with exact cell
// measures, and the intrinsic (tangential) gradient.

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "nambu/errors.hpp"
#include "nambu/expr.hpp"

namespace nambu {

using Vec3 = std::array<double, 3>;

inline double dot3(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm3(const Vec3& a) { return std::sqrt(dot3(a, a)); }
inline Vec3 cross3(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

struct Domain {
  DomainKind kind = DomainKind::sphere2;

  int manifold_dim() const { return kind == DomainKind::torus3 ? 3 : 2; }
  int ambient_dim() const { return kind == DomainKind::torus2 ? 2 : 3; }
  double total_volume() const {
    return kind == DomainKind::sphere2 ? 4.0 * expr_detail::kPi : 1.0;
  }
};

// Wrap a flat-torus coordinate into [0,1).
inline double wrap01(double x) {
  double r = x - std::floor(x);
  return r >= 1.0 ? r - 1.0 : r;
}

// Minimum-image displacement on a flat torus.
inline double torus_delta(double a, double b) {
  double d = a - b;
  d -= std::round(d);
  return d;
}

// Quadrature grid: cells carry exact mu-measures, the integrand is sampled
// at cell centers. The sphere uses a latitude-longitude band of resolution
// res[0] x res[1] plus two dedicated polar cap cells; zero loci are required
// to stay out of the caps. Tori are uniform and periodic on every axis.
struct QuadGrid {
  Domain domain;
  std::array<int, 3> res{0, 0, 0};
  int supersample = 4;

  // sphere chart quantities
  double theta_cap = 0.0;
  double dtheta = 0.0;
  double dphi = 0.0;

  int axes() const { return domain.manifold_dim(); }

  long band_cells() const {
    long n = 1;
    for (int a = 0; a < axes(); ++a) n *= res[a];
    return n;
  }
  long cell_count() const {
    return band_cells() + (domain.kind == DomainKind::sphere2 ? 2 : 0);
  }
  bool is_cap(long c) const {
    return domain.kind == DomainKind::sphere2 && c >= band_cells();
  }
  long north_cap() const { return band_cells(); }
  long south_cap() const { return band_cells() + 1; }

  // Chart coordinates: sphere cells use (theta, phi), torus cells use the
  // flat coordinates themselves.
  void cell_chart_box(long c, Vec3& lo, Vec3& hi) const {
    if (domain.kind == DomainKind::sphere2) {
      if (c == north_cap()) {
        lo = {0.0, 0.0, 0.0};
        hi = {theta_cap, 2.0 * expr_detail::kPi, 0.0};
        return;
      }
      if (c == south_cap()) {
        lo = {expr_detail::kPi - theta_cap, 0.0, 0.0};
        hi = {expr_detail::kPi, 2.0 * expr_detail::kPi, 0.0};
        return;
      }
      long j = c / res[1], i = c % res[1];
      lo = {theta_cap + j * dtheta, i * dphi, 0.0};
      hi = {theta_cap + (j + 1) * dtheta, (i + 1) * dphi, 0.0};
      return;
    }
    long rem = c;
    for (int a = 0; a < axes(); ++a) {
      long idx = rem % res[a];
      rem /= res[a];
      lo[a] = static_cast<double>(idx) / res[a];
      hi[a] = static_cast<double>(idx + 1) / res[a];
    }
  }

  Vec3 cell_chart_center(long c) const {
    if (is_cap(c)) {
      // Pole point; phi is immaterial there.
      return {c == north_cap() ? 0.0 : expr_detail::kPi, 0.0, 0.0};
    }
    Vec3 lo, hi;
    cell_chart_box(c, lo, hi);
    Vec3 m{0, 0, 0};
    for (int a = 0; a < axes(); ++a) m[a] = 0.5 * (lo[a] + hi[a]);
    return m;
  }

  Vec3 ambient_from_chart(const Vec3& chart) const {
    if (domain.kind == DomainKind::sphere2) {
      double st = std::sin(chart[0]);
      return {st * std::cos(chart[1]), st * std::sin(chart[1]), std::cos(chart[0])};
    }
    Vec3 p{0, 0, 0};
    for (int a = 0; a < axes(); ++a) p[a] = wrap01(chart[a]);
    return p;
  }

  Vec3 cell_center(long c) const { return ambient_from_chart(cell_chart_center(c)); }

  double cell_weight(long c) const {
    if (domain.kind == DomainKind::sphere2) {
      if (is_cap(c)) return 2.0 * expr_detail::kPi * (1.0 - std::cos(theta_cap));
      Vec3 lo, hi;
      cell_chart_box(c, lo, hi);
      return dphi * (std::cos(lo[0]) - std::cos(hi[0]));
    }
    return 1.0 / static_cast<double>(band_cells());
  }

  // Measure of a chart sub-box (used when band cells get supersampled).
  double box_weight(const Vec3& lo, const Vec3& hi) const {
    if (domain.kind == DomainKind::sphere2)
      return (hi[1] - lo[1]) * (std::cos(lo[0]) - std::cos(hi[0]));
    double w = 1.0;
    for (int a = 0; a < axes(); ++a) w *= hi[a] - lo[a];
    return w;
  }

  void cell_neighbors(long c, std::vector<long>& out) const {
    out.clear();
    if (domain.kind == DomainKind::sphere2) {
      if (c == north_cap()) {
        for (long i = 0; i < res[1]; ++i) out.push_back(i);
        return;
      }
      if (c == south_cap()) {
        long j = res[0] - 1;
        for (long i = 0; i < res[1]; ++i) out.push_back(j * res[1] + i);
        return;
      }
      long j = c / res[1], i = c % res[1];
      out.push_back(j * res[1] + (i + 1) % res[1]);
      out.push_back(j * res[1] + (i + res[1] - 1) % res[1]);
      out.push_back(j == 0 ? north_cap() : (j - 1) * res[1] + i);
      out.push_back(j == res[0] - 1 ? south_cap() : (j + 1) * res[1] + i);
      return;
    }
    long rem = c;
    long stride = 1;
    for (int a = 0; a < axes(); ++a) {
      long idx = rem % res[a];
      rem /= res[a];
      long up = (idx + 1) % res[a];
      long dn = (idx + res[a] - 1) % res[a];
      out.push_back(c + (up - idx) * stride);
      out.push_back(c + (dn - idx) * stride);
      stride *= res[a];
    }
  }
};

inline QuadGrid make_grid(const Domain& d, std::span<const int> resolution) {
  if (static_cast<int>(resolution.size()) != d.manifold_dim())
    throw ValidationError("resolution needs " + std::to_string(d.manifold_dim()) +
                          " axis counts for " + to_string(d.kind));
  for (int r : resolution)
    if (r < 16)
      throw ResolutionTooLow("resolution " + std::to_string(r) +
                             " is below the minimum of 16 cells per axis");
  QuadGrid g;
  g.domain = d;
  for (int a = 0; a < d.manifold_dim(); ++a) g.res[a] = resolution[a];
  if (d.kind == DomainKind::sphere2) {
    g.theta_cap = 2.0 * expr_detail::kPi / g.res[0];
    g.dtheta = (expr_detail::kPi - 2.0 * g.theta_cap) / g.res[0];
    g.dphi = 2.0 * expr_detail::kPi / g.res[1];
  }
  return g;
}

struct TangentData {
  Vec3 tangential{0, 0, 0};
  double norm = 0.0;
};

// Project an ambient gradient onto the tangent space at p. Flat tori are
// their own tangent spaces; on the sphere the radial component is removed.
inline TangentData intrinsic_gradient(const Domain& d, const Vec3& p, const Vec3& ambient_grad) {
  TangentData t;
  if (d.kind == DomainKind::sphere2) {
    double r = norm3(p);
    if (std::abs(r - 1.0) > 1e-9)
      throw OffManifold("point is off the unit sphere by " + std::to_string(std::abs(r - 1.0)));
    double radial = dot3(ambient_grad, p);
    for (int i = 0; i < 3; ++i) t.tangential[i] = ambient_grad[i] - radial * p[i];
    t.norm = norm3(t.tangential);
    return t;
  }
  t.tangential = ambient_grad;
  double s = 0.0;
  for (int i = 0; i < d.ambient_dim(); ++i) s += ambient_grad[i] * ambient_grad[i];
  t.norm = std::sqrt(s);
  return t;
}

// Partial derivatives of a scalar along the chart axes, from its ambient
// gradient. For the sphere these are (df/dtheta, df/dphi).
inline Vec3 chart_partials(const Domain& d, const Vec3& chart, const Vec3& ambient_grad) {
  if (d.kind == DomainKind::sphere2) {
    double st = std::sin(chart[0]), ct = std::cos(chart[0]);
    double sp = std::sin(chart[1]), cp = std::cos(chart[1]);
    Vec3 dtheta{ct * cp, ct * sp, -st};
    Vec3 dphi{-st * sp, st * cp, 0.0};
    return {dot3(ambient_grad, dtheta), dot3(ambient_grad, dphi), 0.0};
  }
  return ambient_grad;
}

// Fixed-order midpoint quadrature over the whole grid.
template <class F>
double integrate(const QuadGrid& g, F&& fn) {
  double sum = 0.0;
  long n = g.cell_count();
  for (long c = 0; c < n; ++c) sum += g.cell_weight(c) * fn(g.cell_center(c));
  return sum;
}

}  // namespace nambu
