#pragma once

// Classification invariants: modular periods of zero-locus components,
// the regularized Liouville volume with its epsilon-extrapolation, cutoff
// independence checks, deformation-space coordinates, and the dimension of
// the deformation cohomology group.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "nambu/errors.hpp"
#include "nambu/field.hpp"
#include "nambu/geometry.hpp"
#include "nambu/zerolocus.hpp"

namespace nambu {

using TransverseWeight = std::function<double(const Vec3&)>;

struct ModularData {
  int component = 0;
  double period = 0;
  std::vector<double> density;  // 1/|grad f| at the component's vertices
  bool sign_flip = false;
};

struct VolumeDiagnostics {
  std::vector<double> eps;
  std::vector<double> integral;
  double slope = 0;
  double value_prev_pair = std::numeric_limits<double>::quiet_NaN();
  bool monotone = true;
};

struct VolumeResult {
  double value = 0;
  VolumeDiagnostics diag;
};

struct DeformationCoordinates {
  std::vector<double> c;
  double v_rel = 0;
};

// The modular period is the (n-1)-measure integral of 1/|grad f| over the
// component, with the component oriented so the integral is positive. The
// optional transverse weight rescales the defining transverse vector field;
// it enters numerator and denominator alike, so the period must not move.
inline ModularData modular_period(const NambuField& field, const ZeroComponent& comp,
                                  const TransverseWeight& weight = {}) {
  const Domain& dom = field.domain;
  ModularData md;
  md.component = comp.id;
  md.sign_flip = comp.orientation_flipped;
  md.density.reserve(comp.vertices.size());
  for (const ZeroVertex& v : comp.vertices) {
    if (v.grad_norm <= 0.0)
      throw DegenerateGradient("vanishing gradient on component " +
                               std::to_string(comp.id));
    md.density.push_back(1.0 / v.grad_norm);
  }

  double total = 0.0;
  const std::size_t nelem = comp.element_measure.size();
  for (std::size_t e = 0; e < nelem; ++e) {
    double measure = comp.element_measure[e];
    if (measure == 0.0) continue;
    Vec3 mid;
    if (comp.element_dim == 1) {
      const Vec3& a = comp.vertices[e].pos;
      const Vec3& b = comp.vertices[(e + 1) % comp.vertices.size()].pos;
      mid = locus_detail::segment_midpoint(dom, a, b);
    } else {
      const auto& t = comp.triangles[e];
      const Vec3& p0 = comp.vertices[t[0]].pos;
      Vec3 e1 = locus_detail::torus_displacement(comp.vertices[t[1]].pos, p0, 3);
      Vec3 e2 = locus_detail::torus_displacement(comp.vertices[t[2]].pos, p0, 3);
      mid = {wrap01(p0[0] + (e1[0] + e2[0]) / 3.0),
             wrap01(p0[1] + (e1[1] + e2[1]) / 3.0),
             wrap01(p0[2] + (e1[2] + e2[2]) / 3.0)};
    }
    ValueGrad vg = field_value_grad(field, mid);
    Vec3 g{vg.grad[0], vg.grad[1], vg.grad[2]};
    TangentData t = intrinsic_gradient(dom, mid, g);
    if (t.norm <= 0.0)
      throw DegenerateGradient("vanishing gradient on component " +
                               std::to_string(comp.id));
    double density;
    if (weight) {
      double w = weight(mid);
      density = (w * (1.0 / t.norm)) / w;
    } else {
      density = 1.0 / t.norm;
    }
    total += measure * density;
  }
  md.period = total;
  return md;
}

// ---------------------------------------------------------------------------
// Regularized volume machinery.
//
// Every cell is integrated analytically in the mask variable, treating mask
// and integrand as affine across the cell: the cell's mass is spread
// uniformly over the mask's linearized range and the resulting 1-D integral
// (with the |mask| >= eps clip) has a closed form. Cells near the band get
// supersampled first. This resolves both the singular growth of 1/f toward
// the band and the mask boundary itself below (sub)cell granularity; a plain
// midpoint sample with a sharp in/out test leaves epsilon-independent errors
// far above the tolerances the acceptance checks demand.

namespace reg_detail {

enum class Kind {
  inverse_field,  // integrand 1/f, mask f
  cutoff,         // integrand 1/f, mask h
  deformation,    // integrand theta/f^2, mask f
};

struct BandTerm {
  double mass = 0;
  double m0 = 0;          // mask value at the (sub)cell center
  double half_range = 0;  // half of the mask's linearized range over the box
  double p0 = 0;          // integrand parameter (f or theta at the center)
  double slope = 0;       // d(integrand parameter)/d(mask)
};

struct RegSamples {
  Kind kind = Kind::inverse_field;
  std::vector<BandTerm> terms;
  double max_nonlinearity = 0;
};

inline double chart_dot(const Vec3& a, const Vec3& b, int axes) {
  double s = 0;
  for (int i = 0; i < axes; ++i) s += a[i] * b[i];
  return s;
}

inline RegSamples build_samples(const NambuField& field, const QuadGrid& grid,
                                const Expression* mask_expr,
                                const Expression* theta_expr, double eps_max) {
  const Domain& dom = field.domain;
  const int axes = dom.manifold_dim();
  const int adim = dom.ambient_dim();
  RegSamples out;
  out.kind = theta_expr ? Kind::deformation
                        : (mask_expr ? Kind::cutoff : Kind::inverse_field);

  auto grad_of = [&](const Expression& e, const Vec3& p) {
    return eval_with_gradient(e, std::span<const double>(p.data(), adim));
  };
  const Expression& mask = mask_expr ? *mask_expr : field.f;

  // Integrand model parameters, anchored at the mask value mg.value.
  auto fill_term = [&](BandTerm& term, const Vec3& chart, const Vec3& sp,
                       const ValueGrad& mg, const Vec3& mpart) {
    switch (out.kind) {
      case Kind::inverse_field:
        term.p0 = mg.value;
        term.slope = 1.0;
        break;
      case Kind::cutoff: {
        ValueGrad fg = grad_of(field.f, sp);
        Vec3 fpart = chart_partials(dom, chart, {fg.grad[0], fg.grad[1], fg.grad[2]});
        double hh = chart_dot(mpart, mpart, axes);
        term.p0 = fg.value;
        term.slope = hh > 0 ? chart_dot(fpart, mpart, axes) / hh : 0.0;
        break;
      }
      case Kind::deformation: {
        ValueGrad tg = grad_of(*theta_expr, sp);
        Vec3 tpart = chart_partials(dom, chart, {tg.grad[0], tg.grad[1], tg.grad[2]});
        double ff = chart_dot(mpart, mpart, axes);
        term.p0 = tg.value;
        term.slope = ff > 0 ? chart_dot(tpart, mpart, axes) / ff : 0.0;
        break;
      }
    }
  };

  const long ncells = grid.cell_count();
  const int s = std::max(1, grid.supersample);
  for (long c = 0; c < ncells; ++c) {
    Vec3 center = grid.cell_center(c);
    ValueGrad cg = grad_of(mask, center);
    if (grid.is_cap(c)) {
      // Caps are tiny and guarded against zero crossings; a point sample.
      BandTerm term;
      term.mass = grid.cell_weight(c);
      term.m0 = cg.value;
      term.half_range = 0.0;
      Vec3 zero{0, 0, 0};
      fill_term(term, grid.cell_chart_center(c), center, cg, zero);
      out.terms.push_back(term);
      continue;
    }

    Vec3 lo, hi;
    grid.cell_chart_box(c, lo, hi);
    Vec3 cell_ext{0, 0, 0};
    for (int a = 0; a < axes; ++a) cell_ext[a] = hi[a] - lo[a];
    Vec3 chart_center = grid.cell_chart_center(c);
    Vec3 cpart = chart_partials(dom, chart_center, {cg.grad[0], cg.grad[1], cg.grad[2]});
    double cell_range = 0;
    for (int a = 0; a < axes; ++a) cell_range += std::abs(cpart[a]) * cell_ext[a];

    bool band = std::abs(cg.value) < 2.0 * eps_max + 6.0 * cell_range;
    if (!band) {
      BandTerm term;
      term.mass = grid.cell_weight(c);
      term.m0 = cg.value;
      term.half_range = 0.5 * cell_range;
      fill_term(term, chart_center, center, cg, cpart);
      out.terms.push_back(term);
      continue;
    }

    // Band cell: supersample on a shared corner lattice. Each subcell's mask
    // range comes from its corner values, so consecutive ranges tile the mask
    // axis without the gap/overlap defects a per-subcell linearization leaves
    // right at the clip.
    const int nodes = s + 1;
    std::array<int, 3> ncorner{1, 1, 1};
    long total_nodes = 1;
    for (int a = 0; a < axes; ++a) {
      ncorner[a] = nodes;
      total_nodes *= nodes;
    }
    std::vector<double> corner(total_nodes);
    for (long u = 0; u < total_nodes; ++u) {
      long rem = u;
      Vec3 nchart{0, 0, 0};
      for (int a = 0; a < axes; ++a) {
        long idx = rem % ncorner[a];
        rem /= ncorner[a];
        nchart[a] = lo[a] + cell_ext[a] * idx / s;
      }
      Vec3 np = grid.ambient_from_chart(nchart);
      corner[u] = eval_value(mask, std::span<const double>(np.data(), adim));
    }
    auto corner_at = [&](const std::array<int, 3>& idx) {
      long u = 0;
      for (int a = axes - 1; a >= 0; --a) u = u * ncorner[a] + idx[a];
      return corner[u];
    };

    double obs_lo = std::numeric_limits<double>::infinity();
    double obs_hi = -std::numeric_limits<double>::infinity();
    long nsub = 1;
    for (int a = 0; a < axes; ++a) nsub *= s;
    for (long u = 0; u < nsub; ++u) {
      long rem = u;
      Vec3 slo = lo, shi = hi, schart{0, 0, 0};
      std::array<int, 3> sidx{0, 0, 0};
      for (int a = 0; a < axes; ++a) {
        int idx = static_cast<int>(rem % s);
        rem /= s;
        sidx[a] = idx;
        double w = cell_ext[a] / s;
        slo[a] = lo[a] + idx * w;
        shi[a] = slo[a] + w;
        schart[a] = slo[a] + 0.5 * w;
      }
      double vmin = std::numeric_limits<double>::infinity();
      double vmax = -std::numeric_limits<double>::infinity();
      const int corners2d = axes == 3 ? 8 : 4;
      for (int cc = 0; cc < corners2d; ++cc) {
        std::array<int, 3> idx = sidx;
        for (int a = 0; a < axes; ++a)
          if (cc & (1 << a)) ++idx[a];
        double v = corner_at(idx);
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
      }
      BandTerm term;
      term.mass = grid.box_weight(slo, shi);
      term.m0 = 0.5 * (vmin + vmax);
      term.half_range = 0.5 * (vmax - vmin);
      if (out.kind == Kind::inverse_field) {
        term.p0 = term.m0;
        term.slope = 1.0;
      } else {
        Vec3 sp = grid.ambient_from_chart(schart);
        ValueGrad mg = grad_of(mask, sp);
        Vec3 mpart = chart_partials(dom, schart, {mg.grad[0], mg.grad[1], mg.grad[2]});
        fill_term(term, schart, sp, mg, mpart);
        // Re-anchor the integrand parameter at the corner-based midpoint.
        term.p0 += term.slope * (term.m0 - mg.value);
      }
      obs_lo = std::min(obs_lo, term.m0 - term.half_range);
      obs_hi = std::max(obs_hi, term.m0 + term.half_range);
      out.terms.push_back(term);
    }
    if (std::abs(cg.value) < 2.0 * eps_max + cell_range)
      out.max_nonlinearity =
          std::max(out.max_nonlinearity, std::abs((obs_hi - obs_lo) - cell_range));
  }
  return out;
}

// Integral of the modeled integrand over one clipped mask interval [a,b]
// (which never straddles zero of the mask).
inline double piece_integral(const RegSamples& s, const BandTerm& t, double a, double b) {
  switch (s.kind) {
    case Kind::inverse_field:
      return std::log(std::abs(b)) - std::log(std::abs(a));
    case Kind::cutoff: {
      double da = t.p0 + t.slope * (a - t.m0);
      double db = t.p0 + t.slope * (b - t.m0);
      if (t.slope == 0.0) return t.p0 == 0.0 ? 0.0 : (b - a) / t.p0;
      return (std::log(std::abs(db)) - std::log(std::abs(da))) / t.slope;
    }
    case Kind::deformation: {
      double c0 = t.p0 - t.slope * t.m0;
      return t.slope * (std::log(std::abs(b)) - std::log(std::abs(a))) +
             c0 * (1.0 / a - 1.0 / b);
    }
  }
  return 0.0;
}

inline double masked_integral(const RegSamples& s, double eps) {
  double sum = 0.0;
  for (const BandTerm& t : s.terms) {
    if (t.half_range == 0.0) {
      if (std::abs(t.m0) >= eps && t.m0 != 0.0) {
        switch (s.kind) {
          case Kind::inverse_field: sum += t.mass / t.m0; break;
          case Kind::cutoff: if (t.p0 != 0.0) sum += t.mass / t.p0; break;
          case Kind::deformation: sum += t.mass * t.p0 / (t.m0 * t.m0); break;
        }
      }
      continue;
    }
    double lo = t.m0 - t.half_range, hi = t.m0 + t.half_range;
    double acc = 0.0;
    if (lo < -eps) acc += piece_integral(s, t, lo, std::min(hi, -eps));
    if (hi > eps) acc += piece_integral(s, t, std::max(lo, eps), hi);
    sum += t.mass / (2.0 * t.half_range) * acc;
  }
  return sum;
}

inline VolumeResult extrapolate(const RegSamples& samples, std::span<const double> eps,
                                double nonconv_tol) {
  if (eps.size() < 2)
    throw ValidationError("the epsilon schedule needs at least two entries");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (eps[i] <= 0.0)
      throw ValidationError("epsilon schedule entries must be positive");
    if (i > 0 && eps[i] >= eps[i - 1])
      throw ValidationError("epsilon schedule must be strictly decreasing");
  }
  double resolving = 3.0 * samples.max_nonlinearity;
  if (eps.back() <= resolving)
    throw ScheduleTooFine("smallest epsilon " + std::to_string(eps.back()) +
                          " is below the grid's resolving power " +
                          std::to_string(resolving) + "; refine the grid or raise epsilon");

  VolumeResult res;
  res.diag.eps.assign(eps.begin(), eps.end());
  res.diag.integral.reserve(eps.size());
  for (double e : eps) res.diag.integral.push_back(masked_integral(samples, e));

  auto pair_value = [&](std::size_t i, std::size_t j) {
    double e1 = eps[i], e2 = eps[j];
    double i1 = res.diag.integral[i], i2 = res.diag.integral[j];
    return (e1 * i2 - e2 * i1) / (e1 - e2);
  };
  std::size_t n = eps.size();
  res.value = pair_value(n - 2, n - 1);
  if (!std::isfinite(res.value))
    throw NonConvergent("the extrapolated volume is not finite");
  res.diag.slope =
      (res.diag.integral[n - 2] - res.diag.integral[n - 1]) / (eps[n - 2] - eps[n - 1]);
  if (n >= 3) {
    res.diag.value_prev_pair = pair_value(n - 3, n - 2);
    if (std::abs(res.value - res.diag.value_prev_pair) > nonconv_tol)
      throw NonConvergent("extrapolations from the last two epsilon pairs differ by " +
                          std::to_string(std::abs(res.value - res.diag.value_prev_pair)) +
                          " (tolerance " + std::to_string(nonconv_tol) + ")");
  }
  res.diag.monotone = std::abs(res.diag.integral[n - 1] - res.value) <=
                      std::abs(res.diag.integral[n - 2] - res.value) + nonconv_tol;
  return res;
}

}  // namespace reg_detail

// Largest |f| over cell centers; epsilon schedules default to a fixed
// fraction of this scale.
inline double field_scale(const NambuField& field, const QuadGrid& grid) {
  double scale = 0;
  for (long c = 0; c < grid.cell_count(); ++c)
    scale = std::max(scale, std::abs(field_value(field, grid.cell_center(c))));
  return scale;
}

inline std::vector<double> default_eps_schedule(const NambuField& field,
                                                const QuadGrid& grid) {
  double scale = field_scale(field, grid);
  if (scale == 0.0)
    throw ValidationError("f vanishes identically; no epsilon scale exists");
  return {0.1 * scale, 0.05 * scale, 0.025 * scale};
}

inline VolumeResult regularized_volume(const NambuField& field, const QuadGrid& grid,
                                       std::span<const double> eps,
                                       double nonconv_tol = 1e-2) {
  auto samples = reg_detail::build_samples(field, grid, nullptr, nullptr,
                                           eps.empty() ? 0.0 : eps.front());
  return reg_detail::extrapolate(samples, eps, nonconv_tol);
}

inline VolumeResult volume_with_cutoff(const NambuField& field, const QuadGrid& grid,
                                       const Expression& h, std::span<const double> eps,
                                       double nonconv_tol = 1e-2) {
  if (eps.empty()) throw ValidationError("the epsilon schedule needs at least two entries");
  const Domain& dom = field.domain;
  const int adim = dom.ambient_dim();
  const int axes = dom.manifold_dim();
  double eps_max = eps.front();
  // The cutoff must vanish exactly where f does. On any cell whose center
  // value exceeds the cell's own variation the sign is that of the whole
  // cell, so a sign disagreement on a cell bounded away from both zero sets
  // is a genuine mismatch.
  bool h_nonzero = false;
  for (long c = 0; c < grid.cell_count(); ++c) {
    Vec3 p = grid.cell_center(c);
    ValueGrad fg = field_value_grad(field, p);
    ValueGrad hg = eval_with_gradient(h, std::span<const double>(p.data(), adim));
    h_nonzero = h_nonzero || hg.value != 0.0;
    if ((fg.value > 0.0) == (hg.value > 0.0)) continue;
    if (grid.is_cap(c))
      throw CutoffMismatch("cutoff's zero set differs from f's at grid resolution");
    Vec3 lo, hi;
    grid.cell_chart_box(c, lo, hi);
    Vec3 chart = grid.cell_chart_center(c);
    Vec3 fp = chart_partials(dom, chart, {fg.grad[0], fg.grad[1], fg.grad[2]});
    Vec3 hp = chart_partials(dom, chart, {hg.grad[0], hg.grad[1], hg.grad[2]});
    double range_f = 0, range_h = 0;
    for (int a = 0; a < axes; ++a) {
      range_f += std::abs(fp[a]) * (hi[a] - lo[a]);
      range_h += std::abs(hp[a]) * (hi[a] - lo[a]);
    }
    if (std::abs(fg.value) > 3.0 * range_f && std::abs(hg.value) > 3.0 * range_h)
      throw CutoffMismatch("cutoff's zero set differs from f's at grid resolution");
  }
  if (!h_nonzero) throw CutoffMismatch("cutoff vanishes identically");
  auto samples = reg_detail::build_samples(field, grid, &h, nullptr, eps_max);
  return reg_detail::extrapolate(samples, eps, nonconv_tol);
}

// Hausdorff-style distance between two components, via sampled vertices.
namespace reg_detail {
inline double component_distance(const Domain& dom, const ZeroComponent& a,
                                 const ZeroComponent& b) {
  auto dist = [&](const Vec3& p, const Vec3& q) {
    if (dom.kind == DomainKind::sphere2) {
      Vec3 d{p[0] - q[0], p[1] - q[1], p[2] - q[2]};
      return norm3(d);
    }
    return norm3(locus_detail::torus_displacement(p, q, dom.ambient_dim()));
  };
  auto one_sided = [&](const ZeroComponent& from, const ZeroComponent& to) {
    double worst = 0;
    std::size_t stride = std::max<std::size_t>(1, from.vertices.size() / 256);
    for (std::size_t i = 0; i < from.vertices.size(); i += stride) {
      double best = std::numeric_limits<double>::infinity();
      for (const ZeroVertex& v : to.vertices)
        best = std::min(best, dist(from.vertices[i].pos, v.pos));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}
}  // namespace reg_detail

// Coordinates of theta relative to base: per-component period ratios and the
// regularized integral of (theta/f) against the dual volume of base.
inline DeformationCoordinates deformation_coordinates(const NambuField& base,
                                                      const NambuField& theta,
                                                      const QuadGrid& grid,
                                                      std::span<const double> eps,
                                                      double nonconv_tol = 1e-2,
                                                      double delta_t_factor = 1e-4) {
  if (base.domain.kind != theta.domain.kind)
    throw DomainMismatch("base and theta live on different domains");
  ExtractResult base_ext = extract(base, grid, {delta_t_factor});
  ExtractResult theta_ext;
  try {
    theta_ext = extract(theta, grid, {delta_t_factor});
  } catch (const NotGeneric& e) {
    throw NotGenericTheta(std::string("theta is not generic near the zero locus: ") +
                          e.what());
  }
  if (base_ext.components.size() != theta_ext.components.size())
    throw LocusMismatch("theta has " + std::to_string(theta_ext.components.size()) +
                        " zero components, base has " +
                        std::to_string(base_ext.components.size()));

  const Domain& dom = base.domain;
  Vec3 ext{0, 0, 0};
  if (dom.kind == DomainKind::sphere2) {
    ext = {grid.dtheta, grid.dphi, 0.0};
  } else {
    for (int a = 0; a < dom.manifold_dim(); ++a) ext[a] = 1.0 / grid.res[a];
  }
  double cell_diam = norm3(ext);

  std::vector<int> match(base_ext.components.size(), -1);
  std::vector<char> used(theta_ext.components.size(), 0);
  for (std::size_t i = 0; i < base_ext.components.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int best_j = -1;
    for (std::size_t j = 0; j < theta_ext.components.size(); ++j) {
      double d = reg_detail::component_distance(dom, base_ext.components[i],
                                                theta_ext.components[j]);
      if (d < best) {
        best = d;
        best_j = static_cast<int>(j);
      }
    }
    if (best_j < 0 || best > cell_diam || used[best_j])
      throw LocusMismatch("zero loci of base and theta do not match within one cell");
    used[best_j] = 1;
    match[i] = best_j;
  }

  DeformationCoordinates dc;
  dc.c.reserve(base_ext.components.size());
  for (std::size_t i = 0; i < base_ext.components.size(); ++i) {
    double tb = modular_period(base, base_ext.components[i]).period;
    double tt = modular_period(theta, theta_ext.components[match[i]]).period;
    dc.c.push_back(tb / tt);
  }
  auto samples = reg_detail::build_samples(base, grid, nullptr, &theta.f,
                                           eps.empty() ? 0.0 : eps.front());
  dc.v_rel = reg_detail::extrapolate(samples, eps, nonconv_tol).value;
  return dc;
}

// Dimension and generators of the deformation cohomology: one collar bump
// per zero component plus a volume form.
inline std::pair<int, std::vector<std::string>> h2_report(
    const NambuField&, const std::vector<ZeroComponent>& comps) {
  std::vector<std::string> gens;
  gens.reserve(comps.size() + 1);
  for (const auto& c : comps)
    gens.push_back("collar_bump(component " + std::to_string(c.id) +
                   ") * linearized_field");
  gens.push_back("volume_form");
  return {static_cast<int>(comps.size()) + 1, gens};
}

// ---------------------------------------------------------------------------
// Assembled per-scenario report.

struct RegionSummary {
  std::vector<int> signs;
  std::vector<RegionMap::Adjacency> adjacency;
  std::vector<long> cell_counts;
};

struct InvariantReport {
  DomainKind domain = DomainKind::sphere2;
  std::array<int, 3> resolution{0, 0, 0};
  std::string field_text;
  double delta_t = 0;
  std::vector<ModularData> components;
  std::vector<double> component_measures;
  std::vector<double> component_min_grads;
  RegionSummary regions;
  std::vector<double> eps_schedule;
  double volume = 0;
  VolumeDiagnostics volume_diag;
  int h2_dimension = 1;
  std::vector<std::string> h2_generators;
};

inline InvariantReport build_invariant_report(const NambuField& field,
                                              const QuadGrid& grid,
                                              const ExtractResult& ext,
                                              const RegionMap& rm,
                                              std::span<const double> eps,
                                              double nonconv_tol = 1e-2) {
  InvariantReport rep;
  rep.domain = field.domain.kind;
  rep.resolution = grid.res;
  rep.field_text = to_string(field.f);
  rep.delta_t = ext.delta_t;
  for (const auto& comp : ext.components) {
    rep.components.push_back(modular_period(field, comp));
    rep.component_measures.push_back(comp.total_measure);
    rep.component_min_grads.push_back(comp.min_grad);
  }
  rep.regions.signs = rm.region_signs;
  rep.regions.adjacency = rm.adjacency;
  rep.regions.cell_counts.assign(rm.region_signs.size(), 0);
  for (int r : rm.region_of_cell)
    if (r >= 0) ++rep.regions.cell_counts[r];
  rep.eps_schedule.assign(eps.begin(), eps.end());
  VolumeResult v = regularized_volume(field, grid, eps, nonconv_tol);
  rep.volume = v.value;
  rep.volume_diag = v.diag;
  auto [dim, gens] = h2_report(field, ext.components);
  rep.h2_dimension = dim;
  rep.h2_generators = std::move(gens);
  return rep;
}

}  // namespace nambu
