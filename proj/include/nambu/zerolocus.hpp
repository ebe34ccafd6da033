#pragma once

// Zero locus extraction: marching squares (flat torus / sphere chart band)
// and marching cubes (periodic 3-torus) at the zero level, with linear root
// interpolation, periodic stitching by shared-edge identity, genericity
// checks, and region decomposition of the complement.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "nambu/errors.hpp"
#include "nambu/field.hpp"
#include "nambu/geometry.hpp"
#include "nambu/mc_tables.hpp"

namespace nambu {

struct ZeroVertex {
  Vec3 pos{0, 0, 0};    // ambient coordinates
  double grad_norm = 0; // |grad f| tangential to the domain
  double weight = 0;    // share of the (n-1)-measure attached to the vertex
};

struct ZeroComponent {
  int id = 0;
  int element_dim = 1;  // 1 = closed polyline, 2 = closed triangle mesh
  std::vector<ZeroVertex> vertices;
  // Curves: segment i joins vertices i -> (i+1) mod n (cyclically closed).
  // Surfaces: triangles index into vertices.
  std::vector<std::array<int, 3>> triangles;
  std::vector<double> element_measure;
  std::vector<long> element_cell;  // grid cell that produced each element
  double min_grad = 0;
  double total_measure = 0;
  bool orientation_flipped = false;
};

struct RegionMap {
  std::vector<int> region_of_cell;  // -1 for band (cut) cells
  std::vector<int> region_signs;    // +1 / -1 per region
  struct Adjacency {
    int positive_region = -1;
    int negative_region = -1;
    int component = -1;
  };
  std::vector<Adjacency> adjacency;  // one entry per zero component
  int region_count() const { return static_cast<int>(region_signs.size()); }
};

struct ExtractOptions {
  double delta_t_factor = 1e-4;
};

struct ExtractResult {
  std::vector<ZeroComponent> components;
  double delta_t = 0;
};

namespace locus_detail {

inline double crossing(double va, double vb) { return va / (va - vb); }

inline Vec3 torus_displacement(const Vec3& a, const Vec3& b, int dim) {
  Vec3 d{0, 0, 0};
  for (int i = 0; i < dim; ++i) d[i] = torus_delta(a[i], b[i]);
  return d;
}

// Midpoint of an element edge/face, kept on the manifold.
inline Vec3 segment_midpoint(const Domain& dom, const Vec3& a, const Vec3& b) {
  if (dom.kind == DomainKind::sphere2) {
    Vec3 m{a[0] + b[0], a[1] + b[1], a[2] + b[2]};
    double n = norm3(m);
    if (n == 0.0) return a;
    return {m[0] / n, m[1] / n, m[2] / n};
  }
  Vec3 d = torus_displacement(b, a, dom.ambient_dim());
  Vec3 m{0, 0, 0};
  for (int i = 0; i < dom.ambient_dim(); ++i) m[i] = wrap01(a[i] + 0.5 * d[i]);
  return m;
}

inline double segment_length(const Domain& dom, const Vec3& a, const Vec3& b) {
  if (dom.kind == DomainKind::sphere2) {
    Vec3 d{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
    return norm3(d);
  }
  Vec3 d = torus_displacement(b, a, dom.ambient_dim());
  return norm3(d);
}

// ---------------------------------------------------------------------------
// 2-D marching squares over a logical (a,b) cell grid.
//
// Corner/edge layout per cell, with bit i of the case mask set when corner
// value i is positive:
//   c3 --T-- c2
//   |         |
//   L         R
//   |         |
//   c0 --B-- c1
// Segments are emitted directed so that the f > 0 side lies on the left of
// the travel direction; that orientation makes the modular density positive.
struct Grid2D {
  int na = 0, nb = 0;       // cell counts
  bool periodic_b = false;  // axis a is periodic in every model domain
  int node_rows() const { return periodic_b ? nb : nb + 1; }
  long node_id(int ia, int ib) const {
    ia = (ia % na + na) % na;
    if (periodic_b) ib = (ib % nb + nb) % nb;
    return static_cast<long>(ib) * na + ia;
  }
  // Edges anchored at their low-corner node; bit 0 distinguishes the two
  // directions (0 = along a, 1 = along b).
  long h_edge(int ia, int ib) const { return 2 * node_id(ia, ib); }
  long v_edge(int ia, int ib) const { return 2 * node_id(ia, ib) + 1; }
};

enum CellEdge { EB = 0, ER = 1, ET = 2, EL = 3 };

struct SegmentRule {
  int n = 0;
  std::array<std::array<int, 2>, 2> seg{};  // (from edge, to edge)
};

// Cases 5 and 10 are ambiguous; the caller resolves them with the sign of f
// at the cell center (asymptotic decider) before lookup.
inline SegmentRule squares_rule(int mask, bool center_positive) {
  switch (mask) {
    case 1: return {1, {{{EB, EL}}}};
    case 2: return {1, {{{ER, EB}}}};
    case 3: return {1, {{{ER, EL}}}};
    case 4: return {1, {{{ET, ER}}}};
    case 5:
      if (center_positive) return {2, {{{ET, EL}, {EB, ER}}}};
      return {2, {{{EB, EL}, {ET, ER}}}};
    case 6: return {1, {{{ET, EB}}}};
    case 7: return {1, {{{ET, EL}}}};
    case 8: return {1, {{{EL, ET}}}};
    case 9: return {1, {{{EB, ET}}}};
    case 10:
      if (center_positive) return {2, {{{EL, EB}, {ER, ET}}}};
      return {2, {{{ER, EB}, {EL, ET}}}};
    case 11: return {1, {{{ER, ET}}}};
    case 12: return {1, {{{EL, ER}}}};
    case 13: return {1, {{{EB, ER}}}};
    case 14: return {1, {{{EL, EB}}}};
    default: return {0, {}};
  }
}

struct RawVertex {
  Vec3 pos;
  double grad_norm;
  Vec3 int_grad;  // tangential gradient at the vertex
};

struct RawSegment {
  int from = -1, to = -1;
  long cell = -1;
};

struct Curves {
  std::vector<RawVertex> verts;
  std::vector<RawSegment> segs;
};

}  // namespace locus_detail

inline double transversality_floor(const NambuField& field, const QuadGrid& grid,
                                   double factor) {
  const Domain& dom = field.domain;
  double max_grad = 0.0;
  auto consider = [&](const Vec3& p) {
    ValueGrad vg = field_value_grad(field, p);
    Vec3 g{vg.grad[0], vg.grad[1], vg.grad[2]};
    TangentData t = intrinsic_gradient(dom, p, g);
    max_grad = std::max(max_grad, t.norm);
  };
  if (dom.kind == DomainKind::torus3) {
    for (int k = 0; k < grid.res[2]; ++k)
      for (int j = 0; j < grid.res[1]; ++j)
        for (int i = 0; i < grid.res[0]; ++i)
          consider({double(i) / grid.res[0], double(j) / grid.res[1],
                    double(k) / grid.res[2]});
  } else if (dom.kind == DomainKind::torus2) {
    for (int j = 0; j < grid.res[1]; ++j)
      for (int i = 0; i < grid.res[0]; ++i)
        consider({double(i) / grid.res[0], double(j) / grid.res[1], 0.0});
  } else {
    for (int jb = 0; jb <= grid.res[0]; ++jb)
      for (int ia = 0; ia < grid.res[1]; ++ia)
        consider(grid.ambient_from_chart(
            {grid.theta_cap + jb * grid.dtheta, ia * grid.dphi, 0.0}));
    consider({0.0, 0.0, 1.0});
    consider({0.0, 0.0, -1.0});
  }
  return factor * max_grad;
}

namespace locus_detail {

inline std::vector<ZeroComponent> assemble_curves(const Domain& dom, Curves& raw) {
  // Every crossing vertex must be entered and left exactly once; cycles are
  // then walked in deterministic segment order.
  std::vector<int> out_seg(raw.verts.size(), -1), in_count(raw.verts.size(), 0);
  for (std::size_t s = 0; s < raw.segs.size(); ++s) {
    if (out_seg[raw.segs[s].from] != -1)
      throw Error("marching squares produced a branching contour");
    out_seg[raw.segs[s].from] = static_cast<int>(s);
    ++in_count[raw.segs[s].to];
  }
  for (std::size_t v = 0; v < raw.verts.size(); ++v)
    if (out_seg[v] == -1 || in_count[v] != 1)
      throw Error("marching squares produced an open contour");

  std::vector<ZeroComponent> comps;
  std::vector<char> seen(raw.segs.size(), 0);
  for (std::size_t s0 = 0; s0 < raw.segs.size(); ++s0) {
    if (seen[s0]) continue;
    ZeroComponent comp;
    comp.element_dim = 1;
    comp.id = static_cast<int>(comps.size());
    std::vector<int> order;        // vertex ids along the cycle
    std::vector<long> cells;
    int s = static_cast<int>(s0);
    while (!seen[s]) {
      seen[s] = 1;
      order.push_back(raw.segs[s].from);
      cells.push_back(raw.segs[s].cell);
      s = out_seg[raw.segs[s].to];
    }
    const int m = static_cast<int>(order.size());

    // Orientation check: the emitted direction should keep f > 0 on the
    // left; flip the cycle if the signed test disagrees.
    double signed_total = 0.0;
    std::vector<double> lengths(m, 0.0);
    for (int i = 0; i < m; ++i) {
      const RawVertex& a = raw.verts[order[i]];
      const RawVertex& b = raw.verts[order[(i + 1) % m]];
      lengths[i] = segment_length(dom, a.pos, b.pos);
      if (lengths[i] == 0.0) continue;
      if (dom.kind == DomainKind::sphere2) {
        Vec3 d{b.pos[0] - a.pos[0], b.pos[1] - a.pos[1], b.pos[2] - a.pos[2]};
        Vec3 mid = segment_midpoint(dom, a.pos, b.pos);
        Vec3 left = cross3(mid, d);
        Vec3 g = a.int_grad;
        signed_total += dot3(left, g) / lengths[i];
      } else {
        Vec3 d = torus_displacement(b.pos, a.pos, dom.ambient_dim());
        const Vec3& g = a.int_grad;
        signed_total += (-d[1] * g[0] + d[0] * g[1]) / lengths[i];
      }
    }
    bool flip = signed_total < 0.0;
    comp.orientation_flipped = flip;

    std::vector<int> final_order(m);
    std::vector<long> final_cells(m);
    std::vector<double> final_lengths(m);
    if (!flip) {
      final_order = order;
      final_cells = cells;
      final_lengths = lengths;
    } else {
      for (int i = 0; i < m; ++i) final_order[i] = order[(m - i) % m];
      for (int i = 0; i < m; ++i) {
        final_cells[i] = cells[(m - i - 1 + m) % m];
        final_lengths[i] = lengths[(m - i - 1 + m) % m];
      }
    }

    comp.vertices.reserve(m);
    comp.min_grad = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      const RawVertex& rv = raw.verts[final_order[i]];
      ZeroVertex zv;
      zv.pos = rv.pos;
      zv.grad_norm = rv.grad_norm;
      zv.weight = 0.5 * (final_lengths[i] + final_lengths[(i - 1 + m) % m]);
      comp.min_grad = std::min(comp.min_grad, rv.grad_norm);
      comp.vertices.push_back(zv);
    }
    comp.element_measure = final_lengths;
    comp.element_cell = final_cells;
    comp.total_measure = 0.0;
    for (double l : final_lengths) comp.total_measure += l;
    comps.push_back(std::move(comp));
  }
  return comps;
}

inline std::vector<ZeroComponent> extract_curves(const NambuField& field,
                                                 const QuadGrid& grid,
                                                 double delta_t) {
  const Domain& dom = field.domain;
  const bool sphere = dom.kind == DomainKind::sphere2;
  Grid2D lg;
  if (sphere) {
    lg.na = grid.res[1];  // phi
    lg.nb = grid.res[0];  // theta rows
    lg.periodic_b = false;
  } else {
    lg.na = grid.res[0];
    lg.nb = grid.res[1];
    lg.periodic_b = true;
  }

  auto node_chart = [&](double ia, double ib) -> Vec3 {
    if (sphere) return {grid.theta_cap + ib * grid.dtheta, ia * grid.dphi, 0.0};
    return {ia / lg.na, ib / lg.nb, 0.0};
  };
  auto cell_of = [&](int ia, int ib) -> long {
    if (sphere) return static_cast<long>(ib) * lg.na + ia;
    return static_cast<long>(ib) * lg.na + ia;
  };

  // Sample f on the node lattice.
  const int rows = lg.node_rows();
  std::vector<double> value(static_cast<std::size_t>(rows) * lg.na);
  for (int ib = 0; ib < rows; ++ib)
    for (int ia = 0; ia < lg.na; ++ia)
      value[static_cast<std::size_t>(ib) * lg.na + ia] =
          field_value(field, grid.ambient_from_chart(node_chart(ia, ib)));

  if (sphere) {
    double fn = field_value(field, {0.0, 0.0, 1.0});
    double fs = field_value(field, {0.0, 0.0, -1.0});
    if (std::abs(fn) <= delta_t || std::abs(fs) <= delta_t)
      throw PoleViolation("|f| at a pole is below the transversality floor " +
                          std::to_string(delta_t) +
                          "; rotate the scenario away from the poles");
    for (int ia = 0; ia < lg.na; ++ia) {
      if ((value[ia] > 0.0) != (fn > 0.0) ||
          (value[static_cast<std::size_t>(rows - 1) * lg.na + ia] > 0.0) != (fs > 0.0))
        throw PoleViolation(
            "the zero locus enters a polar cap; rotate the scenario away from the poles");
    }
  }

  Curves raw;
  std::unordered_map<long, int> vertex_of_edge;
  vertex_of_edge.reserve(1024);

  auto vertex_at = [&](long edge_key, double ia, double ib) -> int {
    auto it = vertex_of_edge.find(edge_key);
    if (it != vertex_of_edge.end()) return it->second;
    RawVertex rv;
    rv.pos = grid.ambient_from_chart(node_chart(ia, ib));
    ValueGrad vg = field_value_grad(field, rv.pos);
    Vec3 g{vg.grad[0], vg.grad[1], vg.grad[2]};
    TangentData t = intrinsic_gradient(dom, rv.pos, g);
    rv.grad_norm = t.norm;
    rv.int_grad = t.tangential;
    int id = static_cast<int>(raw.verts.size());
    raw.verts.push_back(rv);
    vertex_of_edge.emplace(edge_key, id);
    return id;
  };

  for (int ib = 0; ib < lg.nb; ++ib) {
    for (int ia = 0; ia < lg.na; ++ia) {
      double v0 = value[lg.node_id(ia, ib)];
      double v1 = value[lg.node_id(ia + 1, ib)];
      double v2 = value[lg.node_id(ia + 1, ib + 1)];
      double v3 = value[lg.node_id(ia, ib + 1)];
      int mask = (v0 > 0 ? 1 : 0) | (v1 > 0 ? 2 : 0) | (v2 > 0 ? 4 : 0) | (v3 > 0 ? 8 : 0);
      if (mask == 0 || mask == 15) continue;
      bool center_positive = false;
      if (mask == 5 || mask == 10) {
        Vec3 cc = sphere ? Vec3{grid.theta_cap + (ib + 0.5) * grid.dtheta,
                                (ia + 0.5) * grid.dphi, 0.0}
                         : Vec3{(ia + 0.5) / lg.na, (ib + 0.5) / lg.nb, 0.0};
        center_positive = field_value(field, grid.ambient_from_chart(cc)) > 0.0;
      }
      SegmentRule rule = squares_rule(mask, center_positive);
      auto edge_vertex = [&](int which) -> int {
        switch (which) {
          case EB: return vertex_at(lg.h_edge(ia, ib), ia + crossing(v0, v1), ib);
          case ER: return vertex_at(lg.v_edge(ia + 1, ib), ia + 1.0, ib + crossing(v1, v2));
          case ET: return vertex_at(lg.h_edge(ia, ib + 1), ia + crossing(v3, v2), ib + 1.0);
          default: return vertex_at(lg.v_edge(ia, ib), ia, ib + crossing(v0, v3));
        }
      };
      for (int s = 0; s < rule.n; ++s) {
        RawSegment seg;
        seg.from = edge_vertex(rule.seg[s][0]);
        seg.to = edge_vertex(rule.seg[s][1]);
        seg.cell = cell_of(ia, ib);
        raw.segs.push_back(seg);
      }
    }
  }
  return assemble_curves(dom, raw);
}

// ---------------------------------------------------------------------------
// Periodic marching cubes on the 3-torus.

struct CubeEdge {
  int ca, cb;   // corner indices
  int anchor;   // corner at the lexicographically lower node
  int axis;
};

inline constexpr std::array<CubeEdge, 12> cube_edges{{
    {0, 1, 0, 0}, {1, 2, 1, 1}, {2, 3, 3, 0}, {3, 0, 0, 1},
    {4, 5, 4, 0}, {5, 6, 5, 1}, {6, 7, 7, 0}, {7, 4, 4, 1},
    {0, 4, 0, 2}, {1, 5, 1, 2}, {2, 6, 2, 2}, {3, 7, 3, 2},
}};

inline constexpr int cube_corner_offset[8][3] = {
    {0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
    {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1},
};

struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(int n) : parent(n) {
    for (int i = 0; i < n; ++i) parent[i] = i;
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

inline std::vector<ZeroComponent> extract_surfaces(const NambuField& field,
                                                   const QuadGrid& grid) {
  const int nx = grid.res[0], ny = grid.res[1], nz = grid.res[2];
  auto node_index = [&](int i, int j, int k) -> long {
    i = (i % nx + nx) % nx;
    j = (j % ny + ny) % ny;
    k = (k % nz + nz) % nz;
    return (static_cast<long>(k) * ny + j) * nx + i;
  };
  std::vector<double> value(static_cast<std::size_t>(nx) * ny * nz);
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        value[node_index(i, j, k)] =
            field_value(field, {double(i) / nx, double(j) / ny, double(k) / nz});

  struct MeshVertex {
    Vec3 pos;
    double grad_norm;
    Vec3 grad;
  };
  std::vector<MeshVertex> verts;
  std::vector<std::array<int, 3>> tris;
  std::vector<long> tri_cell;
  std::unordered_map<long, int> vertex_of_edge;
  vertex_of_edge.reserve(4096);

  auto vertex_on = [&](int i, int j, int k, int axis, double va, double vb) -> int {
    long key = node_index(i, j, k) * 3 + axis;
    auto it = vertex_of_edge.find(key);
    if (it != vertex_of_edge.end()) return it->second;
    double t = crossing(va, vb);
    Vec3 p{double(i), double(j), double(k)};
    p[axis] += t;
    Vec3 pos{wrap01(p[0] / nx), wrap01(p[1] / ny), wrap01(p[2] / nz)};
    ValueGrad vg = field_value_grad(field, pos);
    MeshVertex mv;
    mv.pos = pos;
    mv.grad = {vg.grad[0], vg.grad[1], vg.grad[2]};
    mv.grad_norm = norm3(mv.grad);
    int id = static_cast<int>(verts.size());
    verts.push_back(mv);
    vertex_of_edge.emplace(key, id);
    return id;
  };

  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        double corner[8];
        int cubeindex = 0;
        for (int c = 0; c < 8; ++c) {
          corner[c] = value[node_index(i + cube_corner_offset[c][0],
                                       j + cube_corner_offset[c][1],
                                       k + cube_corner_offset[c][2])];
          if (corner[c] > 0.0) cubeindex |= 1 << c;
        }
        if (mc::cube_edge_table[cubeindex] == 0) continue;
        int edge_vertex[12];
        for (int e = 0; e < 12; ++e) {
          if (!(mc::cube_edge_table[cubeindex] & (1 << e))) continue;
          const CubeEdge& ce = cube_edges[e];
          // Interpolate from the anchor corner so both incident cubes agree.
          int other = ce.anchor == ce.ca ? ce.cb : ce.ca;
          edge_vertex[e] = vertex_on(i + cube_corner_offset[ce.anchor][0],
                                     j + cube_corner_offset[ce.anchor][1],
                                     k + cube_corner_offset[ce.anchor][2],
                                     ce.axis, corner[ce.anchor], corner[other]);
        }
        const int* row = mc::cube_tri_table[cubeindex];
        long cell = (static_cast<long>(k) * ny + j) * nx + i;
        for (int t = 0; row[t] != -1; t += 3) {
          std::array<int, 3> tri{edge_vertex[row[t]], edge_vertex[row[t + 1]],
                                 edge_vertex[row[t + 2]]};
          if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) continue;
          tris.push_back(tri);
          tri_cell.push_back(cell);
        }
      }
    }
  }

  // Split into connected components.
  DisjointSet ds(static_cast<int>(verts.size()));
  for (const auto& t : tris) {
    ds.unite(t[0], t[1]);
    ds.unite(t[1], t[2]);
  }
  std::map<int, int> comp_of_root;
  std::vector<ZeroComponent> comps;
  std::vector<std::vector<int>> comp_tris;
  for (std::size_t t = 0; t < tris.size(); ++t) {
    int root = ds.find(tris[t][0]);
    auto [it, inserted] = comp_of_root.emplace(root, static_cast<int>(comps.size()));
    if (inserted) {
      ZeroComponent c;
      c.id = static_cast<int>(comps.size());
      c.element_dim = 2;
      comps.push_back(std::move(c));
      comp_tris.emplace_back();
    }
    comp_tris[it->second].push_back(static_cast<int>(t));
  }

  for (std::size_t ci = 0; ci < comps.size(); ++ci) {
    ZeroComponent& comp = comps[ci];
    std::unordered_map<int, int> local;
    auto local_id = [&](int global) -> int {
      auto [it, inserted] = local.emplace(global, static_cast<int>(comp.vertices.size()));
      if (inserted) {
        ZeroVertex zv;
        zv.pos = verts[global].pos;
        zv.grad_norm = verts[global].grad_norm;
        zv.weight = 0.0;
        comp.vertices.push_back(zv);
      }
      return it->second;
    };
    double signed_total = 0.0;
    for (int t : comp_tris[ci]) {
      std::array<int, 3> g = tris[t];
      std::array<int, 3> l{local_id(g[0]), local_id(g[1]), local_id(g[2])};
      const Vec3& p0 = verts[g[0]].pos;
      Vec3 e1 = torus_displacement(verts[g[1]].pos, p0, 3);
      Vec3 e2 = torus_displacement(verts[g[2]].pos, p0, 3);
      Vec3 nrm = cross3(e1, e2);
      double area = 0.5 * norm3(nrm);
      Vec3 centroid{wrap01(p0[0] + (e1[0] + e2[0]) / 3.0),
                    wrap01(p0[1] + (e1[1] + e2[1]) / 3.0),
                    wrap01(p0[2] + (e1[2] + e2[2]) / 3.0)};
      ValueGrad vg = field_value_grad(field, centroid);
      signed_total += 0.5 * (nrm[0] * vg.grad[0] + nrm[1] * vg.grad[1] + nrm[2] * vg.grad[2]);
      comp.triangles.push_back(l);
      comp.element_measure.push_back(area);
      comp.element_cell.push_back(tri_cell[t]);
      for (int v : l) comp.vertices[v].weight += area / 3.0;
    }
    // Normalize so triangle normals point toward f > 0.
    comp.orientation_flipped = signed_total < 0.0;
    if (comp.orientation_flipped)
      for (auto& t : comp.triangles) std::swap(t[1], t[2]);

    comp.min_grad = std::numeric_limits<double>::infinity();
    comp.total_measure = 0.0;
    for (const ZeroVertex& v : comp.vertices)
      comp.min_grad = std::min(comp.min_grad, v.grad_norm);
    for (double a : comp.element_measure) comp.total_measure += a;

    // Boundarylessness: every mesh edge must be shared by exactly two
    // triangles.
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& t : comp.triangles) {
      for (int e = 0; e < 3; ++e) {
        int a = t[e], b = t[(e + 1) % 3];
        if (a > b) std::swap(a, b);
        ++edge_count[{a, b}];
      }
    }
    for (const auto& [e, n] : edge_count)
      if (n != 2)
        throw Error("marching cubes produced a mesh with boundary; the grid "
                    "cannot resolve this zero locus");
  }
  return comps;
}

}  // namespace locus_detail

// Extract all connected components of f^-1(0). An empty result is a valid
// outcome (nowhere-vanishing fields have no zero locus).
inline ExtractResult extract(const NambuField& field, const QuadGrid& grid,
                             const ExtractOptions& opts = {}) {
  if (field.domain.kind != grid.domain.kind)
    throw ValidationError("field and grid use different domains");
  ExtractResult res;
  res.delta_t = transversality_floor(field, grid, opts.delta_t_factor);
  if (field.domain.kind == DomainKind::torus3)
    res.components = locus_detail::extract_surfaces(field, grid);
  else
    res.components = locus_detail::extract_curves(field, grid, res.delta_t);
  for (auto& c : res.components) {
    if (c.min_grad <= res.delta_t)
      throw NotGeneric("component " + std::to_string(c.id) +
                       " has |grad f| = " + std::to_string(c.min_grad) +
                       " on the zero locus, at or below the transversality floor " +
                       std::to_string(res.delta_t));
  }
  return res;
}

// Decompose the complement of the zero locus into signed regions and record
// which regions flank each component.
inline RegionMap regions(const NambuField& field, const QuadGrid& grid,
                         const std::vector<ZeroComponent>& comps) {
  const Domain& dom = field.domain;
  const long ncells = grid.cell_count();
  std::vector<char> cut(ncells, 0);
  for (const auto& c : comps)
    for (long cell : c.element_cell) cut[cell] = 1;

  RegionMap rm;
  rm.region_of_cell.assign(ncells, -1);
  std::vector<long> queue;
  std::vector<long> nbrs;
  for (long seed = 0; seed < ncells; ++seed) {
    if (cut[seed] || rm.region_of_cell[seed] != -1) continue;
    int region = static_cast<int>(rm.region_signs.size());
    int sign = field_value(field, grid.cell_center(seed)) > 0.0 ? 1 : -1;
    rm.region_signs.push_back(sign);
    queue.clear();
    queue.push_back(seed);
    rm.region_of_cell[seed] = region;
    while (!queue.empty()) {
      long c = queue.back();
      queue.pop_back();
      int cell_sign = field_value(field, grid.cell_center(c)) > 0.0 ? 1 : -1;
      if (cell_sign != sign)
        throw InconsistentSign(
            "region " + std::to_string(region) +
            " touches both signs of f; increase the grid resolution until "
            "every region is uniformly signed");
      grid.cell_neighbors(c, nbrs);
      for (long n : nbrs) {
        if (cut[n] || rm.region_of_cell[n] != -1) continue;
        rm.region_of_cell[n] = region;
        queue.push_back(n);
      }
    }
  }

  // Flanking regions per component: from each element midpoint, walk the
  // grid along the chart axis with the strongest f change, on both sides.
  const bool sphere = dom.kind == DomainKind::sphere2;
  const int axes = dom.manifold_dim();
  Vec3 cell_ext{0, 0, 0};
  if (sphere) {
    cell_ext = {grid.dtheta, grid.dphi, 0.0};
  } else {
    for (int a = 0; a < axes; ++a) cell_ext[a] = 1.0 / grid.res[a];
  }

  auto chart_of_ambient = [&](const Vec3& p) -> Vec3 {
    if (!sphere) return p;
    double theta = std::acos(std::clamp(p[2], -1.0, 1.0));
    double phi = std::atan2(p[1], p[0]);
    if (phi < 0) phi += 2.0 * expr_detail::kPi;
    return {theta, phi, 0.0};
  };
  auto cell_indices = [&](long c, std::array<long, 3>& idx) {
    if (sphere) {
      idx = {c / grid.res[1], c % grid.res[1], 0};
      return;
    }
    long rem = c;
    for (int a = 0; a < axes; ++a) {
      idx[a] = rem % grid.res[a];
      rem /= grid.res[a];
    }
  };
  auto cell_from_indices = [&](const std::array<long, 3>& idx) -> long {
    if (sphere) {
      if (idx[0] < 0) return grid.north_cap();
      if (idx[0] >= grid.res[0]) return grid.south_cap();
      long i = ((idx[1] % grid.res[1]) + grid.res[1]) % grid.res[1];
      return idx[0] * grid.res[1] + i;
    }
    long c = 0;
    for (int a = axes - 1; a >= 0; --a) {
      long i = ((idx[a] % grid.res[a]) + grid.res[a]) % grid.res[a];
      c = c * grid.res[a] + i;
    }
    return c;
  };

  for (const auto& comp : comps) {
    std::map<int, long> votes_pos, votes_neg;
    const std::size_t nelem = comp.element_measure.size();
    for (std::size_t e = 0; e < nelem; ++e) {
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
      Vec3 partial = chart_partials(dom, chart_of_ambient(mid), g);
      int axis = 0;
      double best = -1.0;
      // Sphere axis order in cell indices is (theta, phi) = chart order.
      for (int a = 0; a < axes; ++a) {
        double score = std::abs(partial[a]) * cell_ext[a];
        if (score > best) {
          best = score;
          axis = a;
        }
      }
      int dir = partial[axis] > 0 ? 1 : -1;
      std::array<long, 3> idx0;
      cell_indices(comp.element_cell[e], idx0);
      for (int side = 0; side < 2; ++side) {
        int step = side == 0 ? dir : -dir;
        int want = side == 0 ? 1 : -1;
        std::array<long, 3> idx = idx0;
        for (int s = 1; s <= 6; ++s) {
          idx[axis] = idx0[axis] + static_cast<long>(s) * step;
          long c = cell_from_indices(idx);
          if (cut[c]) continue;
          if (rm.region_signs[rm.region_of_cell[c]] == want) {
            auto& m = side == 0 ? votes_pos : votes_neg;
            ++m[rm.region_of_cell[c]];
          }
          break;
        }
      }
    }
    auto winner = [&](const std::map<int, long>& votes, const char* side) -> int {
      if (votes.empty())
        throw InconsistentSign("could not locate the " + std::string(side) +
                               " region next to component " + std::to_string(comp.id) +
                               "; increase the grid resolution");
      int best_region = -1;
      long best_votes = -1, total = 0;
      for (auto [r, n] : votes) {
        total += n;
        if (n > best_votes) {
          best_votes = n;
          best_region = r;
        }
      }
      if (best_votes * 5 < total * 4)
        throw InconsistentSign("ambiguous region adjacency at component " +
                               std::to_string(comp.id) +
                               "; increase the grid resolution");
      return best_region;
    };
    RegionMap::Adjacency adj;
    adj.component = comp.id;
    adj.positive_region = winner(votes_pos, "positive");
    adj.negative_region = winner(votes_neg, "negative");
    rm.adjacency.push_back(adj);
  }
  return rm;
}

}  // namespace nambu
