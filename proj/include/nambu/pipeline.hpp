#pragma once

// Scenario orchestration and document emission: run the full invariants
// pipeline, render byte-stable report/verdict documents, and emit DOT, SVG,
// and diagnostics artifacts.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "nambu/arrange.hpp"
#include "nambu/errors.hpp"
#include "nambu/invariants.hpp"
#include "nambu/scenario.hpp"
#include "nambu/zerolocus.hpp"

namespace nambu {

namespace textfmt {
inline std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
inline std::string g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}
}  // namespace textfmt

struct PipelineRun {
  Scenario scenario;
  NambuField field;
  QuadGrid grid;
  std::vector<ZeroComponent> components;
  RegionMap region_map;
  InvariantReport report;
  SignedWeightedGraph graph;
};

inline PipelineRun run_invariants(const Scenario& sc) {
  PipelineRun run;
  run.scenario = sc;
  run.field = make_field(sc.domain, sc.f_text);
  run.grid = make_grid(run.field.domain,
                       std::span<const int>(sc.resolution.data(), sc.resolution.size()));
  ExtractResult ext = extract(run.field, run.grid, {sc.delta_t_factor});
  run.region_map = regions(run.field, run.grid, ext.components);
  std::vector<double> eps = sc.eps;
  if (eps.empty()) eps = default_eps_schedule(run.field, run.grid);
  run.report = build_invariant_report(run.field, run.grid, ext, run.region_map, eps,
                                      sc.tol_volume);
  run.graph = build_graph(run.report, run.region_map);
  run.components = std::move(ext.components);
  return run;
}

inline std::string render_report(const PipelineRun& run) {
  const InvariantReport& r = run.report;
  std::string out;
  out += "nambu invariants report\n";
  out += "domain: " + to_string(r.domain) + "\n";
  out += "resolution:";
  for (int i = 0; i < run.field.domain.manifold_dim(); ++i)
    out += " " + std::to_string(r.resolution[i]);
  out += "\n";
  out += "f: " + r.field_text + "\n";
  out += "delta_t: " + textfmt::g17(r.delta_t) + "\n";
  out += "components: " + std::to_string(r.components.size()) + "\n";
  for (std::size_t i = 0; i < r.components.size(); ++i) {
    out += "component " + std::to_string(i) + ": period " +
           textfmt::g17(r.components[i].period) + " measure " +
           textfmt::g17(r.component_measures[i]) + " min_grad " +
           textfmt::g17(r.component_min_grads[i]) + " sign_flip " +
           (r.components[i].sign_flip ? "1" : "0") + "\n";
  }
  out += "regions: " + std::to_string(r.regions.signs.size()) + "\n";
  for (std::size_t i = 0; i < r.regions.signs.size(); ++i) {
    out += "region " + std::to_string(i) + ": sign " +
           (r.regions.signs[i] > 0 ? "+" : "-") + " cells " +
           std::to_string(r.regions.cell_counts[i]) + "\n";
  }
  for (std::size_t i = 0; i < r.regions.adjacency.size(); ++i) {
    const auto& a = r.regions.adjacency[i];
    out += "adjacency " + std::to_string(i) + ": component " +
           std::to_string(a.component) + " positive r" +
           std::to_string(a.positive_region) + " negative r" +
           std::to_string(a.negative_region) + "\n";
  }
  out += "eps_schedule:";
  for (double e : r.eps_schedule) out += " " + textfmt::g17(e);
  out += "\n";
  for (std::size_t i = 0; i < r.volume_diag.eps.size(); ++i)
    out += "I " + textfmt::g17(r.volume_diag.eps[i]) + ": " +
           textfmt::g17(r.volume_diag.integral[i]) + "\n";
  out += "slope: " + textfmt::g17(r.volume_diag.slope) + "\n";
  out += "V: " + textfmt::g17(r.volume) + "\n";
  out += "h2_dimension: " + std::to_string(r.h2_dimension) + "\n";
  out += "h2_generators: ";
  for (std::size_t i = 0; i < r.h2_generators.size(); ++i) {
    if (i) out += "; ";
    out += r.h2_generators[i];
  }
  out += "\n";
  out += "graph:\n" + to_dot(run.graph);
  return out;
}

struct EquivDocument {
  EquivalenceResult result;
  std::string text;
};

inline EquivDocument run_equiv(const Scenario& a, const Scenario& b,
                               double weight_quantum, double tol_volume) {
  if (a.domain != b.domain)
    throw DomainMismatch("the scenarios use different domain kinds");
  PipelineRun ra = run_invariants(a);
  PipelineRun rb = run_invariants(b);
  EquivDocument doc;
  doc.result = is_equivalent(ra.report, rb.report, weight_quantum, tol_volume);
  doc.text += "nambu equivalence verdict\n";
  doc.text += "domain: " + to_string(a.domain) + "\n";
  doc.text += "A.f: " + ra.report.field_text + "\n";
  doc.text += "B.f: " + rb.report.field_text + "\n";
  doc.text += "A.V: " + textfmt::g17(ra.report.volume) + "\n";
  doc.text += "B.V: " + textfmt::g17(rb.report.volume) + "\n";
  doc.text += "verdict: " + to_string(doc.result.verdict) + "\n";
  if (!doc.result.reason.empty()) doc.text += "reason: " + doc.result.reason + "\n";
  return doc;
}

inline EquivDocument run_equiv(const Scenario& a, const Scenario& b) {
  return run_equiv(a, b, a.weight_quantum, a.tol_volume);
}

struct DeformDocument {
  DeformationCoordinates coords;
  std::string text;
};

inline DeformDocument run_deform(const Scenario& base, const Scenario& theta) {
  if (base.domain != theta.domain)
    throw DomainMismatch("the scenarios use different domain kinds");
  NambuField bf = make_field(base.domain, base.f_text);
  NambuField tf = make_field(theta.domain, theta.f_text);
  QuadGrid grid = make_grid(bf.domain, std::span<const int>(base.resolution.data(),
                                                            base.resolution.size()));
  std::vector<double> eps = base.eps;
  if (eps.empty()) eps = default_eps_schedule(bf, grid);
  DeformDocument doc;
  doc.coords = deformation_coordinates(bf, tf, grid, eps, base.tol_volume,
                                       base.delta_t_factor);
  doc.text += "nambu deformation coordinates\n";
  doc.text += "domain: " + to_string(base.domain) + "\n";
  doc.text += "base.f: " + to_string(bf.f) + "\n";
  doc.text += "theta.f: " + to_string(tf.f) + "\n";
  doc.text += "components: " + std::to_string(doc.coords.c.size()) + "\n";
  for (std::size_t i = 0; i < doc.coords.c.size(); ++i)
    doc.text += "c " + std::to_string(i) + ": " + textfmt::g17(doc.coords.c[i]) + "\n";
  doc.text += "V_rel: " + textfmt::g17(doc.coords.v_rel) + "\n";
  return doc;
}

// ---------------------------------------------------------------------------
// Artifacts.

inline std::string render_diagnostics(const PipelineRun& run) {
  std::string out = "# eps\tI\n";
  const auto& d = run.report.volume_diag;
  for (std::size_t i = 0; i < d.eps.size(); ++i)
    out += textfmt::g17(d.eps[i]) + "\t" + textfmt::g17(d.integral[i]) + "\n";
  out += "# slope\t" + textfmt::g17(d.slope) + "\n";
  out += "# V\t" + textfmt::g17(run.report.volume) + "\n";
  return out;
}

// Zero locus over a sign-shaded background, in chart coordinates.
// 2-D domains only.
inline std::string render_locus_svg(const PipelineRun& run) {
  const Domain& dom = run.field.domain;
  if (dom.manifold_dim() != 2)
    throw ValidationError("SVG plots cover 2-D domains only");
  const bool sphere = dom.kind == DomainKind::sphere2;
  const double kPi = expr_detail::kPi;
  const double W = sphere ? 1024 : 640, H = sphere ? 512 : 640;
  auto map_chart = [&](double u, double v, double& x, double& y) {
    if (sphere) {
      x = v / (2 * kPi) * W;   // phi rightward
      y = u / kPi * H;         // theta downward (north on top)
    } else {
      x = u * W;
      y = (1.0 - v) * H;
    }
  };
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + textfmt::g6(W) +
         "\" height=\"" + textfmt::g6(H) + "\" viewBox=\"0 0 " + textfmt::g6(W) + " " +
         textfmt::g6(H) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Sign shading on a strided copy of the grid.
  const QuadGrid& g = run.grid;
  int na = sphere ? g.res[1] : g.res[0];
  int nb = sphere ? g.res[0] : g.res[1];
  int sa = (na + 63) / 64, sb = (nb + 63) / 64;
  for (int ib = 0; ib < nb; ib += sb) {
    for (int ia = 0; ia < na; ia += sa) {
      long cell = sphere ? static_cast<long>(ib) * g.res[1] + ia
                         : static_cast<long>(ib) * g.res[0] + ia;
      int region = run.region_map.region_of_cell[cell];
      if (region < 0) continue;
      const char* fill = run.region_map.region_signs[region] > 0 ? "#f6c9c9" : "#c9d4f6";
      Vec3 lo, hi;
      g.cell_chart_box(cell, lo, hi);
      double x0, y0, x1, y1;
      if (sphere) {
        map_chart(lo[0], lo[1], x0, y0);
        double ue = std::min(static_cast<double>(ib + sb), static_cast<double>(nb));
        double ve = std::min(static_cast<double>(ia + sa), static_cast<double>(na));
        map_chart(g.theta_cap + ue * g.dtheta, ve * g.dphi, x1, y1);
      } else {
        map_chart(lo[0], lo[1], x0, y0);
        map_chart(std::min((ia + sa) / double(na), 1.0), std::min((ib + sb) / double(nb), 1.0), x1, y1);
      }
      svg += "<rect x=\"" + textfmt::g6(std::min(x0, x1)) + "\" y=\"" +
             textfmt::g6(std::min(y0, y1)) + "\" width=\"" +
             textfmt::g6(std::abs(x1 - x0)) + "\" height=\"" +
             textfmt::g6(std::abs(y1 - y0)) + "\" fill=\"" + fill + "\"/>\n";
    }
  }

  // Contours, split where the chart wraps.
  for (const auto& comp : run.components) {
    std::string d;
    bool pen_up = true;
    double prev_u = 0, prev_v = 0;
    auto chart_of = [&](const Vec3& p, double& u, double& v) {
      if (sphere) {
        u = std::acos(std::clamp(p[2], -1.0, 1.0));
        v = std::atan2(p[1], p[0]);
        if (v < 0) v += 2 * kPi;
      } else {
        u = p[0];
        v = p[1];
      }
    };
    const std::size_t n = comp.vertices.size();
    for (std::size_t i = 0; i <= n; ++i) {
      double u, v;
      chart_of(comp.vertices[i % n].pos, u, v);
      bool jump = false;
      if (!pen_up) {
        double du = std::abs(u - prev_u), dv = std::abs(v - prev_v);
        jump = sphere ? (dv > kPi) : (du > 0.5 || dv > 0.5);
      }
      double x, y;
      map_chart(u, v, x, y);
      if (pen_up || jump)
        d += "M " + textfmt::g6(x) + " " + textfmt::g6(y) + " ";
      else
        d += "L " + textfmt::g6(x) + " " + textfmt::g6(y) + " ";
      pen_up = false;
      prev_u = u;
      prev_v = v;
    }
    svg += "<path class=\"contour\" d=\"" + d +
           "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

// Writes DOT, SVG (2-D only), and the I(eps) table. Returns the file paths.
inline std::vector<std::string> emit_artifacts(const PipelineRun& run,
                                               const std::string& out_dir,
                                               const std::string& stem) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out_dir + "'");
  auto write_file = [&](const std::string& name, const std::string& body) {
    std::string path = (fs::path(out_dir) / name).string();
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write '" + path + "'");
    f << body;
    if (!f) throw IoError("short write to '" + path + "'");
    return path;
  };
  std::vector<std::string> out;
  out.push_back(write_file(stem + ".dot", to_dot(run.graph)));
  if (run.field.domain.manifold_dim() == 2)
    out.push_back(write_file(stem + ".svg", render_locus_svg(run)));
  out.push_back(write_file(stem + "_eps.txt", render_diagnostics(run)));
  return out;
}

// Names the scenario field responsible for an error, with its line.
inline std::string error_context(const Scenario& sc, const std::exception& e) {
  auto field = [&]() -> std::string {
    if (dynamic_cast<const CutoffMismatch*>(&e)) return "h";
    if (dynamic_cast<const LocusMismatch*>(&e) ||
        dynamic_cast<const NotGenericTheta*>(&e))
      return "theta";
    if (dynamic_cast<const ScheduleTooFine*>(&e) ||
        dynamic_cast<const NonConvergent*>(&e))
      return "eps";
    if (dynamic_cast<const ResolutionTooLow*>(&e) ||
        dynamic_cast<const InconsistentSign*>(&e))
      return "resolution";
    if (dynamic_cast<const Error*>(&e)) return "f";
    return "";
  }();
  if (field.empty() || sc.source_path.empty()) return "";
  std::string ctx = "scenario " + sc.source_path + ", field '" + field + "'";
  int line = sc.line_of(field);
  if (line > 0) ctx += " (line " + std::to_string(line) + ")";
  return ctx;
}

}  // namespace nambu
