// Command-line front end: scenario ingestion, invariants pipeline, pairwise
// equivalence, deformation coordinates, signed-tree enumeration, collar
// linearization profiles, and plot/DOT emission.
//
// Exit codes: 0 success, 1 validation or domain error, 2 numerical
// non-convergence.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nambu/normalform.hpp"
#include "nambu/pipeline.hpp"

namespace {

struct Overrides {
  std::string grid;
  std::string eps;
  std::optional<double> weight_quantum;
  std::optional<double> tol_volume;
  std::string out_dir;
};

void add_override_flags(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("--grid", ov.grid, "per-axis cell counts, e.g. 256x512");
  cmd->add_option("--eps", ov.eps, "epsilon schedule, e.g. 0.1,0.05,0.025");
  cmd->add_option("--weight-quantum", ov.weight_quantum,
                  "edge-weight quantum relative to the largest weight");
  cmd->add_option("--tol-volume", ov.tol_volume, "volume comparison tolerance");
  cmd->add_option("--out-dir", ov.out_dir, "directory for emitted artifacts");
}

std::vector<std::string> split_any(const std::string& s, const std::string& seps) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (seps.find(c) != std::string::npos) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

void apply_overrides(nambu::Scenario& sc, const Overrides& ov) {
  if (!ov.grid.empty()) {
    sc.resolution.clear();
    for (const std::string& tok : split_any(ov.grid, "x, "))
      sc.resolution.push_back(std::stoi(tok));
  }
  if (!ov.eps.empty()) {
    sc.eps.clear();
    for (const std::string& tok : split_any(ov.eps, ", "))
      sc.eps.push_back(std::stod(tok));
  }
  if (ov.weight_quantum) sc.weight_quantum = *ov.weight_quantum;
  if (ov.tol_volume) sc.tol_volume = *ov.tol_volume;
  if (!ov.out_dir.empty()) sc.out_dir = ov.out_dir;
}

std::string stem_of(const std::string& path) {
  std::string s = std::filesystem::path(path).stem().string();
  return s.empty() ? "report" : s;
}

int fail(const nambu::Scenario* sc, const std::exception& e) {
  std::cerr << "error: " << e.what() << "\n";
  if (sc) {
    std::string ctx = nambu::error_context(*sc, e);
    if (!ctx.empty()) std::cerr << "  at " << ctx << "\n";
  }
  return dynamic_cast<const nambu::NonConvergent*>(&e) ? 2 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"invariants of generic top-degree multi-vector fields on model domains"};
  app.require_subcommand(1);

  std::string file_a, file_b, lin_f;
  int trees_k = 1;
  double lin_rmax = 0.9, lin_k = 1.0;
  int lin_samples = 2001;
  Overrides ov;

  CLI::App* cmd_inv = app.add_subcommand("invariants", "run the pipeline on a scenario");
  cmd_inv->add_option("file", file_a, "scenario file")->required();
  add_override_flags(cmd_inv, ov);

  CLI::App* cmd_equiv = app.add_subcommand("equiv", "decide equivalence of two scenarios");
  cmd_equiv->add_option("fileA", file_a, "first scenario")->required();
  cmd_equiv->add_option("fileB", file_b, "second scenario")->required();
  add_override_flags(cmd_equiv, ov);

  CLI::App* cmd_deform = app.add_subcommand("deform", "deformation coordinates of theta against base");
  cmd_deform->add_option("base", file_a, "base scenario")->required();
  cmd_deform->add_option("theta", file_b, "theta scenario")->required();
  add_override_flags(cmd_deform, ov);

  CLI::App* cmd_trees = app.add_subcommand("trees", "enumerate signed-tree classes with k+1 vertices");
  cmd_trees->add_option("k", trees_k, "number of edges")->required();

  CLI::App* cmd_lin = app.add_subcommand("linearize", "solve the collar linearization dg/dr = g/f");
  cmd_lin->add_option("--f", lin_f, "1-D profile in r with f(0)=0, f'(0)=1")->required();
  cmd_lin->add_option("--rmax", lin_rmax, "collar half-width in (0,1)");
  cmd_lin->add_option("--k", lin_k, "solution family parameter, k > 0");
  cmd_lin->add_option("--samples", lin_samples, "sample count on [-rmax, rmax]");

  CLI::App* cmd_plot = app.add_subcommand("plot", "emit DOT/SVG/diagnostics artifacts");
  cmd_plot->add_option("file", file_a, "scenario file")->required();
  add_override_flags(cmd_plot, ov);

  CLI11_PARSE(app, argc, argv);

  nambu::Scenario sc_a, sc_b;
  bool have_a = false;
  try {
    if (*cmd_inv || *cmd_equiv || *cmd_deform || *cmd_plot) {
      sc_a = nambu::load_scenario(file_a);
      apply_overrides(sc_a, ov);
      have_a = true;
    }
    if (*cmd_equiv || *cmd_deform) {
      sc_b = nambu::load_scenario(file_b);
      apply_overrides(sc_b, ov);
    }

    if (*cmd_inv) {
      nambu::PipelineRun run = nambu::run_invariants(sc_a);
      std::fputs(nambu::render_report(run).c_str(), stdout);
      return 0;
    }
    if (*cmd_equiv) {
      nambu::EquivDocument doc =
          nambu::run_equiv(sc_a, sc_b, sc_a.weight_quantum, sc_a.tol_volume);
      std::fputs(doc.text.c_str(), stdout);
      return 0;
    }
    if (*cmd_deform) {
      nambu::DeformDocument doc = nambu::run_deform(sc_a, sc_b);
      std::fputs(doc.text.c_str(), stdout);
      return 0;
    }
    if (*cmd_trees) {
      nambu::SignedTreeClasses classes = nambu::enumerate_signed_trees(trees_k);
      std::printf("signed tree classes with %d edges: %ld\n", trees_k, classes.count);
      for (const auto& code : classes.codes) std::printf("%s\n", code.c_str());
      return 0;
    }
    if (*cmd_lin) {
      nambu::Expression f = nambu::parse(lin_f, {std::vector<std::string>{"r"}});
      nambu::NormalFormProfile p =
          nambu::solve_linearization(f, lin_rmax, lin_k, lin_samples);
      std::printf("# r\tg\tresidual\n");
      const int n = static_cast<int>(p.r.size());
      for (int i = 0; i < n; ++i) {
        double res = 0.0;
        if (i > 0 && i + 1 < n) {
          double gp = (p.g[i + 1] - p.g[i - 1]) / (p.r[i + 1] - p.r[i - 1]);
          double r = p.r[i];
          double fr = nambu::eval_value(p.f, std::span<const double>(&r, 1));
          res = std::abs(fr * gp - p.g[i]);
        }
        std::printf("%s\t%s\t%s\n", nambu::textfmt::g17(p.r[i]).c_str(),
                    nambu::textfmt::g17(p.g[i]).c_str(),
                    nambu::textfmt::g17(res).c_str());
      }
      std::printf("# max_residual\t%s\n",
                  nambu::textfmt::g17(nambu::verify_linearization(p)).c_str());
      return 0;
    }
    if (*cmd_plot) {
      nambu::PipelineRun run = nambu::run_invariants(sc_a);
      std::string out_dir = sc_a.out_dir.empty() ? "." : sc_a.out_dir;
      std::vector<std::string> files =
          nambu::emit_artifacts(run, out_dir, stem_of(file_a));
      for (const auto& f : files) std::printf("wrote %s\n", f.c_str());
      if (run.field.domain.manifold_dim() != 2)
        std::printf("note: SVG skipped for 3-D domains; DOT and diagnostics emitted\n");
      return 0;
    }
  } catch (const nambu::Error& e) {
    return fail(have_a ? &sc_a : nullptr, e);
  } catch (const std::exception& e) {
    return fail(nullptr, e);
  }
  return 0;
}
