#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <algorithm>
#include <cstdlib>
#include <sstream>
#include <sys/wait.h>

#include "nambu/pipeline.hpp"
#include "test_helpers.hpp"

using namespace nambu;

namespace {

Scenario from_text(const std::string& body) {
  std::istringstream in(body);
  return parse_scenario(in, "<inline>");
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::size_t count_occurrences(const std::string& hay, const std::string& needle) {
  std::size_t n = 0, pos = 0;
  while ((pos = hay.find(needle, pos)) != std::string::npos) {
    ++n;
    pos += needle.size();
  }
  return n;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("scenario files parse with defaults") {
  Scenario sc = from_text("domain: torus2\nf: sin(2*pi*x)\n");
  CHECK(sc.domain == DomainKind::torus2);
  CHECK(sc.resolution == std::vector<int>{256, 256});
  CHECK(sc.eps.empty());
  CHECK(sc.delta_t_factor == 1e-4);
  CHECK(sc.tol_volume == 1e-2);

  Scenario full = from_text(
      "# comment\n"
      "domain: sphere2\n"
      "resolution: 96 192\n"
      "f: z + 0.5\n"
      "theta: 2*(z + 0.5)\n"
      "h: (2 + sin(3*x))*(z + 0.5)\n"
      "eps: 0.1 0.05 0.025\n"
      "delta_t_factor: 2e-4\n"
      "weight_quantum: 5e-3\n"
      "tol_volume: 0.02\n"
      "out_dir: /tmp/nambu_out\n");
  CHECK(full.resolution == std::vector<int>{96, 192});
  CHECK(full.eps.size() == 3);
  CHECK(full.line_of("f") == 4);
}

TEST_CASE("scenario validation rejects bad input") {
  CHECK_THROWS_AS(from_text("f: z\n"), ValidationError);                  // no domain
  CHECK_THROWS_AS(from_text("domain: sphere2\n"), ValidationError);       // no f
  CHECK_THROWS_AS(from_text("domain: klein\nf: z\n"), ValidationError);   // bad domain
  CHECK_THROWS_AS(from_text("domain: sphere2\nf: z\nspin: 2\n"), ValidationError);
  CHECK_THROWS_AS(from_text("domain: sphere2\nf: z\neps: 0.1\n"), ValidationError);
  CHECK_THROWS_AS(from_text("domain: sphere2\nf: z\neps: 0.1 0.2\n"), ValidationError);
  CHECK_THROWS_AS(from_text("domain: torus2\nf: z\n"), ValidationError);  // z undeclared
  CHECK_THROWS_AS(from_text("domain: sphere2\nf: z\nf: x\n"), ValidationError);
  try {
    from_text("domain: sphere2\nf: z\nspin: 2\n");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("spin") != std::string::npos);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("reports are byte-identical across runs") {
  Scenario sc = from_text(
      "domain: sphere2\nresolution: 96 192\nf: z + 0.5\neps: 0.1 0.05 0.025\n");
  std::string a = render_report(run_invariants(sc));
  std::string b = render_report(run_invariants(sc));
  CHECK(a == b);
  CHECK(a.find("nambu invariants report\n") == 0);
  CHECK(a.find("components: 1\n") != std::string::npos);
  CHECK(a.find("h2_dimension: 2\n") != std::string::npos);
  CHECK(a.find("graph arrangement {") != std::string::npos);
}

TEST_CASE("reports for shipped scenarios") {
  Scenario sc = load_scenario(std::string(NAMBU_SCENARIO_DIR) + "/sphere_constant.scn");
  PipelineRun run = run_invariants(sc);
  CHECK(run.components.empty());
  CHECK(run.report.h2_dimension == 1);
  CHECK(std::abs(run.report.volume - 8 * testutil::kPi) <= 1e-2);
  std::string text = render_report(run);
  CHECK(text.find("components: 0\n") != std::string::npos);
}

TEST_CASE("equivalence documents") {
  Scenario a = from_text("domain: sphere2\nresolution: 128 256\nf: z\neps: 0.1 0.05 0.025\n");
  Scenario b = from_text("domain: sphere2\nresolution: 128 256\nf: -z\neps: 0.1 0.05 0.025\n");
  Scenario c = from_text("domain: sphere2\nresolution: 128 256\nf: z + 0.5\neps: 0.1 0.05 0.025\n");
  EquivDocument same = run_equiv(a, b);
  CHECK(same.result.verdict == Verdict::equivalent_orientation_preserving);
  CHECK(same.text.find("verdict: equivalent_orientation_preserving\n") != std::string::npos);
  EquivDocument diff = run_equiv(a, c);
  CHECK(diff.result.verdict == Verdict::inequivalent);
  CHECK(diff.text.find("verdict: inequivalent\n") != std::string::npos);
  CHECK(diff.text.find("reason: volume\n") != std::string::npos);
}

TEST_CASE("deformation documents") {
  Scenario base = from_text("domain: sphere2\nresolution: 192 384\nf: z\neps: 0.1 0.05 0.025\n");
  Scenario theta = from_text("domain: sphere2\nresolution: 192 384\nf: z*(1 + 0.25*z)\n");
  DeformDocument doc = run_deform(base, theta);
  REQUIRE(doc.coords.c.size() == 1);
  CHECK(std::abs(doc.coords.c[0] - 1.0) <= 1e-3);
  CHECK(std::abs(doc.coords.v_rel - testutil::kPi) <= 1e-2);
  CHECK(doc.text.find("V_rel: ") != std::string::npos);
}

TEST_CASE("artifacts: dot, svg, diagnostics") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "nambu_artifact_test";
  fs::remove_all(dir);

  Scenario sc = from_text(
      "domain: sphere2\nresolution: 96 192\nf: z + 0.5\neps: 0.1 0.05 0.025\n");
  PipelineRun run = run_invariants(sc);
  auto files = emit_artifacts(run, dir.string(), "case");
  REQUIRE(files.size() == 3);
  std::string svg = slurp((dir / "case.svg").string());
  CHECK(count_occurrences(svg, "class=\"contour\"") == 1);
  CHECK(svg.find("#f6c9c9") != std::string::npos);
  CHECK(svg.find("#c9d4f6") != std::string::npos);
  std::string dot = slurp((dir / "case.dot").string());
  CHECK(dot.find("graph arrangement {") == 0);
  std::string diag = slurp((dir / "case_eps.txt").string());
  CHECK(diag.find("# eps\tI\n") == 0);
  CHECK(count_occurrences(diag, "\n") >= 5);

  // torus2: two contours in the SVG, two parallel edges in the DOT
  Scenario torus = from_text(
      "domain: torus2\nresolution: 128 128\nf: sin(2*pi*x)\neps: 0.1 0.05 0.025\n");
  PipelineRun trun = run_invariants(torus);
  emit_artifacts(trun, dir.string(), "torus");
  std::string tsvg = slurp((dir / "torus.svg").string());
  CHECK(count_occurrences(tsvg, "class=\"contour\"") == 2);
  std::string tdot = slurp((dir / "torus.dot").string());
  CHECK(count_occurrences(tdot, " -- ") == 2);

  // torus3: no SVG, DOT and diagnostics still emitted
  Scenario t3 = from_text(
      "domain: torus3\nresolution: 32 32 32\nf: sin(2*pi*x)\neps: 0.1 0.05 0.025\n");
  PipelineRun t3run = run_invariants(t3);
  auto t3files = emit_artifacts(t3run, dir.string(), "t3");
  CHECK(t3files.size() == 2);
  CHECK(!fs::exists(dir / "t3.svg"));
  fs::remove_all(dir);
}

TEST_CASE("every shipped scenario runs end to end") {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(NAMBU_SCENARIO_DIR))
    if (entry.path().extension() == ".scn") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  REQUIRE(files.size() >= 8);
  for (const auto& file : files) {
    CAPTURE(file.string());
    Scenario sc = load_scenario(file.string());
    PipelineRun run = run_invariants(sc);
    CHECK(std::isfinite(run.report.volume));
    CHECK(run.report.h2_dimension ==
          static_cast<int>(run.report.components.size()) + 1);
    CHECK(!render_report(run).empty());
  }
}

#ifdef NAMBU_CLI_PATH
TEST_CASE("the binary maps non-convergence to exit code 2") {
  std::string cmd = std::string(NAMBU_CLI_PATH) + " invariants " + NAMBU_SCENARIO_DIR +
                    "/sphere_two_latitudes.scn --eps 0.1,0.05,0.025 >/dev/null 2>&1";
  int ret = std::system(cmd.c_str());
  REQUIRE(ret != -1);
  CHECK(WEXITSTATUS(ret) == 2);

  std::string ok_cmd = std::string(NAMBU_CLI_PATH) + " invariants " + NAMBU_SCENARIO_DIR +
                       "/sphere_two_latitudes.scn >/dev/null 2>&1";
  int ok = std::system(ok_cmd.c_str());
  CHECK(WEXITSTATUS(ok) == 0);

  std::string bad_cmd = std::string(NAMBU_CLI_PATH) + " invariants " + NAMBU_SCENARIO_DIR +
                        "/no_such.scn >/dev/null 2>&1";
  int bad = std::system(bad_cmd.c_str());
  CHECK(WEXITSTATUS(bad) == 1);

  std::string grid_cmd = std::string(NAMBU_CLI_PATH) + " invariants " + NAMBU_SCENARIO_DIR +
                         "/sphere_z.scn --grid 96x192 >/dev/null 2>&1";
  CHECK(WEXITSTATUS(std::system(grid_cmd.c_str())) == 0);
}
#endif

TEST_CASE("errors name the scenario field") {
  Scenario sc = from_text("domain: sphere2\nresolution: 96 192\nf: x\n");
  try {
    run_invariants(sc);
    FAIL("expected PoleViolation");
  } catch (const Error& e) {
    std::string ctx = error_context(sc, e);
    CHECK(ctx.find("field 'f'") != std::string::npos);
    CHECK(ctx.find("line 3") != std::string::npos);
  }
  Scenario fine = from_text(
      "domain: sphere2\nresolution: 96 192\nf: z\neps: 1e-7 5e-8\n");
  try {
    run_invariants(fine);
    FAIL("expected ScheduleTooFine");
  } catch (const Error& e) {
    CHECK(error_context(fine, e).find("field 'eps'") != std::string::npos);
  }
}

}  // TEST_SUITE
