#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "nambu/arrange.hpp"
#include "nambu/invariants.hpp"
#include "test_helpers.hpp"

using namespace nambu;

namespace {

const std::vector<double> kEps{0.1, 0.05, 0.025};

struct Setup {
  NambuField field;
  QuadGrid grid;
  ExtractResult ext;
};

Setup setup(DomainKind kind, const char* f_text, std::vector<int> res) {
  Setup s{make_field(kind, f_text), {}, {}};
  s.grid = make_grid(s.field.domain, std::span<const int>(res.data(), res.size()));
  s.ext = extract(s.field, s.grid);
  return s;
}

}  // namespace

TEST_SUITE("invariants") {

TEST_CASE("latitude modular periods equal 2*pi") {
  for (const char* f_text : {"z", "z + 0.5"}) {
    Setup s = setup(DomainKind::sphere2, f_text, {192, 384});
    REQUIRE(s.ext.components.size() == 1);
    ModularData md = modular_period(s.field, s.ext.components[0]);
    CHECK(std::abs(md.period - 2 * testutil::kPi) <= 1e-3);
    CHECK(md.period > 0);
    for (double d : md.density) CHECK(d > 0);
  }
}

TEST_CASE("torus circle periods equal 1/(2*pi)") {
  Setup s = setup(DomainKind::torus2, "sin(2*pi*x)", {128, 128});
  REQUIRE(s.ext.components.size() == 2);
  for (const auto& comp : s.ext.components) {
    ModularData md = modular_period(s.field, comp);
    CHECK(std::abs(md.period - 1.0 / (2 * testutil::kPi)) <= 1e-4);
  }
}

TEST_CASE("regularized volume of odd fields vanishes") {
  Setup s = setup(DomainKind::sphere2, "z", {192, 384});
  VolumeResult v = regularized_volume(s.field, s.grid, kEps);
  CHECK(std::abs(v.value) <= 1e-3);

  Setup t = setup(DomainKind::torus2, "sin(2*pi*x)", {128, 128});
  VolumeResult vt = regularized_volume(t.field, t.grid, kEps);
  CHECK(std::abs(vt.value) <= 1e-3);
}

TEST_CASE("regularized volume of the shifted latitude") {
  Setup s = setup(DomainKind::sphere2, "z + 0.5", {192, 384});
  VolumeResult v = regularized_volume(s.field, s.grid, kEps);
  CHECK(std::abs(v.value - testutil::sphere_latitude_volume(0.5)) <= 1e-2);
  REQUIRE(v.diag.integral.size() == 3);
  CHECK(v.diag.monotone);
  CHECK(std::isfinite(v.value));
}

TEST_CASE("two-latitude volume against the partial-fraction oracle") {
  Setup s = setup(DomainKind::sphere2, "(z - 0.5)*(z + 0.5)", {256, 512});
  // 1/(z^2 - 1/4) = 1/(z - 1/2) - 1/(z + 1/2); both principal values are known
  double truth = testutil::sphere_latitude_volume(-0.5) - testutil::sphere_latitude_volume(0.5);
  std::vector<double> eps{0.02, 0.01, 0.005};
  VolumeResult v = regularized_volume(s.field, s.grid, eps);
  CHECK(std::abs(v.value - truth) <= 2e-2);
}

TEST_CASE("cutoff independence") {
  Setup s = setup(DomainKind::sphere2, "z + 0.5", {192, 384});
  VolumeResult v = regularized_volume(s.field, s.grid, kEps);
  Expression h = parse("(2 + sin(3*x))*(z + 0.5)", DomainKind::sphere2);
  VolumeResult vh = volume_with_cutoff(s.field, s.grid, h, kEps);
  CHECK(std::abs(vh.value - v.value) <= 1e-2);

  Setup sz = setup(DomainKind::sphere2, "z", {192, 384});
  Expression h2 = parse("z + z*z*y", DomainKind::sphere2);
  VolumeResult vh2 = volume_with_cutoff(sz.field, sz.grid, h2, kEps);
  CHECK(std::abs(vh2.value) <= 1e-2);

  VolumeResult same = volume_with_cutoff(s.field, s.grid, s.field.f, kEps);
  CHECK(same.value == doctest::Approx(v.value).epsilon(1e-12));
}

TEST_CASE("mismatched cutoffs are rejected") {
  Setup s = setup(DomainKind::sphere2, "z + 0.5", {96, 192});
  Expression h = parse("z", DomainKind::sphere2);
  CHECK_THROWS_AS(volume_with_cutoff(s.field, s.grid, h, kEps), CutoffMismatch);
}

TEST_CASE("schedule validation") {
  Setup s = setup(DomainKind::sphere2, "z + 0.5", {96, 192});
  std::vector<double> one{0.1};
  CHECK_THROWS_AS(regularized_volume(s.field, s.grid, one), ValidationError);
  std::vector<double> rising{0.05, 0.1};
  CHECK_THROWS_AS(regularized_volume(s.field, s.grid, rising), ValidationError);
}

TEST_CASE("non-convergent schedules are reported") {
  // the two-latitude field has a genuinely curved I(eps); a coarse schedule
  // fails the pair cross-check at the default tolerance
  Setup s = setup(DomainKind::sphere2, "(z - 0.5)*(z + 0.5)", {128, 256});
  CHECK_THROWS_AS(regularized_volume(s.field, s.grid, kEps, 1e-2), NonConvergent);
}

TEST_CASE("scaling laws") {
  Setup s1 = setup(DomainKind::sphere2, "z + 0.5", {192, 384});
  Setup s2 = setup(DomainKind::sphere2, "2*(z + 0.5)", {192, 384});
  double t1 = modular_period(s1.field, s1.ext.components[0]).period;
  double t2 = modular_period(s2.field, s2.ext.components[0]).period;
  CHECK(std::abs(t2 - t1 / 2) / (t1 / 2) <= 1e-9);

  double v1 = regularized_volume(s1.field, s1.grid, kEps).value;
  double v2 = regularized_volume(s2.field, s2.grid, kEps).value;
  CHECK(std::abs(v2 - v1 / 2) <= 1e-3);

  Setup sm = setup(DomainKind::sphere2, "-(z + 0.5)", {192, 384});
  double tm = modular_period(sm.field, sm.ext.components[0]).period;
  double vm = regularized_volume(sm.field, sm.grid, kEps).value;
  CHECK(std::abs(tm - t1) / t1 <= 1e-9);
  CHECK(std::abs(vm + v1) <= 1e-3);
}

TEST_CASE("the period does not depend on the transverse field") {
  Setup s = setup(DomainKind::sphere2, "z + 0.5", {192, 384});
  double t = modular_period(s.field, s.ext.components[0]).period;
  TransverseWeight w = [](const Vec3& p) {
    return 1.0 + 0.3 * std::sin(5.0 * std::atan2(p[1], p[0]));
  };
  double tw = modular_period(s.field, s.ext.components[0], w).period;
  CHECK(std::abs(tw - t) / t < 1e-10);
}

TEST_CASE("diagonal torus circles: grad and length scale cancel in the period") {
  // |grad sin(2*pi*(x+y))| = 2*pi*sqrt(2) on the zero set, length sqrt(2),
  // so the period is 1/(2*pi) again
  Setup s = setup(DomainKind::torus2, "sin(2*pi*(x + y))", {192, 192});
  REQUIRE(s.ext.components.size() == 2);
  for (const auto& comp : s.ext.components) {
    double T = modular_period(s.field, comp).period;
    CHECK(std::abs(T - 1.0 / (2 * testutil::kPi)) <= 1e-4);
  }
  CHECK(std::abs(regularized_volume(s.field, s.grid, kEps).value) <= 1e-3);
}

TEST_CASE("three latitudes: analytic periods and odd-field volume") {
  // f = z^3 - 0.36 z: circles at z = 0 and z = +/-0.6 with
  // |grad_S2 f| = |3z^2 - 0.36| sqrt(1 - z^2)
  Setup s = setup(DomainKind::sphere2, "z*(z - 0.6)*(z + 0.6)", {256, 512});
  REQUIRE(s.ext.components.size() == 3);
  double t_mid = 2 * testutil::kPi / 0.36;
  double t_out = 2 * testutil::kPi / 0.72;  // circumference and gradient 0.8s cancel
  int mids = 0, outs = 0;
  for (const auto& comp : s.ext.components) {
    double T = modular_period(s.field, comp).period;
    if (std::abs(T - t_mid) <= 1e-2) ++mids;
    if (std::abs(T - t_out) <= 1e-2) ++outs;
  }
  CHECK(mids == 1);
  CHECK(outs == 2);
  std::vector<double> eps{0.01, 0.005, 0.0025};
  CHECK(std::abs(regularized_volume(s.field, s.grid, eps).value) <= 1e-2);
  RegionMap rm = regions(s.field, s.grid, s.ext.components);
  CHECK(rm.region_count() == 4);
}

TEST_CASE("rotated products keep their invariants") {
  std::mt19937_64 rng(4);
  auto R = testutil::random_rotation(rng);
  std::string w = testutil::rotated_z(R);
  NambuField f = make_field(DomainKind::sphere2,
                            "((" + w + ") - 0.5)*((" + w + ") + 0.5)");
  QuadGrid g = make_grid(f.domain, std::array<int, 2>{256, 512});
  ExtractResult ext = extract(f, g);
  REQUIRE(ext.components.size() == 2);
  for (const auto& comp : ext.components) {
    double T = modular_period(f, comp).period;
    CHECK(std::abs(T - 2 * testutil::kPi) <= 1e-3 * 2 * testutil::kPi);
  }
  std::vector<double> eps{0.02, 0.01, 0.005};
  double truth =
      testutil::sphere_latitude_volume(-0.5) - testutil::sphere_latitude_volume(0.5);
  CHECK(std::abs(regularized_volume(f, g, eps).value - truth) <= 1e-2);
}

TEST_CASE("rotation invariance of the full report") {
  std::mt19937_64 rng(7);
  NambuField base = make_field(DomainKind::sphere2, "z");
  QuadGrid g = make_grid(base.domain, std::array<int, 2>{192, 384});
  ExtractResult bext = extract(base, g);
  RegionMap brm = regions(base, g, bext.components);
  InvariantReport brep = build_invariant_report(base, g, bext, brm, kEps);
  for (int trial = 0; trial < 3; ++trial) {
    auto R = testutil::random_rotation(rng);
    NambuField rot = make_field(DomainKind::sphere2, testutil::rotated_z(R));
    ExtractResult rext = extract(rot, g);
    RegionMap rrm = regions(rot, g, rext.components);
    InvariantReport rrep = build_invariant_report(rot, g, rext, rrm, kEps);
    REQUIRE(rrep.components.size() == 1);
    CHECK(std::abs(rrep.components[0].period - brep.components[0].period) <=
          1e-3 * brep.components[0].period);
    CHECK(std::abs(rrep.volume - brep.volume) <= 1e-2);
    auto verdict = is_equivalent(brep, rrep, 1e-3, 1e-2);
    CHECK(verdict.verdict == Verdict::equivalent_orientation_preserving);
  }
}

TEST_CASE("deformation coordinates") {
  QuadGrid g = make_grid(Domain{DomainKind::sphere2}, std::array<int, 2>{192, 384});
  NambuField base = make_field(DomainKind::sphere2, "z + 0.5");

  SUBCASE("theta = base") {
    DeformationCoordinates dc = deformation_coordinates(base, base, g, kEps);
    REQUIRE(dc.c.size() == 1);
    CHECK(dc.c[0] == doctest::Approx(1.0).epsilon(1e-12));
    double v = regularized_volume(base, g, kEps).value;
    CHECK(dc.v_rel == doctest::Approx(v).epsilon(1e-12));
  }
  SUBCASE("theta = 2*base") {
    NambuField twice = make_field(DomainKind::sphere2, "2*(z + 0.5)");
    DeformationCoordinates dc = deformation_coordinates(base, twice, g, kEps);
    REQUIRE(dc.c.size() == 1);
    CHECK(std::abs(dc.c[0] - 2.0) <= 1e-2);
    double v = regularized_volume(base, g, kEps).value;
    CHECK(std::abs(dc.v_rel - 2 * v) <= 1e-2);
  }
  SUBCASE("quadratic deformation of the equator") {
    NambuField zf = make_field(DomainKind::sphere2, "z");
    NambuField theta = make_field(DomainKind::sphere2, "z*(1 + 0.25*z)");
    DeformationCoordinates dc = deformation_coordinates(zf, theta, g, kEps);
    REQUIRE(dc.c.size() == 1);
    CHECK(std::abs(dc.c[0] - 1.0) <= 1e-3);
    CHECK(std::abs(dc.v_rel - testutil::kPi) <= 1e-2);
  }
  SUBCASE("mismatched loci are rejected") {
    NambuField other = make_field(DomainKind::sphere2, "z + 0.5");
    NambuField zf = make_field(DomainKind::sphere2, "z");
    CHECK_THROWS_AS(deformation_coordinates(zf, other, g, kEps), LocusMismatch);
  }
  SUBCASE("non-generic theta is reported as such") {
    NambuField zf = make_field(DomainKind::sphere2, "z");
    NambuField bad = make_field(DomainKind::sphere2, "z^3");
    CHECK_THROWS_AS(deformation_coordinates(zf, bad, g, kEps), NotGenericTheta);
  }
}

TEST_CASE("deformation group dimension counts components plus one") {
  struct Case {
    DomainKind kind;
    const char* f;
    std::vector<int> res;
    int dim;
  };
  for (const Case& c : {Case{DomainKind::sphere2, "z", {96, 192}, 2},
                        Case{DomainKind::torus2, "2 + sin(2*pi*x)", {64, 64}, 1},
                        Case{DomainKind::sphere2, "(z - 0.5)*(z + 0.5)", {96, 192}, 3}}) {
    Setup s = setup(c.kind, c.f, c.res);
    auto [dim, gens] = h2_report(s.field, s.ext.components);
    CHECK(dim == c.dim);
    CHECK(gens.size() == static_cast<std::size_t>(dim));
    CHECK(gens.back() == "volume_form");
  }
}

TEST_CASE("deformation coordinates on the 3-torus") {
  QuadGrid g = make_grid(Domain{DomainKind::torus3}, std::array<int, 3>{32, 32, 32});
  NambuField base = make_field(DomainKind::torus3, "sin(2*pi*x)");
  NambuField twice = make_field(DomainKind::torus3, "2*sin(2*pi*x)");
  DeformationCoordinates dc = deformation_coordinates(base, twice, g, kEps);
  REQUIRE(dc.c.size() == 2);
  CHECK(std::abs(dc.c[0] - 2.0) <= 1e-6);
  CHECK(std::abs(dc.c[1] - 2.0) <= 1e-6);
  CHECK(std::abs(dc.v_rel) <= 1e-3);  // odd field: both volumes vanish
}

TEST_CASE("empty locus: the volume is the plain integral") {
  Setup s = setup(DomainKind::sphere2, "0.5", {96, 192});
  CHECK(s.ext.components.empty());
  std::vector<double> eps = default_eps_schedule(s.field, s.grid);
  VolumeResult v = regularized_volume(s.field, s.grid, eps);
  CHECK(std::abs(v.value - 8 * testutil::kPi) <= 1e-3 * 8 * testutil::kPi);
}

TEST_CASE("convergence diagnostics are monotone at the reported tolerance") {
  Setup s = setup(DomainKind::sphere2, "z + 0.5", {192, 384});
  VolumeResult v = regularized_volume(s.field, s.grid, kEps);
  CHECK(v.diag.monotone);
  CHECK(std::abs(v.diag.value_prev_pair - v.value) <= 1e-2);

  // curved but valid cutoff: h = (z + 0.5)(1 + z*y) keeps the zero set; its
  // I(eps) bends enough that it needs the finer schedule to converge
  Expression h = parse("z + z*z*y + 0.5 + 0.5*z*y", DomainKind::sphere2);
  std::vector<double> fine{0.04, 0.02, 0.01};
  VolumeResult vh = volume_with_cutoff(s.field, s.grid, h, fine);
  CHECK(vh.diag.monotone);
  CHECK(std::abs(vh.value - v.value) <= 1e-2);
}

}  // TEST_SUITE
