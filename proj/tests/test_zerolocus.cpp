#include <doctest.h>

#include <array>
#include <cmath>
#include <set>

#include "nambu/zerolocus.hpp"
#include "test_helpers.hpp"

using namespace nambu;

namespace {
ExtractResult run_extract(DomainKind kind, const char* f_text, std::vector<int> res) {
  NambuField f = make_field(kind, f_text);
  QuadGrid g = make_grid(f.domain, std::span<const int>(res.data(), res.size()));
  return extract(f, g);
}
}  // namespace

TEST_SUITE("zerolocus") {

TEST_CASE("two parallel circles on the flat torus") {
  auto r = run_extract(DomainKind::torus2, "sin(2*pi*x)", {128, 128});
  REQUIRE(r.components.size() == 2);
  for (const auto& c : r.components) {
    CHECK(std::abs(c.total_measure - 1.0) <= 1e-3);
    CHECK(c.element_measure.size() == c.vertices.size());
    CHECK(c.min_grad > r.delta_t);
  }
}

TEST_CASE("the equator of the sphere") {
  auto r = run_extract(DomainKind::sphere2, "z", {128, 256});
  REQUIRE(r.components.size() == 1);
  CHECK(std::abs(r.components[0].total_measure - 2 * testutil::kPi) <= 1e-3);
}

TEST_CASE("nowhere-vanishing fields have an empty locus") {
  auto r = run_extract(DomainKind::torus2, "2 + sin(2*pi*x)", {64, 64});
  CHECK(r.components.empty());
  NambuField f = make_field(DomainKind::torus2, "2 + sin(2*pi*x)");
  QuadGrid g = make_grid(f.domain, std::array<int, 2>{64, 64});
  RegionMap rm = regions(f, g, r.components);
  CHECK(rm.region_count() == 1);
  CHECK(rm.region_signs[0] == 1);
  CHECK(rm.adjacency.empty());
}

TEST_CASE("degenerate zero sets violate genericity") {
  CHECK_THROWS_AS(run_extract(DomainKind::sphere2, "z^3", {96, 192}), NotGeneric);
}

TEST_CASE("fields vanishing at a pole are rejected") {
  CHECK_THROWS_AS(run_extract(DomainKind::sphere2, "x", {96, 192}), PoleViolation);
}

TEST_CASE("hemisphere regions of the equator") {
  NambuField f = make_field(DomainKind::sphere2, "z");
  QuadGrid g = make_grid(f.domain, std::array<int, 2>{128, 256});
  auto r = extract(f, g);
  RegionMap rm = regions(f, g, r.components);
  REQUIRE(rm.region_count() == 2);
  std::multiset<int> signs(rm.region_signs.begin(), rm.region_signs.end());
  CHECK(signs == std::multiset<int>{-1, 1});
  REQUIRE(rm.adjacency.size() == 1);
  CHECK(rm.region_signs[rm.adjacency[0].positive_region] == 1);
  CHECK(rm.region_signs[rm.adjacency[0].negative_region] == -1);
  CHECK(rm.adjacency[0].component == 0);
}

TEST_CASE("two parallel circles bound the same pair of regions twice") {
  NambuField f = make_field(DomainKind::torus2, "sin(2*pi*x)");
  QuadGrid g = make_grid(f.domain, std::array<int, 2>{128, 128});
  auto r = extract(f, g);
  RegionMap rm = regions(f, g, r.components);
  CHECK(rm.region_count() == 2);
  REQUIRE(rm.adjacency.size() == 2);
  CHECK(rm.adjacency[0].positive_region == rm.adjacency[1].positive_region);
  CHECK(rm.adjacency[0].negative_region == rm.adjacency[1].negative_region);
}

TEST_CASE("two latitude circles cut the sphere into three bands") {
  NambuField f = make_field(DomainKind::sphere2, "(z - 0.5)*(z + 0.5)");
  QuadGrid g = make_grid(f.domain, std::array<int, 2>{128, 256});
  auto r = extract(f, g);
  REQUIRE(r.components.size() == 2);
  RegionMap rm = regions(f, g, r.components);
  REQUIRE(rm.region_count() == 3);
  // north cap region (contains the north polar cap cell) is positive, the
  // middle band negative, the south cap positive again
  int north_region = rm.region_of_cell[g.north_cap()];
  int south_region = rm.region_of_cell[g.south_cap()];
  CHECK(rm.region_signs[north_region] == 1);
  CHECK(rm.region_signs[south_region] == 1);
  int middle = 3 - north_region - south_region;
  CHECK(rm.region_signs[middle] == -1);
  CHECK(rm.adjacency.size() == 2);
}

TEST_CASE("each circle disconnects the sphere") {
  // region count = component count + 1
  for (const char* f_text : {"z", "z + 0.5", "(z - 0.5)*(z + 0.5)"}) {
    NambuField f = make_field(DomainKind::sphere2, f_text);
    QuadGrid g = make_grid(f.domain, std::array<int, 2>{128, 256});
    auto r = extract(f, g);
    RegionMap rm = regions(f, g, r.components);
    CHECK(rm.region_count() == static_cast<int>(r.components.size()) + 1);
  }
}

TEST_CASE("refining the grid moves measures by less than a percent") {
  auto coarse = run_extract(DomainKind::sphere2, "z + 0.5", {96, 192});
  auto fine = run_extract(DomainKind::sphere2, "z + 0.5", {192, 384});
  REQUIRE(coarse.components.size() == fine.components.size());
  double a = coarse.components[0].total_measure;
  double b = fine.components[0].total_measure;
  CHECK(std::abs(a - b) / b < 0.01);

  auto c2 = run_extract(DomainKind::torus3, "sin(2*pi*x)", {32, 32, 32});
  auto f2 = run_extract(DomainKind::torus3, "sin(2*pi*x)", {64, 64, 64});
  REQUIRE(c2.components.size() == f2.components.size());
  CHECK(std::abs(c2.components[0].total_measure - f2.components[0].total_measure) /
            f2.components[0].total_measure <
        0.01);
}

TEST_CASE("negating f flips region signs and keeps the geometry") {
  NambuField f = make_field(DomainKind::sphere2, "z + 0.5");
  NambuField fm = make_field(DomainKind::sphere2, "-(z + 0.5)");
  QuadGrid g = make_grid(f.domain, std::array<int, 2>{96, 192});
  auto r = extract(f, g);
  auto rm_ = extract(fm, g);
  REQUIRE(r.components.size() == 1);
  REQUIRE(rm_.components.size() == 1);
  CHECK(r.components[0].total_measure ==
        doctest::Approx(rm_.components[0].total_measure).epsilon(1e-12));
  // same vertex positions as sets
  std::multiset<double> za, zb;
  for (const auto& v : r.components[0].vertices) za.insert(v.pos[2]);
  for (const auto& v : rm_.components[0].vertices) zb.insert(v.pos[2]);
  CHECK(za == zb);

  RegionMap ra = regions(f, g, r.components);
  RegionMap rb = regions(fm, g, rm_.components);
  REQUIRE(ra.region_count() == rb.region_count());
  for (long c = 0; c < g.cell_count(); ++c) {
    int qa = ra.region_of_cell[c], qb = rb.region_of_cell[c];
    CHECK((qa < 0) == (qb < 0));
    if (qa >= 0) CHECK(ra.region_signs[qa] == -rb.region_signs[qb]);
  }
}

TEST_CASE("torus3 components are closed meshes with the right area") {
  auto r = run_extract(DomainKind::torus3, "sin(2*pi*x)", {32, 32, 32});
  REQUIRE(r.components.size() == 2);
  for (const auto& c : r.components) {
    CHECK(c.element_dim == 2);
    CHECK(std::abs(c.total_measure - 1.0) <= 1e-2);
    CHECK(!c.triangles.empty());
  }
}

TEST_CASE("a curved isosurface in the 3-torus has the right topology") {
  // the level set cos + cos + cos = -1/2 is a single closed surface of
  // genus 3 (Euler characteristic -4) inside the unit cell
  auto r = run_extract(DomainKind::torus3, "cos(2*pi*x) + cos(2*pi*y) + cos(2*pi*z) + 0.5",
                       {48, 48, 48});
  REQUIRE(r.components.size() == 1);
  const auto& c = r.components[0];
  std::set<std::pair<int, int>> mesh_edges;
  for (const auto& t : c.triangles)
    for (int e = 0; e < 3; ++e) {
      int a = t[e], b = t[(e + 1) % 3];
      mesh_edges.insert({std::min(a, b), std::max(a, b)});
    }
  long chi = static_cast<long>(c.vertices.size()) - static_cast<long>(mesh_edges.size()) +
             static_cast<long>(c.triangles.size());
  CHECK(chi == -4);
  NambuField f = make_field(DomainKind::torus3,
                            "cos(2*pi*x) + cos(2*pi*y) + cos(2*pi*z) + 0.5");
  QuadGrid g = make_grid(f.domain, std::array<int, 3>{48, 48, 48});
  RegionMap rm = regions(f, g, r.components);
  CHECK(rm.region_count() == 2);
}

TEST_CASE("diagonal circles on the torus have exact length sqrt(2)") {
  auto r = run_extract(DomainKind::torus2, "sin(2*pi*(x + y))", {192, 192});
  REQUIRE(r.components.size() == 2);
  for (const auto& c : r.components)
    CHECK(std::abs(c.total_measure - std::sqrt(2.0)) <= 1e-3);
}

TEST_CASE("near-saddle ambiguous cells resolve consistently") {
  // the level curves pass close to the saddles of sin*sin, exercising the
  // center-value decider; topology must be grid-independent
  for (int res : {64, 96, 128}) {
    NambuField f = make_field(DomainKind::torus2, "sin(2*pi*x)*sin(2*pi*y) + 0.05");
    QuadGrid g = make_grid(f.domain, std::array<int, 2>{res, res});
    auto r = extract(f, g);
    REQUIRE(r.components.size() == 2);
    for (const auto& c : r.components)
      CHECK(std::abs(c.total_measure - 1.7543) < 0.01);
    RegionMap rm = regions(f, g, r.components);
    CHECK(rm.region_count() == 3);
  }
}

TEST_CASE("curve components walk closed cycles") {
  auto r = run_extract(DomainKind::sphere2, "z - 0.2", {96, 192});
  const auto& c = r.components.at(0);
  // consecutive vertices stay within a cell of each other, including the wrap
  const std::size_t n = c.vertices.size();
  double max_step = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Vec3 a = c.vertices[i].pos, b = c.vertices[(i + 1) % n].pos;
    max_step = std::max(max_step, norm3({a[0] - b[0], a[1] - b[1], a[2] - b[2]}));
  }
  CHECK(max_step < 0.1);
}

}  // TEST_SUITE
