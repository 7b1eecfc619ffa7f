#include <cmath>

#include "doctest.h"

#include "heatlab/error.hpp"
#include "heatlab/generators.hpp"
#include "heatlab/graph.hpp"
#include "oracles.hpp"

using namespace heatlab;

namespace {

void check_invariants(const WeightedGraph& g) {
  for (Vertex x = 0; x < g.vertex_count(); ++x) {
    double sum = 0.0;
    for (const auto& nb : g.neighbors(x)) {
      CHECK(nb.weight > 0);
      CHECK(g.weight(nb.id, x) == nb.weight);
      sum += nb.weight;
    }
    CHECK(g.measure(x) == doctest::Approx(sum).epsilon(1e-15));
  }
  auto d = oracle::bfs(g, 0);
  CHECK(std::count(d.begin(), d.end(), -1) == 0);
}

long ipow(long b, int e) {
  long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

}  // namespace

TEST_CASE("lattice sizes and errors") {
  auto path = lattice(1, 11);
  CHECK(path.vertex_count() == 11);
  CHECK(path.measure(path.landmark("center")) == 2);
  auto sq = lattice(2, 5);
  CHECK(sq.vertex_count() == 25);
  CHECK(sq.edge_count() == 40);
  auto cube = lattice(3, 5);
  CHECK(cube.edge_count() == 3 * 5 * 5 * 4);
  CHECK_THROWS_AS(lattice(2, 4), Error);
  CHECK_THROWS_AS(lattice(2, 3), Error);
  CHECK_THROWS_AS(lattice(4, 5), Error);
  for (const auto& g : {path, sq, cube}) check_invariants(g);
}

TEST_CASE("lattice interior p0 is 1/(2d)") {
  for (int d = 1; d <= 3; ++d) {
    auto g = lattice(d, 7);
    Vertex c = g.landmark("center");
    for (const auto& nb : g.neighbors(c)) CHECK(nb.weight / g.measure(c) == doctest::Approx(1.0 / (2 * d)));
  }
}

TEST_CASE("gasket counts follow the closed forms") {
  for (int n = 1; n <= 8; ++n) {
    auto g = sierpinski_gasket(n);
    CHECK(g.vertex_count() == 3 * (ipow(3, n) + 1) / 2);
    CHECK(static_cast<long>(g.edge_count()) == ipow(3, n + 1));
    if (n <= 5) check_invariants(g);
  }
  CHECK(sierpinski_gasket(1).vertex_count() == 6);
  CHECK(sierpinski_gasket(2).edge_count() == 27);
  try {
    sierpinski_gasket(9);
    FAIL("expected LevelTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LevelTooLarge);
  }
  CHECK_THROWS_AS(sierpinski_gasket(0), Error);
}

TEST_CASE("gasket landmarks and degrees") {
  auto g = sierpinski_gasket(4);
  Vertex apex = g.landmark("apex");
  CHECK(g.degree(apex) == 2);
  CHECK(g.degree(g.landmark("corner_b")) == 2);
  int four = 0;
  for (Vertex x = 0; x < g.vertex_count(); ++x) four += g.degree(x) == 4;
  CHECK(four == g.vertex_count() - 3);
  // The apex is farthest from the truncated far corners.
  CHECK(g.boundary_distance(apex) == 16);
}

TEST_CASE("vicsek tree") {
  auto star = vicsek_tree(1);
  CHECK(star.vertex_count() == 5);
  CHECK(star.degree(star.landmark("center")) == 4);
  auto g2 = vicsek_tree(2);
  CHECK(g2.vertex_count() == 25);
  for (int n = 1; n <= 5; ++n) {
    auto g = vicsek_tree(n);
    CHECK(static_cast<long>(g.edge_count()) == g.vertex_count() - 1);
    check_invariants(g);
  }
  CHECK_THROWS_AS(vicsek_tree(9), Error);
}

TEST_CASE("glue identifies one vertex of each copy") {
  auto a = lattice(1, 5), b = lattice(1, 7);
  auto g = glue(a, b, 4, 0);
  CHECK(g.vertex_count() == 11);
  CHECK(g.edge_count() == 10);
  check_invariants(g);
  // A longer path: two degree-1 ends.
  int ends = 0;
  for (Vertex x = 0; x < g.vertex_count(); ++x) ends += g.degree(x) == 1;
  CHECK(ends == 2);

  auto sq = lattice(2, 5);
  auto gs = sierpinski_gasket(3);
  auto hybrid = glue(sq, gs, 0, gs.landmark("apex"));
  CHECK(hybrid.vertex_count() == sq.vertex_count() + gs.vertex_count() - 1);
  check_invariants(hybrid);
  // The junction carries both incident weight sums.
  Vertex junction = 0;
  CHECK(hybrid.measure(junction) == sq.measure(0) + gs.measure(gs.landmark("apex")));

  auto twice = glue(gs, gs, 0, 0);
  CHECK(twice.vertex_count() == 2 * gs.vertex_count() - 1);
}

TEST_CASE("reweight is deterministic and order independent") {
  auto g = lattice(2, 9);
  auto s = WeightScheme::parse("uniform:0.5:2:11");
  auto a = reweight(g, s), b = reweight(g, s);
  auto ea = a.edges(), eb = b.edges();
  for (std::size_t i = 0; i < ea.size(); ++i) {
    CHECK(ea[i].w == eb[i].w);
    CHECK(ea[i].w >= 0.5);
    CHECK(ea[i].w <= 2.0);
  }
  check_invariants(a);
  CHECK(check_p0(a) >= 0.5 / (0.5 + 3 * 2.0) - 1e-15);
}

TEST_CASE("generate dispatches on the family") {
  GraphFamilySpec spec;
  spec.family = Family::Gasket;
  spec.size = 3;
  CHECK(generate(spec).vertex_count() == 42);
  spec.family = Family::Vicsek;
  CHECK(generate(spec).vertex_count() == 125);
  spec.family = Family::Lattice;
  spec.size = 9;
  spec.dim = 2;
  CHECK(generate(spec).vertex_count() == 81);
  CHECK(family_from_string("gasket") == Family::Gasket);
  CHECK_THROWS_AS(family_from_string("torus"), Error);
}
