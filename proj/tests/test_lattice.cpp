#include <cmath>
#include <set>

#include "carpetperc/error.hpp"
#include "carpetperc/lattice.hpp"
#include "doctest.h"

using namespace carpetperc;

namespace {

// Classic carpet test: a cell is removed when some base-3 digit pair is (1,1).
bool carpet_cell(Coord a, Coord b) {
  while (a > 0 || b > 0) {
    if (a % 3 == 1 && b % 3 == 1) return false;
    a /= 3;
    b /= 3;
  }
  return true;
}

// Brute vertex/edge count for a w x h block of s x s level copies.
std::pair<std::size_t, std::size_t> brute_counts(Coord s, Coord w, Coord h) {
  std::set<std::pair<Coord, Coord>> v;
  for (Coord a = 0; a < w; ++a)
    for (Coord b = 0; b < h; ++b)
      if (carpet_cell(a % s, b % s))
        for (int dx = 0; dx <= 1; ++dx)
          for (int dy = 0; dy <= 1; ++dy) v.insert({a + dx, b + dy});
  std::size_t e = 0;
  for (auto [x, y] : v) e += v.count({x + 1, y}) + v.count({x, y + 1});
  return {v.size(), e};
}

}  // namespace

TEST_CASE("generator parsing") {
  const auto T = GeneratorSet::carpet3();
  CHECK(T.cells().size() == 8);
  CHECK_FALSE(T.contains(1, 1));
  CHECK(GeneratorSet::parse("carpet3").to_string() == T.to_string());
  CHECK(GeneratorSet::parse("0,0;0,1;0,2;1,0;1,2;2,0;2,1;2,2").to_string() == T.to_string());
  CHECK(GeneratorSet::parse("full3").cells().size() == 9);
  CHECK_THROWS_AS(GeneratorSet::parse("0,0;x"), Error);
  CHECK(check_generator_conditions(T).all());
  CHECK(check_generator_conditions(GeneratorSet::full(3)).all());
  CHECK_FALSE(check_generator_conditions(GeneratorSet::parse("3:0,0;0,1;0,2;2,2")).connected);
  CHECK_FALSE(check_generator_conditions(GeneratorSet::parse("3:1,0;1,1;1,2")).left_column_full);
}

TEST_CASE("cell addresses") {
  const auto T = GeneratorSet::carpet3();
  CHECK(retained_cell({{{0, 0}, {2, 1}}}, T));
  CHECK_FALSE(retained_cell({{{1, 1}, {0, 0}}}, T));
  try {
    retained_cell({{{3, 0}}}, T);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidAddress);
  }
  int kept = 0;
  for (Coord a = 0; a < 9; ++a)
    for (Coord b = 0; b < 9; ++b) {
      CHECK(level_cell_retained(T, 2, a, b) == carpet_cell(a, b));
      kept += level_cell_retained(T, 2, a, b);
    }
  CHECK(kept == 64);
  for (Coord a = -30; a < 30; ++a)
    for (Coord b = -30; b < 30; ++b)
      CHECK(full_cell_retained(T, a, b) == carpet_cell(a < 0 ? -a - 1 : a, b < 0 ? -b - 1 : b));
}

TEST_CASE("sponge counts") {
  const auto T = GeneratorSet::carpet3();
  auto g1 = build_sponge(1, 1, 1, T);
  CHECK(g1.vertex_count() == 16);
  CHECK(g1.edge_count() == 24);
  auto g2 = build_sponge(2, 1, 1, T);
  CHECK(g2.vertex_count() == 96);
  CHECK(g2.edge_count() == 168);
  auto g01 = build_sponge(0, 2, 1, T);
  CHECK(g01.vertex_count() == 6);
  CHECK(g01.edge_count() == 7);
  auto g0 = build_sponge(0, 2, 2, T);
  CHECK(g0.vertex_count() == 9);
  CHECK(g0.edge_count() == 12);
  auto w = build_full_window(1, T);
  CHECK(w.vertex_count() == 49);
  CHECK(w.edge_count() == 84);
  for (int n = 0; n <= 3; ++n) {
    auto g = build_sponge(n, 3, 2, T);
    const Coord s = ipow(3, n);
    auto [bv, be] = brute_counts(s, 3 * s, 2 * s);
    CHECK(g.vertex_count() == bv);
    CHECK(g.edge_count() == be);
  }
  auto r = build_region({0, 0, 27, 27}, T);
  CHECK(r.same_shape(build_sponge(3, 1, 1, T)));
}

TEST_CASE("canonical order and lookups") {
  const auto T = GeneratorSet::carpet3();
  auto g = build_sponge(2, 2, 1, T, {5, -3});
  for (std::size_t i = 1; i < g.vertex_count(); ++i) CHECK(g.vertices()[i - 1] < g.vertices()[i]);
  for (EdgeId e = 0; e < static_cast<EdgeId>(g.edge_count()); ++e) {
    auto lo = g.edge_low(e), hi = g.edge_high(e);
    CHECK(*g.edge_id(hi, lo) == e);
    CHECK(g.edges()[e].horizontal == (hi.y == lo.y));
    if (e > 0) {
      auto plo = g.edge_low(e - 1);
      CHECK((plo < lo || (plo == lo && g.edges()[e - 1].horizontal && !g.edges()[e].horizontal)));
    }
  }
  CHECK_FALSE(g.has_vertex({5 + 4, -3 + 4}));
  CHECK(g.has_vertex({5 + 3, -3 + 3}));
  CHECK_FALSE(g.has_cell({5 + 3, -3 + 3}));
  CHECK(g.has_cell({5, -3}));
}

TEST_CASE("capacity guard") {
  const auto T = GeneratorSet::carpet3();
  Limits lim;
  lim.max_cells = 1000;
  try {
    build_sponge(4, 1, 1, T, {}, lim);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Capacity);
  }
  CHECK_THROWS_AS(build_sponge(-1, 1, 1, T), Error);
  CHECK_THROWS_AS(build_sponge(1, 0, 1, T), Error);
}

TEST_CASE("restriction keeps parent edges") {
  const auto T = GeneratorSet::carpet3();
  auto g = build_sponge(2, 2, 2, T);
  auto sub = restrict_to(g, {3, 2, 14, 11});
  CHECK(sub.graph.edge_count() == sub.parent_edge.size());
  for (EdgeId e = 0; e < static_cast<EdgeId>(sub.graph.edge_count()); ++e) {
    CHECK(g.edge_low(sub.parent_edge[e]) == sub.graph.edge_low(e));
    CHECK(g.edge_key(sub.parent_edge[e]) == sub.graph.edge_key(e));
  }
}

TEST_CASE("transforms") {
  const auto T = GeneratorSet::carpet3();
  auto g = build_sponge(2, 1, 1, T);
  auto rot = apply_transform(g, RegionTransform{1, false, false, {9, 0}});
  CHECK(rot.same_shape(g));
  auto shifted = apply_transform(g, RegionTransform::translation({4, 7}));
  CHECK(shifted.box() == Rect{4, 7, 13, 16});
  CHECK(shifted.edge_count() == g.edge_count());
}

TEST_CASE("vertex locality") {
  const auto T = GeneratorSet::carpet3();
  CHECK(level_of({0, 0}, T) == 0);
  CHECK(level_of({2, 3}, T) == 1);
  CHECK(level_of({10, 0}, T) == 3);
  CHECK_THROWS_AS(level_of({4, 4}, T), Error);
  CHECK(nth_box({4, 0}, 2, T) == Point{0, 0});
  CHECK(nth_box({9, 0}, 2, T) == Point{0, 0});
  CHECK(nth_box({10, 0}, 3, T) == Point{0, 0});
  CHECK(nth_box_any({30, 2}, 3, T) == Point{27, 0});
  CHECK(nth_box_any({-30, 2}, 3, T) == Point{-54, 0});
  try {
    nth_box({10, 0}, 2, T);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Level);
  }
  CHECK(separation_scale({0, 0}, {6, 6}, T) == 0);
  CHECK(separation_scale({0, 0}, {7, 6}, T) >= 0);
  for (Coord a : {0, 9, 20, 27, 81})
    for (Coord b : {0, 13, 54, 100}) {
      const Point x{a, 0}, y{b, 0};
      if (!in_carpet(y, T) || !in_carpet(x, T)) continue;
      const int n = separation_scale(x, y, T);
      const double d = std::abs(static_cast<double>(a - b));
      CHECK(d <= 6 * std::sqrt(2.0) * static_cast<double>(ipow(3, n)) + 1e-9);
    }
}
