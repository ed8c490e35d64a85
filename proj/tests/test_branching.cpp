#include <doctest.h>

#include <algorithm>
#include <functional>
#include <random>
#include <set>
#include <tuple>

#include "carpetperc/branching.hpp"
#include "carpetperc/error.hpp"

using namespace carpetperc;

namespace {

const GeneratorSet kT = GeneratorSet::carpet3();

TreeIndex idx(const std::string& s) { return TreeIndex::parse(s); }

// walk the digits keeping track of which run (vertical or horizontal) is current
EllOffsets phase_oracle(const TreeIndex& j, int N) {
  EllOffsets out;
  out.v += 2 * ipow(3, N + 1);
  bool vertical = true;
  for (int a = 1; a <= j.depth(); ++a) {
    if (j.digits[a - 1] == 2) vertical = !vertical;
    (vertical ? out.v : out.h) += 2 * ipow(3, N - a + 1);
  }
  return out;
}

using PieceKey = std::tuple<Coord, Coord, Coord, Coord, int>;

std::multiset<PieceKey> keys(const BoxSpec& b, bool reflect) {
  std::multiset<PieceKey> out;
  for (const auto& p : b.pieces) {
    const Rect& r = p.rect;
    Direction d = p.dir;
    if (reflect) out.insert({r.y0, r.x0, r.y1, r.x1, static_cast<int>(flip(d))});
    else out.insert({r.x0, r.y0, r.x1, r.y1, static_cast<int>(d)});
  }
  return out;
}

}  // namespace

TEST_CASE("tree indices round-trip through heap order and text") {
  const auto nodes = tree_nodes(4);
  CHECK(nodes.size() == 31);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    CHECK(nodes[i].heap_index() == i);
    CHECK(TreeIndex::parse(nodes[i].to_string()) == nodes[i]);
    if (i > 0) CHECK(nodes[i].parent().heap_index() == (i - 1) / 2);
  }
  CHECK(idx("0").is_root());
  CHECK(idx("12").child(2) == idx("122"));
  CHECK(tree_distance(idx("11"), idx("12")) == 2);
  CHECK(tree_distance(idx("1"), idx("122")) == 2);
  CHECK(tree_distance(idx("2"), idx("122")) == 4);
  CHECK(tree_distance(idx("0"), idx("2")) == 1);
  CHECK_THROWS_AS(TreeIndex::parse("13"), Error);
  CHECK_THROWS_AS(idx("0").parent(), Error);
}

TEST_CASE("tree statistics") {
  auto a = tree_stats(idx("11"));
  CHECK(a.n2 == 0);
  CHECK(a.epsilon == 0);
  auto b = tree_stats(idx("212"));
  CHECK(b.n2 == 2);
  CHECK(b.epsilon == 0);
  CHECK(b.tau == std::vector<int>{1, 3});
  CHECK(tree_stats(idx("2")).epsilon == 1);
}

TEST_CASE("run lengths agree with the phase walk") {
  for (int N = 1; N <= 6; ++N)
    for (const auto& j : tree_nodes(N - 1)) {
      const auto got = ell_offsets(j, N);
      const auto want = phase_oracle(j, N);
      CHECK(got.v == want.v);
      CHECK(got.h == want.h);
    }
  const int N = 4;
  const Coord s = ipow(3, N);
  CHECK(ell_offsets(idx("0"), N).v == 6 * s);
  CHECK(ell_offsets(idx("1"), N).v == 8 * s);
  CHECK(ell_offsets(idx("1"), N).h == 0);
  CHECK(ell_offsets(idx("2"), N).v == 6 * s);
  CHECK(ell_offsets(idx("2"), N).h == 2 * s);
  CHECK(ell_offsets(idx("22"), N).v == 6 * s + 2 * s / 3);
  CHECK(ell_offsets(idx("22"), N).h == 2 * s);
  CHECK_THROWS_AS(ell_offsets(idx("1111"), N), Error);
}

TEST_CASE("anchors of the first generation") {
  const int N = 3;
  const Coord s = ipow(3, N);
  CHECK(anchor(idx("1"), N) == Point{9 * s, 6 * s});
  CHECK(anchor(idx("2"), N) == Point{8 * s, 6 * s});
  CHECK(delta_h(idx("0"), N) == s);
  CHECK(delta_v(idx("0"), N) == 0);
  for (const auto& j : tree_nodes(N - 1)) {
    if (j.is_root()) continue;
    const Point a = anchor(j, N), b = mirror_anchor(j, N);
    CHECK(b == Point{a.y, a.x});
  }
  CHECK_THROWS_AS(anchor(idx("0"), N), Error);
}

TEST_CASE("root box is the straight mother box moved right") {
  const int N = 2;
  const Coord u = ipow(3, N - 1), s = ipow(3, N);
  const auto b = build_box(idx("0"), N);
  CHECK(b.kind == BoxKind::Straight);
  REQUIRE(b.pieces.size() == 4);
  CHECK(b.pieces[0].name == "V");
  CHECK(b.pieces[0].rect == Rect{9 * s - 3 * u, -3 * u, 9 * s + 3 * u, 19 * u});
  CHECK(b.pieces[0].dir == Direction::UpDown);
  CHECK(b.pieces[1].rect == Rect{9 * s - 4 * u, 17 * u, 9 * s + 4 * u, 19 * u});
  CHECK(b.pieces[1].dir == Direction::LeftRight);
  CHECK(build_box(idx("2"), N).kind == BoxKind::Branching);
  CHECK_THROWS_AS(build_box(idx("11"), N), Error);
}

TEST_CASE("mirror boxes are diagonal reflections") {
  for (int N = 1; N <= 5; ++N)
    for (const auto& j : tree_nodes(N - 1)) CHECK(keys(mirror_box(j, N), false) == keys(build_box(j, N), true));
}

TEST_CASE("tree cluster against a recursive oracle") {
  std::mt19937_64 rng(7);
  for (int depth = 0; depth <= 5; ++depth)
    for (int rep = 0; rep < 20; ++rep) {
      const std::size_t count = (std::size_t{1} << (depth + 1)) - 1;
      std::vector<std::uint8_t> v(count);
      for (auto& x : v) x = rng() % 4 != 0;
      const auto c = tree_cluster(v, depth);
      std::vector<std::uint8_t> want(count, 0);
      std::function<void(std::size_t)> grow = [&](std::size_t i) {
        if (i >= count || !v[i]) return;
        want[i] = 1;
        grow(2 * i + 1);
        grow(2 * i + 2);
      };
      grow(0);
      CHECK(c.member == want);
    }
  const auto full = tree_cluster(std::vector<std::uint8_t>(15, 1), 3);
  CHECK(full.generation == std::vector<std::int64_t>{1, 2, 4, 8});
  CHECK_THROWS_AS(tree_cluster(std::vector<std::uint8_t>(6, 1), 2), Error);
}

TEST_CASE("box events on extreme and sampled configurations") {
  const auto g = build_branching_window(2, 1, kT);
  BranchingField field(g, 2, 1);
  CHECK(field.nodes().size() == 3);
  const auto open = field(BondConfiguration(g, true));
  const auto closed = field(BondConfiguration(g, false));
  for (std::size_t i = 0; i < open.size(); ++i) {
    CHECK(open.z(i) == 1);
    CHECK(closed.z(i) == 0);
  }
  CHECK(tree_cluster(open).generation == std::vector<std::int64_t>{1, 2});
  CHECK(detect_box_event(BondConfiguration(g, true), idx("2"), 2));
  CHECK(!detect_mirror_event(BondConfiguration(g, false), idx("1"), 2));

  // coupled samples: the field can only grow with p
  for (std::uint64_t rep = 0; rep < 30; ++rep) {
    const auto lo = field(sample_config(g, 0.55, 11, rep));
    const auto hi = field(sample_config(g, 0.8, 11, rep));
    for (std::size_t i = 0; i < lo.size(); ++i) {
      CHECK(lo.x[i] <= hi.x[i]);
      CHECK(lo.x_dagger[i] <= hi.x_dagger[i]);
    }
    const auto w = sample_config(g, 0.7, 12, rep);
    const auto f = field(w);
    for (std::size_t i = 0; i < f.size(); ++i) {
      const auto parts = field.constituents(w, i);
      REQUIRE(parts.size() == 8);
      CHECK(f.z(i) == std::all_of(parts.begin(), parts.end(), [](bool b) { return b; }));
    }
  }
}

TEST_CASE("Q squares of the last generation are disjoint") {
  const int N = 4, m = 2;
  std::set<Coord> centres;
  for (const auto& j : tree_nodes(N - m))
    if (j.depth() == N - m) {
      const Point c = q_center(j, N, m);
      CHECK(c.x == c.y);
      centres.insert(c.x);
      CHECK(q_square(j, N, m).width() == 2 * ipow(3, m + 1));
    }
  CHECK(centres == std::set<Coord>{486, 567, 648, 729});
  CHECK(audit_q_disjoint(N, m));
  CHECK(connection_cost(2) == 216);
  CHECK_THROWS_AS(q_center(idx("1"), N, m), Error);
}

TEST_CASE("box geometry audit") {
  for (int N = 2; N <= 5; ++N)
    for (int m = 1; m <= 2 && m <= N; ++m) {
      const auto rep = geometry_audit(N, m);
      CHECK_MESSAGE(rep.clean(), "N=" << N << " m=" << m);
    }
  CHECK(geometry_audit(3, 2, kT, true).interior_hole_cells > 0);

  // a box slid by one unit leaves S^T somewhere on its boundary
  auto shifted = build_box(idx("0"), 3);
  for (auto& p : shifted.pieces) p.rect = p.rect.shifted({1, 1});
  CHECK(audit_boxes({shifted}, kT).boundary_violations > 0);

  // two far-apart tree nodes stacked on the same place
  auto a = build_box(idx("11"), 3), b = build_box(idx("22"), 3);
  b.pieces = a.pieces;
  const auto rep = audit_boxes({a, b}, kT);
  CHECK(rep.overlap_violations == 1);
  CHECK(!rep.clean());
}
