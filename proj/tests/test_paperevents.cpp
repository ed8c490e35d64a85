#include <doctest.h>

#include <algorithm>
#include <functional>
#include <set>

#include "carpetperc/error.hpp"
#include "carpetperc/paperevents.hpp"

using namespace carpetperc;

namespace {

const GeneratorSet kT = GeneratorSet::carpet3();

EdgeId edge(const SpongeGraph& g, Point a, Point b) { return *g.edge_id(a, b); }

BondConfiguration only(const SpongeGraph& g, const std::function<bool(Point, Point)>& keep) {
  BondConfiguration w(g);
  for (EdgeId e = 0; e < static_cast<EdgeId>(g.edge_count()); ++e) w.set(e, keep(g.edge_low(e), g.edge_high(e)));
  return w;
}

BondConfiguration from_mask(const SpongeGraph& g, std::uint64_t mask) {
  BondConfiguration w(g);
  for (std::size_t e = 0; e < g.edge_count(); ++e) w.set(static_cast<EdgeId>(e), (mask >> e) & 1U);
  return w;
}

// Every self-avoiding open path from the left line to the right line meeting those lines only at
// its ends.
std::vector<LatticePath> all_crossings(const BondConfiguration& w) {
  const SpongeGraph& g = w.graph();
  std::vector<LatticePath> out;
  LatticePath cur;
  std::vector<char> used(g.vertex_count(), 0);
  std::function<void(VertexId)> dfs = [&](VertexId v) {
    if (g.vertices()[v].x == g.box().x1) {
      out.push_back(cur);
      return;
    }
    for (EdgeId e : g.incident(v)) {
      const VertexId u = g.other_end(e, v);
      if (!w.open(e) || used[u] || g.vertices()[u].x == g.box().x0) continue;
      used[u] = 1;
      cur.edges.push_back(e);
      cur.vertices.push_back(u);
      dfs(u);
      cur.edges.pop_back();
      cur.vertices.pop_back();
      used[u] = 0;
    }
  };
  for (VertexId v = 0; v < static_cast<VertexId>(g.vertex_count()); ++v) {
    if (g.vertices()[v].x != g.box().x0) continue;
    used[v] = 1;
    cur = {{}, {v}};
    dfs(v);
    used[v] = 0;
  }
  return out;
}

bool is_open_crossing(const BondConfiguration& w, const LatticePath& p) {
  const SpongeGraph& g = w.graph();
  if (p.vertices.size() != p.edges.size() + 1) return false;
  if (g.vertices()[p.vertices.front()].x != g.box().x0 || g.vertices()[p.vertices.back()].x != g.box().x1) return false;
  for (std::size_t i = 0; i < p.edges.size(); ++i) {
    const auto& e = g.edges()[p.edges[i]];
    if (!w.open(p.edges[i])) return false;
    const bool joins = (e.u == p.vertices[i] && e.v == p.vertices[i + 1]) || (e.v == p.vertices[i] && e.u == p.vertices[i + 1]);
    if (!joins) return false;
  }
  return true;
}

bool subset(const std::vector<char>& a, const std::vector<char>& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] && !b[i]) return false;
  return true;
}

std::set<EdgeId> as_set(const std::vector<EdgeId>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_CASE("pivotal edges of a single cell") {
  const auto g = build_sponge(0, 1, 1, kT);
  const EdgeId bottom = edge(g, {0, 0}, {1, 0}), top = edge(g, {0, 1}, {1, 1});
  const DualGraph d(g);
  const EventFn lr = [](const BondConfiguration& c) { return has_crossing(c, Direction::LeftRight); };

  BondConfiguration w(g);
  w.set(bottom, true);
  CHECK(as_set(pivotal_edges(w, lr)) == std::set<EdgeId>{bottom});
  CHECK(as_set(pivotal_crossing_edges(w, d, Direction::LeftRight)) == std::set<EdgeId>{bottom});

  const BondConfiguration open(g, true);
  CHECK(pivotal_edges(open, lr).empty());
  CHECK(pivotal_crossing_edges(open, d, Direction::LeftRight).empty());

  const BondConfiguration closed(g);
  CHECK(as_set(pivotal_edges(closed, lr)) == std::set<EdgeId>{bottom, top});
  CHECK(as_set(pivotal_crossing_edges(closed, d, Direction::LeftRight)) == std::set<EdgeId>{bottom, top});
}

TEST_CASE("fast pivotal set matches per-edge flips") {
  const std::vector<SpongeGraph> windows{build_sponge(1, 2, 2, kT), build_sponge(2, 1, 1, kT), build_sponge(1, 3, 1, kT)};
  for (const auto& g : windows) {
    const DualGraph d(g);
    for (Direction dir : {Direction::LeftRight, Direction::UpDown}) {
      const EventFn ev = [dir](const BondConfiguration& c) { return has_crossing(c, dir); };
      for (std::uint64_t s = 0; s < 30; ++s) {
        const auto w = sample_config(g, 0.5, s);
        CHECK(as_set(pivotal_crossing_edges(w, d, dir)) == as_set(pivotal_edges(w, ev)));
      }
    }
  }
}

TEST_CASE("lowest crossing: trivial configurations") {
  const auto g = build_sponge(2, 1, 1, kT);
  const auto r = lowest_crossing(BondConfiguration(g, true));
  REQUIRE(r);
  CHECK(r->edges.size() == 9);
  for (VertexId v : r->vertices) CHECK(g.vertices()[v].y == 0);
  CHECK_FALSE(lowest_crossing(BondConfiguration(g)));
}

TEST_CASE("lowest crossing against exhaustive path enumeration") {
  const std::vector<SpongeGraph> windows{build_sponge(1, 1, 1, GeneratorSet::full(2)), build_sponge(0, 3, 1, kT),
                                         build_sponge(0, 1, 2, kT), build_sponge(0, 2, 1, kT)};
  for (const auto& g : windows) {
    REQUIRE(g.edge_count() <= 12);
    for (std::uint64_t mask = 0; mask < (1ULL << g.edge_count()); ++mask) {
      const auto w = from_mask(g, mask);
      const auto paths = all_crossings(w);
      const auto r = lowest_crossing(w);
      REQUIRE(r.has_value() == !paths.empty());
      if (!r) continue;
      REQUIRE(is_open_crossing(w, *r));
      const auto mine = squares_below(g, *r);
      for (const auto& q : paths) {
        REQUIRE(subset(mine, squares_below(g, q)));
      }
    }
  }
}

TEST_CASE("leftmost closed dual path") {
  const auto g = build_sponge(2, 1, 1, kT);
  const auto base = only(g, [](Point a, Point b) { return a.y == 0 && b.y == 0; });
  const auto r = lowest_crossing(base);
  REQUIRE(r);
  const auto psi = leftmost_closed_dual_path(base, *r);
  REQUIRE(psi);
  REQUIRE(psi->squares.size() == 9);
  for (std::size_t i = 0; i < 9; ++i) CHECK(psi->squares[i] == Point{0, static_cast<Coord>(8 - i)});
  CHECK(psi->target == edge(g, {0, 0}, {1, 0}));

  const BondConfiguration open(g, true);
  CHECK_FALSE(leftmost_closed_dual_path(open, *lowest_crossing(open)));

  LatticePath bogus = *r;
  bogus.edges.pop_back();
  bogus.vertices.pop_back();
  CHECK_THROWS_AS(leftmost_closed_dual_path(base, bogus), Error);
}

TEST_CASE("e_psi is pivotal and psi is a closed dual path") {
  for (const auto& g : {build_sponge(1, 2, 2, kT), build_sponge(2, 2, 2, kT)}) {
    const DualGraph d(g);
    int found = 0;
    for (std::uint64_t s = 0; s < 300; ++s) {
      const auto w = sample_config(g, 0.5, s);
      const auto r = lowest_crossing(w, d);
      if (!r) continue;
      const auto psi = leftmost_closed_dual_path(w, *r);
      if (!psi) continue;
      ++found;
      CHECK(std::find(r->edges.begin(), r->edges.end(), psi->target) != r->edges.end());
      const auto piv = pivotal_crossing_edges(w, d, Direction::LeftRight);
      CHECK(std::find(piv.begin(), piv.end(), psi->target) != piv.end());
      for (EdgeId e : psi->crossed) CHECK_FALSE(w.open(e));
      for (std::size_t i = 1; i < psi->squares.size(); ++i) {
        const Point a = psi->squares[i - 1], b = psi->squares[i];
        CHECK(std::abs(a.x - b.x) + std::abs(a.y - b.y) == 1);
      }
    }
    CHECK(found > 20);
  }
}

TEST_CASE("Delta_n and the spanning cluster") {
  const auto g = build_sponge(2, 1, 1, kT);
  CHECK(detect_delta(BondConfiguration(g, true), 2, kT));
  CHECK_FALSE(detect_delta(BondConfiguration(g), 2, kT));
  auto rim = only(g, [](Point a, Point b) {
    return (a.y == 0 && b.y == 0) || (a.y == 9 && b.y == 9) || (a.x == 0 && b.x == 0) || (a.x == 9 && b.x == 9);
  });
  CHECK(detect_delta(rim, 2, kT));
  rim.set(edge(g, {4, 0}, {5, 0}), false);
  CHECK_FALSE(detect_delta(rim, 2, kT));
  CHECK_FALSE(spanning_cluster(rim, 2, kT));
  CHECK(spanning_cluster(BondConfiguration(g, true), 2, kT) == 0);
  CHECK_THROWS_AS(detect_delta(BondConfiguration(g, true), 3, kT), Error);

  const DeltaEvent ev(g, 2, kT);
  int hits = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const auto w = sample_config(g, 0.65, s);
    if (ev(w)) ++hits;
    CHECK(ev.audit(w));
  }
  CHECK(hits > 50);
}

TEST_CASE("Delta chain implies a connection to the origin") {
  const auto g = build_sponge(3, 1, 1, kT);
  const Point x{20, 5};
  CHECK(detect_delta_chain(BondConfiguration(g, true), x, 1, kT));
  CHECK_FALSE(detect_delta_chain(BondConfiguration(g), x, 1, kT));
  CHECK_THROWS_AS(detect_delta_chain(BondConfiguration(g), {4, 4}, 1, kT), Error);
  const auto boxes = only(g, [&](Point a, Point b) {
    const Rect home{0, 0, 3, 3}, there = home.shifted(nth_box_any(x, 1, kT));
    return (home.contains(a) && home.contains(b)) || (there.contains(a) && there.contains(b));
  });
  CHECK_FALSE(detect_delta_chain(boxes, x, 1, kT));

  const DeltaChainEvent ev(g, x, 1, kT);
  int hits = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const auto w = sample_config(g, 0.96, s);
    if (!ev(w)) continue;
    ++hits;
    CHECK(connected(w, {0, 0}, x));
  }
  CHECK(hits > 20);
}

TEST_CASE("surrounding dual rectangles") {
  const auto g = build_region({-6, -6, 9, 9}, kT);
  const Point x{1, 1};
  CHECK(detect_surrounding_dual(BondConfiguration(g), x, 1, kT));
  CHECK_FALSE(detect_surrounding_dual(BondConfiguration(g, true), x, 1, kT));
  const SurroundEvent ev(g, x, 1, kT);
  CHECK(ev.enclosure() == Rect{-3, -3, 6, 6});
  int hits = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const auto w = sample_config(g, 0.35, s);
    if (ev(w)) ++hits;
    CHECK(ev.audit(w));
  }
  CHECK(hits > 20);
  CHECK_THROWS_AS(SurroundEvent(g, x, 2, kT), Error);
}

TEST_CASE("E_n detours around the middle segment") {
  const auto g = build_sponge(1, 3, 1, kT);
  CHECK(detect_E(BondConfiguration(g, true), 2));
  CHECK_FALSE(detect_E(BondConfiguration(g), 2));
  const auto top = only(g, [](Point a, Point b) { return a.y == 3 && b.y == 3; });
  CHECK_FALSE(detect_E(top, 2));
  const auto around = only(g, [](Point a, Point b) {
    return (a.y == 0 && b.y == 0) || (a.x == 0 && b.x == 0) || (a.x == 9 && b.x == 9);
  });
  CHECK(detect_E(around, 2));
  CHECK(has_crossing(around, Direction::LeftRight));
}

TEST_CASE("chained E copies give a long crossing") {
  for (int n : {1, 2}) {
    const Coord s = ipow(3, n - 1);
    const int k = 3;
    const auto g = build_sponge(n - 1, k + 2, 1, kT, {-s, 0});
    const EChain chain(g, n, k);
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      const auto a = chain(sample_config(g, 0.7, seed));
      if (a.chain) ++hits;
      CHECK(a.holds());
    }
    CHECK(hits > 10);
  }
}

TEST_CASE("C-events: trivial, constructed and reflected") {
  const int n = 0;
  const auto g = build_region(c_event_region(n), kT);
  CHECK(detect_C(BondConfiguration(g, true), n, Corner::BottomLeft));
  CHECK(detect_C_composite(BondConfiguration(g, true), n, CornerSet::All));
  CHECK_FALSE(detect_C(BondConfiguration(g), n, Corner::BottomLeft));

  const auto ell = only(g, [](Point a, Point b) {
    return (a.y == 3 && b.y == 3 && b.x <= 3) || (a.x == 3 && b.x == 3 && b.y <= 3);
  });
  CHECK(detect_C(ell, n, Corner::BottomLeft));
  CHECK_FALSE(detect_C(ell, n, Corner::BottomRight));
  CHECK_FALSE(detect_C_composite(ell, n, CornerSet::Bottom));
  CHECK_THROWS_AS(detect_C(BondConfiguration(g), 1, Corner::BottomLeft), Error);

  // the region is symmetric under x -> 9-x and y -> 9-y
  auto reflect = [&](const BondConfiguration& w, bool horizontal) {
    BondConfiguration out(g);
    for (EdgeId e = 0; e < static_cast<EdgeId>(g.edge_count()); ++e) {
      auto m = [&](Point p) { return horizontal ? Point{9 - p.x, p.y} : Point{p.x, 9 - p.y}; };
      const auto img = g.edge_id(m(g.edge_low(e)), m(g.edge_high(e)));
      REQUIRE(img);
      out.set(*img, w.open(e));
    }
    return out;
  };
  const CEvent bl(g, n, Corner::BottomLeft), br(g, n, Corner::BottomRight), tl(g, n, Corner::TopLeft);
  int hits = 0;
  for (std::uint64_t s = 0; s < 500; ++s) {
    const auto w = sample_config(g, 0.6, s);
    if (bl(w)) ++hits;
    CHECK(br(w) == bl(reflect(w, true)));
    CHECK(tl(w) == bl(reflect(w, false)));
  }
  CHECK(hits > 20);
}

TEST_CASE("C-events combine into D_(n+2)") {
  const int n = 1;
  const auto g = build_region(c_event_region(n), kT);
  CHECK(check_d_implication(BondConfiguration(g, true), n));
  CHECK(check_d_implication(BondConfiguration(g), n));
  const DImplicationCheck check(g, n);
  CHECK(check(BondConfiguration(g, true)).top);
  int lhs = 0;
  for (double p : {0.4, 0.6, 0.75})
    for (std::uint64_t s = 0; s < 700; ++s) {
      const auto r = check(sample_config(g, p, s));
      if (r.top || r.bottom) ++lhs;
      CHECK(r.holds());
    }
  CHECK(lhs > 10);
}

TEST_CASE("annulus scan") {
  const auto g = build_sponge(3, 2, 2, kT);
  const std::vector<int> scales{0, 1};
  const auto all_open = annulus_pivotal_scan(BondConfiguration(g, true), scales);
  CHECK_FALSE(all_open.psi);
  for (const auto& s : all_open.scales) CHECK_FALSE(s.c_event);
  CHECK_THROWS_AS(annulus_pivotal_scan(BondConfiguration(g), scales), Error);

  const auto hook = only(g, [](Point a, Point b) { return a.y == 0 && b.y == 0; });
  const auto scan = annulus_pivotal_scan(hook, scales);
  REQUIRE(scan.psi);
  CHECK(scan.e_psi == edge(g, {0, 0}, {1, 0}));
  CHECK(scan.e_psi_pivotal);
  for (const auto& s : scan.scales) {
    CHECK(s.c_event);
    CHECK(s.pivotal_in_annulus);
  }

  CHECK(in_annulus(-9, 0, 1, {0, 0}));
  CHECK(in_annulus(-6, 5, 1, {0, 0}));
  CHECK_FALSE(in_annulus(-5.5, 5, 1, {0, 0}));
  CHECK_FALSE(in_annulus(-9.5, 0, 1, {0, 0}));

  // a planted bottom crossing under sparse open edges makes the dual hooks common
  int with_c = 0;
  for (std::uint64_t s = 0; s < 300; ++s) {
    auto w = sample_config(g, 0.15, s);
    for (EdgeId e = 0; e < static_cast<EdgeId>(g.edge_count()); ++e)
      if (g.edge_low(e).y == 0 && g.edge_high(e).y == 0) w.set(e, true);
    const auto sc = annulus_pivotal_scan(w, scales);
    if (sc.psi) CHECK(sc.e_psi_pivotal);
    for (const auto& rep : sc.scales) {
      if (rep.c_event) ++with_c;
      CHECK(rep.holds());
    }
  }
  CHECK(with_c > 50);
}
