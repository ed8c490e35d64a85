#include "carpetperc/paperevents.hpp"

#include <algorithm>
#include <array>
#include <deque>

#include "carpetperc/error.hpp"

namespace carpetperc {

namespace {

// 0 = east, 1 = north, 2 = west, 3 = south
constexpr std::array<Point, 4> kStep{Point{1, 0}, Point{0, 1}, Point{-1, 0}, Point{0, -1}};

std::optional<EdgeId> edge_between(const SpongeGraph& g, const Point& a, const Point& b) {
  return g.edge_id(a, b);
}

// Squares on the right and left of a primal step from p in direction d.
std::pair<Point, Point> step_sides(const Point& p, int d) {
  switch (d) {
    case 0: return {{p.x, p.y - 1}, {p.x, p.y}};
    case 1: return {{p.x, p.y}, {p.x - 1, p.y}};
    case 2: return {{p.x - 1, p.y}, {p.x - 1, p.y - 1}};
    default: return {{p.x - 1, p.y - 1}, {p.x, p.y - 1}};
  }
}

// Segment crossed when a dual walker leaves square q in direction d, as (right end, left end).
std::pair<Point, Point> crossing_ends(const Point& q, int d) {
  switch (d) {
    case 0: return {{q.x + 1, q.y}, {q.x + 1, q.y + 1}};
    case 1: return {{q.x + 1, q.y + 1}, {q.x, q.y + 1}};
    case 2: return {{q.x, q.y + 1}, {q.x, q.y}};
    default: return {{q.x, q.y}, {q.x + 1, q.y}};
  }
}

struct SquareIndex {
  Rect box;
  bool inside(const Point& q) const { return q.x >= box.x0 && q.x < box.x1 && q.y >= box.y0 && q.y < box.y1; }
  std::size_t operator()(const Point& q) const {
    return static_cast<std::size_t>((q.y - box.y0) * box.width() + (q.x - box.x0));
  }
  std::size_t size() const { return static_cast<std::size_t>(box.width() * box.height()); }
};

std::vector<char> edge_mask(const SpongeGraph& g, const LatticePath& r) {
  std::vector<char> m(g.edge_count(), 0);
  for (EdgeId e : r.edges) m[static_cast<std::size_t>(e)] = 1;
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------------------------

Probe::Probe(const SpongeGraph& ambient, std::vector<Rect> rects)
    : sub_(std::make_unique<SubGraph>(restrict_to(ambient, rects))) {
  if (sub_->graph.vertex_count() == 0) throw Error(ErrorKind::Geometry, "probe region holds no vertex of the window");
}

const DualGraph& Probe::dual() const {
  if (!dual_) dual_ = std::make_unique<DualGraph>(sub_->graph);
  return *dual_;
}

BondConfiguration Probe::pull(const BondConfiguration& w) const { return restrict_config(w, *sub_); }

// ---------------------------------------------------------------------------------------------

std::vector<EdgeId> pivotal_edges(const BondConfiguration& w, const EventFn& event) {
  BondConfiguration work = w;
  const bool base = event(work);
  std::vector<EdgeId> out;
  for (EdgeId e = 0; e < static_cast<EdgeId>(w.size()); ++e) {
    work.set(e, !w.open(e));
    if (event(work) != base) out.push_back(e);
    work.set(e, w.open(e));
  }
  return out;
}

std::vector<EdgeId> pivotal_crossing_edges(const BondConfiguration& w, const DualGraph& d, Direction dir) {
  const SpongeGraph& g = w.graph();
  const Rect& box = g.box();
  const auto c = clusters(w);
  const bool lr = dir == Direction::LeftRight;
  bool crossing = false;
  for (const auto& ext : c.extent)
    if (lr ? (ext.x0 == box.x0 && ext.x1 == box.x1) : (ext.y0 == box.y0 && ext.y1 == box.y1)) crossing = true;
  std::vector<EdgeId> out;
  if (crossing) {
    // closing an open edge kills every crossing iff it joins the two dual sides
    const auto label = lr ? dual_clusters(w, d, {Sector::Left, Sector::Right}) : dual_clusters(w, d, {Sector::Top, Sector::Bottom});
    const auto s1 = label[d.sector(lr ? Sector::Top : Sector::Left)];
    const auto s2 = label[d.sector(lr ? Sector::Bottom : Sector::Right)];
    for (const auto& de : d.edges()) {
      if (!w.open(de.primal)) continue;
      const auto a = label[de.a], b = label[de.b];
      if ((a == s1 && b == s2) || (a == s2 && b == s1)) out.push_back(de.primal);
    }
    return out;
  }
  auto touches_low = [&](std::int32_t k) { return lr ? c.extent[k].x0 == box.x0 : c.extent[k].y0 == box.y0; };
  auto touches_high = [&](std::int32_t k) { return lr ? c.extent[k].x1 == box.x1 : c.extent[k].y1 == box.y1; };
  for (EdgeId e = 0; e < static_cast<EdgeId>(g.edge_count()); ++e) {
    if (w.open(e)) continue;
    const auto a = c.label[g.edges()[e].u], b = c.label[g.edges()[e].v];
    if ((touches_low(a) && touches_high(b)) || (touches_low(b) && touches_high(a))) out.push_back(e);
  }
  return out;
}

// ---------------------------------------------------------------------------------------------

std::optional<LatticePath> lowest_crossing(const BondConfiguration& w, const DualGraph& d) {
  const SpongeGraph& g = w.graph();
  if (!has_crossing(w, Direction::LeftRight)) return std::nullopt;
  const Rect& box = g.box();
  const auto label = dual_clusters(w, d, {Sector::Left, Sector::Right});
  const auto bottom = label[d.sector(Sector::Bottom)];
  auto in_b = [&](const Point& q) { return label[d.face_of_square(q)] == bottom; };

  Coord h = box.y0;
  for (Coord y = box.y1 - 1; y >= box.y0; --y)
    if (in_b({box.x0, y})) {
      h = y + 1;
      break;
    }
  Point p{box.x0, h};
  auto v = g.vertex_id(p);
  if (!v) return std::nullopt;
  LatticePath path;
  path.vertices.push_back(*v);
  int dir = 0;
  const std::size_t cap = 4 * g.edge_count() + 8;
  while (p.x != box.x1) {
    if (path.edges.size() > cap) return std::nullopt;
    bool moved = false;
    for (int turn : {3, 0, 1, 2}) {
      const int nd = (dir + turn) % 4;
      const Point q = p + kStep[nd];
      const auto e = edge_between(g, p, q);
      if (!e || !w.open(*e)) continue;
      const auto [right, left] = step_sides(p, nd);
      if (!in_b(right) || in_b(left)) continue;
      path.edges.push_back(*e);
      path.vertices.push_back(*g.vertex_id(q));
      p = q;
      dir = nd;
      moved = true;
      break;
    }
    if (!moved) return std::nullopt;
  }
  return path;
}

std::optional<LatticePath> lowest_crossing(const BondConfiguration& w) {
  const DualGraph d(w.graph());
  return lowest_crossing(w, d);
}

std::vector<char> squares_below(const SpongeGraph& g, const LatticePath& r) {
  const SquareIndex idx{g.box()};
  const auto on_r = edge_mask(g, r);
  auto blocked = [&](const Point& a, const Point& b) {
    const auto e = edge_between(g, a, b);
    return e && on_r[static_cast<std::size_t>(*e)];
  };
  std::vector<char> below(idx.size(), 0);
  std::deque<Point> queue;
  for (Coord x = idx.box.x0; x < idx.box.x1; ++x) {
    const Point q{x, idx.box.y0};
    if (!blocked(q, {x + 1, idx.box.y0})) {
      below[idx(q)] = 1;
      queue.push_back(q);
    }
  }
  while (!queue.empty()) {
    const Point q = queue.front();
    queue.pop_front();
    for (int d = 0; d < 4; ++d) {
      const Point n = q + kStep[d];
      if (!idx.inside(n) || below[idx(n)]) continue;
      const auto [a, b] = crossing_ends(q, d);
      if (blocked(std::min(a, b), std::max(a, b))) continue;
      below[idx(n)] = 1;
      queue.push_back(n);
    }
  }
  return below;
}

std::optional<DualPath> leftmost_closed_dual_path(const BondConfiguration& w, const LatticePath& r,
                                                  std::optional<Rect> strip_opt) {
  const SpongeGraph& g = w.graph();
  const Rect& box = g.box();
  if (r.edges.empty() || r.vertices.size() != r.edges.size() + 1)
    throw Error(ErrorKind::Argument, "path is not a left-right crossing");
  for (EdgeId e : r.edges)
    if (e < 0 || e >= static_cast<EdgeId>(g.edge_count()) || !w.open(e))
      throw Error(ErrorKind::Argument, "crossing uses a closed or unknown edge");
  if (g.vertices()[r.vertices.front()].x != box.x0 || g.vertices()[r.vertices.back()].x != box.x1)
    throw Error(ErrorKind::Argument, "path does not join the left and right sides");

  Rect strip = strip_opt.value_or(box);
  strip = {std::max(strip.x0, box.x0), box.y0, std::min(strip.x1, box.x1), box.y1};
  if (strip.x1 <= strip.x0) throw Error(ErrorKind::Geometry, "strip misses the window");

  const SquareIndex idx{box};
  const auto below = squares_below(g, r);
  const auto on_r = edge_mask(g, r);
  auto is_below = [&](const Point& q) { return idx.inside(q) && below[idx(q)]; };

  // P: vertices reached from the strip's left side through open edges above r, plus r itself
  std::vector<char> in_p(g.vertex_count(), 0);
  std::deque<VertexId> queue;
  for (const auto& v : g.vertices()) {
    if (v.x != strip.x0 || is_below({v.x, v.y})) continue;
    const auto id = *g.vertex_id(v);
    in_p[id] = 1;
    queue.push_back(id);
  }
  auto allowed = [&](EdgeId e) {
    const Point a = g.edge_low(e), b = g.edge_high(e);
    if (a.x < strip.x0 || b.x > strip.x1) return false;
    if (on_r[static_cast<std::size_t>(e)]) return true;
    if (!w.open(e)) return false;
    const auto [s1, s2] = edge_side_squares(g, e);
    return !is_below(s1) && !is_below(s2);
  };
  while (!queue.empty()) {
    const VertexId v = queue.front();
    queue.pop_front();
    for (EdgeId e : g.incident(v)) {
      const VertexId u = g.other_end(e, v);
      if (in_p[u] || !allowed(e)) continue;
      in_p[u] = 1;
      queue.push_back(u);
    }
  }
  auto p_at = [&](const Point& pt) {
    const auto id = g.vertex_id(pt);
    return id && in_p[*id];
  };
  auto r_edge_at = [&](const Point& a, const Point& b) -> EdgeId {
    const auto e = edge_between(g, std::min(a, b), std::max(a, b));
    return e && on_r[static_cast<std::size_t>(*e)] ? *e : -1;
  };

  const std::size_t cap = 4 * idx.size() + 8;
  Coord gap = strip.x0;
  while (gap < strip.x1) {
    if (!(p_at({gap, box.y1}) && !p_at({gap + 1, box.y1}))) {
      ++gap;
      continue;
    }
    DualPath path;
    if (const EdgeId e = r_edge_at({gap, box.y1}, {gap + 1, box.y1}); e >= 0) {
      path.target = e;
      return path;
    }
    if (const auto e = edge_between(g, {gap, box.y1}, {gap + 1, box.y1})) path.crossed.push_back(*e);
    Point q{gap, box.y1 - 1};
    int dir = 3;
    bool restart = false;
    while (!restart) {
      path.squares.push_back(q);
      if (path.squares.size() > cap) return std::nullopt;
      for (int d = 0; d < 4; ++d) {
        const auto [a, b] = crossing_ends(q, d);
        const EdgeId e = r_edge_at(a, b);
        if (e >= 0) {
          path.target = e;
          return path;
        }
      }
      bool moved = false;
      for (int turn : {3, 0, 1, 2}) {
        const int nd = (dir + turn) % 4;
        const auto [right, left] = crossing_ends(q, nd);
        if (!p_at(right) || p_at(left)) continue;
        const Point n = q + kStep[nd];
        if (nd == 2 && q.x == strip.x0) continue;
        if (nd == 0 && n.x >= strip.x1) return std::nullopt;
        if (nd == 3 && n.y < box.y0) continue;
        if (const auto e = edge_between(g, std::min(right, left), std::max(right, left))) path.crossed.push_back(*e);
        if (nd == 1 && n.y >= box.y1) {
          // walked back out through the top: try the next gap to the right
          gap = std::max(gap + 1, q.x + 1);
          restart = true;
        } else {
          q = n;
          dir = nd;
        }
        moved = true;
        break;
      }
      if (!moved) return std::nullopt;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------------------------

namespace {

void require_inside(const SpongeGraph& ambient, const Rect& r, const char* what) {
  if (!ambient.box().contains(r))
    throw Error(ErrorKind::Geometry, std::string(what) + " needs " + to_string(r) + " inside the window " + to_string(ambient.box()));
}

// Labels (in `c`, a partition of the ambient) of the clusters holding the probe's crossing clusters.
std::vector<std::int32_t> lifted_crossing_labels(const Probe& probe, const BondConfiguration& w, Direction dir,
                                                 const ClusterPartition& c) {
  const auto sub = probe.pull(w);
  const auto pc = clusters(sub);
  const auto cross = crossing_clusters(probe.graph(), pc, dir);
  std::vector<std::int32_t> out;
  if (cross.empty()) return out;
  std::vector<char> want(pc.count(), 0);
  for (auto k : cross) want[static_cast<std::size_t>(k)] = 1;
  std::vector<char> seen(pc.count(), 0);
  const SpongeGraph& g = probe.graph();
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    const auto k = static_cast<std::size_t>(pc.label[v]);
    if (!want[k] || seen[k]) continue;
    seen[k] = 1;
    const auto id = w.graph().vertex_id(g.vertices()[v]);
    out.push_back(c.label[*id]);
  }
  return out;
}

}  // namespace

DeltaEvent::DeltaEvent(const SpongeGraph& ambient, int n, const GeneratorSet& T, Point shift) {
  if (n < 1) throw Error(ErrorKind::Geometry, "Delta_n needs n >= 1");
  const Coord L = T.base();
  const Coord s = ipow(L, n - 1);
  box_ = Rect{0, 0, L * s, L * s}.shifted(shift);
  require_inside(ambient, box_, "Delta_n");
  const Rect rects[4] = {{0, 0, L * s, s}, {0, 0, s, L * s}, {0, (L - 1) * s, L * s, L * s}, {(L - 1) * s, 0, L * s, L * s}};
  const Direction dirs[4] = {Direction::LeftRight, Direction::UpDown, Direction::LeftRight, Direction::UpDown};
  for (int i = 0; i < 4; ++i) pieces_.push_back({std::make_unique<Probe>(ambient, rects[i].shifted(shift)), dirs[i]});
}

bool DeltaEvent::operator()(const BondConfiguration& w) const {
  for (const auto& p : pieces_)
    if (!p.probe->crossing(w, p.dir)) return false;
  return true;
}

std::optional<std::int32_t> DeltaEvent::spanning_cluster(const BondConfiguration& w, const ClusterPartition& c) const {
  std::optional<std::int32_t> label;
  for (const auto& p : pieces_) {
    const auto labels = lifted_crossing_labels(*p.probe, w, p.dir, c);
    if (labels.empty()) return std::nullopt;
    for (auto l : labels) {
      if (label && *label != l) return std::nullopt;
      label = l;
    }
  }
  return label;
}

bool DeltaEvent::audit(const BondConfiguration& w) const {
  if (!(*this)(w)) return true;
  return spanning_cluster(w, clusters(w)).has_value();
}

bool detect_delta(const BondConfiguration& w, int n, const GeneratorSet& T, Point shift) {
  return DeltaEvent(w.graph(), n, T, shift)(w);
}

std::optional<std::int32_t> spanning_cluster(const BondConfiguration& w, int n, const GeneratorSet& T) {
  const DeltaEvent ev(w.graph(), n, T);
  return ev.spanning_cluster(w, clusters(w));
}

DeltaChainEvent::DeltaChainEvent(const SpongeGraph& ambient, const Point& x, int m0, const GeneratorSet& T) : x_(x) {
  if (m0 < 1) throw Error(ErrorKind::Argument, "chain needs m0 >= 1");
  if (!ambient.has_vertex(x)) throw Error(ErrorKind::NotAVertex, to_string(x) + " is not a vertex of the window");
  const int lx = level_of(x, T);
  for (int n = m0 + 1; n <= lx; ++n) {
    deltas_.emplace_back(ambient, n, T);
    deltas_.emplace_back(ambient, n, T, nth_box_any(x, n, T));
  }
  const Coord s = ipow(T.base(), m0);
  const Rect home{0, 0, s, s};
  const Rect there = home.shifted(nth_box_any(x, m0, T));
  require_inside(ambient, home, "chain");
  require_inside(ambient, there, "chain");
  for (EdgeId e = 0; e < static_cast<EdgeId>(ambient.edge_count()); ++e) {
    const Point a = ambient.edge_low(e), b = ambient.edge_high(e);
    if ((home.contains(a) && home.contains(b)) || (there.contains(a) && there.contains(b))) base_edges_.push_back(e);
  }
}

bool DeltaChainEvent::operator()(const BondConfiguration& w) const {
  for (EdgeId e : base_edges_)
    if (!w.open(e)) return false;
  for (const auto& d : deltas_)
    if (!d(w)) return false;
  return true;
}

bool detect_delta_chain(const BondConfiguration& w, const Point& x, int m0, const GeneratorSet& T) {
  return DeltaChainEvent(w.graph(), x, m0, T)(w);
}

SurroundEvent::SurroundEvent(const SpongeGraph& ambient, const Point& x, int n, const GeneratorSet& T) : x_(x) {
  if (!ambient.has_vertex(x)) throw Error(ErrorKind::NotAVertex, to_string(x) + " is not a vertex of the window");
  const Point w = nth_box_any(x, n, T);
  const Coord s = ipow(T.base(), n);
  enclosure_ = Rect{-s, -s, 2 * s, 2 * s}.shifted(w);
  require_inside(ambient, enclosure_, "surrounding rectangles");
  const Rect rects[4] = {{-s, s, 2 * s, 2 * s}, {-s, -s, 2 * s, 0}, {s, -s, 2 * s, 2 * s}, {-s, -s, 0, 2 * s}};
  for (const auto& r : rects) probes_.push_back(std::make_unique<Probe>(ambient, r.shifted(w)));
}

bool SurroundEvent::operator()(const BondConfiguration& w) const {
  const Direction dirs[4] = {Direction::LeftRight, Direction::LeftRight, Direction::UpDown, Direction::UpDown};
  for (int i = 0; i < 4; ++i)
    if (!probes_[i]->dual_crossing(w, dirs[i])) return false;
  return true;
}

bool SurroundEvent::audit(const BondConfiguration& w) const {
  if (!(*this)(w)) return true;
  const auto c = clusters(w);
  const auto id = w.graph().vertex_id(x_);
  return enclosure_.contains(c.extent[c.label[*id]]);
}

bool detect_surrounding_dual(const BondConfiguration& w, const Point& x, int n, const GeneratorSet& T) {
  return SurroundEvent(w.graph(), x, n, T)(w);
}

EEvent::EEvent(const SpongeGraph& ambient, int n, Point shift) {
  if (n < 1) throw Error(ErrorKind::Geometry, "E_n needs n >= 1");
  const Coord s = ipow(3, n - 1);
  const Rect rect = Rect{0, 0, 3 * s, s}.shifted(shift);
  require_inside(ambient, rect, "E_n");
  probe_ = std::make_unique<Probe>(ambient, rect);
  const SpongeGraph& g = probe_->graph();
  auto forbidden = [&](const Point& p) {
    const Point q = p - shift;
    return q.y == s && q.x > s && q.x < 2 * s;
  };
  blocked_.assign(g.edge_count(), 0);
  for (EdgeId e = 0; e < static_cast<EdgeId>(g.edge_count()); ++e)
    if (forbidden(g.edge_low(e)) || forbidden(g.edge_high(e))) blocked_[e] = 1;
  for (VertexId v = 0; v < static_cast<VertexId>(g.vertex_count()); ++v) {
    const Point q = g.vertices()[v] - shift;
    if (q.y != s) continue;
    if (q.x <= s) sources_.push_back(v);
    if (q.x >= 2 * s) targets_.push_back(v);
  }
}

bool EEvent::operator()(const BondConfiguration& w) const {
  const auto sub = probe_->pull(w);
  const SpongeGraph& g = probe_->graph();
  DisjointSet dsu(g.vertex_count());
  for (EdgeId e = 0; e < static_cast<EdgeId>(g.edge_count()); ++e)
    if (sub.open(e) && !blocked_[e]) dsu.unite(static_cast<std::size_t>(g.edges()[e].u), static_cast<std::size_t>(g.edges()[e].v));
  std::vector<char> hit(g.vertex_count(), 0);
  for (auto v : sources_) hit[dsu.find(static_cast<std::size_t>(v))] = 1;
  for (auto v : targets_)
    if (hit[dsu.find(static_cast<std::size_t>(v))]) return true;
  return false;
}

bool detect_E(const BondConfiguration& w, int n, Point shift) { return EEvent(w.graph(), n, shift)(w); }

EChain::EChain(const SpongeGraph& ambient, int n, int k) {
  if (k < 2) throw Error(ErrorKind::Argument, "chain needs k >= 2");
  const Coord s = ipow(3, n - 1);
  for (int j = -1; j <= k - 2; ++j) copies_.emplace_back(ambient, n, Point{j * s, 0});
  target_ = std::make_unique<Probe>(ambient, Rect{0, 0, k * s, s});
}

EChainAudit EChain::operator()(const BondConfiguration& w) const {
  EChainAudit a;
  a.chain = std::all_of(copies_.begin(), copies_.end(), [&](const EEvent& e) { return e(w); });
  a.crossing = target_->crossing(w, Direction::LeftRight);
  return a;
}

// ---------------------------------------------------------------------------------------------

const char* to_string(Corner c) {
  switch (c) {
    case Corner::BottomLeft: return "bl";
    case Corner::BottomRight: return "br";
    case Corner::TopLeft: return "tl";
    case Corner::TopRight: return "tr";
  }
  return "?";
}

Corner parse_corner(const std::string& s) {
  for (Corner c : {Corner::BottomLeft, Corner::BottomRight, Corner::TopLeft, Corner::TopRight})
    if (s == to_string(c)) return c;
  throw Error(ErrorKind::Parse, "unknown corner '" + s + "' (expected bl, br, tl or tr)");
}

CornerSet parse_corner_set(const std::string& s) {
  if (s == "bottom") return CornerSet::Bottom;
  if (s == "top") return CornerSet::Top;
  if (s == "all") return CornerSet::All;
  throw Error(ErrorKind::Parse, "unknown corner set '" + s + "' (expected bottom, top or all)");
}

namespace {

RegionTransform corner_transform(Corner c, Coord side, Point shift) {
  RegionTransform t;
  if (c == Corner::BottomRight || c == Corner::TopRight) {
    t.reflect_x2 = true;
    t.shift.x = side;
  }
  if (c == Corner::TopLeft || c == Corner::TopRight) {
    t.reflect_x1 = true;
    t.shift.y = side;
  }
  t.shift = t.shift + shift;
  return t;
}

}  // namespace

CEvent::CEvent(const SpongeGraph& ambient, int n, Corner corner, Point shift) {
  if (n < 0) throw Error(ErrorKind::Geometry, "C-events need n >= 0");
  const Coord s = ipow(3, n);
  const RegionTransform t = corner_transform(corner, 9 * s, shift);
  const RegionTransform back = t.inverse();
  const Rect rect[2] = {{-3 * s, 2 * s, 3 * s, 4 * s}, {2 * s, 0, 4 * s, 3 * s}};
  for (int i = 0; i < 2; ++i) {
    const Rect img = t.apply(rect[i]);
    require_inside(ambient, img, "C-event");
    arm_[i].probe = std::make_unique<Probe>(ambient, img);
    const SpongeGraph& g = arm_[i].probe->graph();
    for (VertexId v = 0; v < static_cast<VertexId>(g.vertex_count()); ++v) {
      const Point q = back.apply(g.vertices()[v]);
      const bool entry = i == 0 ? q.x == -3 * s : q.y == 0;
      const bool term = i == 0 ? (q.x == 3 * s && q.y >= 3 * s && q.y <= 4 * s) : (q.y == 3 * s && q.x >= 3 * s && q.x <= 4 * s);
      if (entry) arm_[i].entry.push_back(v);
      if (term) arm_[i].terminal.push_back(v);
    }
  }
  join_ = std::make_unique<Probe>(ambient, std::vector<Rect>{t.apply(Rect{0, 2 * s, 3 * s, 4 * s}), t.apply(Rect{2 * s, 0, 4 * s, 3 * s})});
  for (int i = 0; i < 2; ++i) {
    std::vector<VertexId> ids;
    for (auto v : arm_[i].terminal) ids.push_back(*join_->graph().vertex_id(arm_[i].probe->graph().vertices()[v]));
    join_terminal_.push_back(std::move(ids));
  }
}

bool CEvent::operator()(const BondConfiguration& w) const {
  std::vector<VertexId> ends;
  for (int i = 0; i < 2; ++i) {
    const auto c = clusters(arm_[i].probe->pull(w));
    std::vector<char> good(c.count(), 0);
    for (auto v : arm_[i].entry) good[c.label[v]] = 1;
    const std::size_t before = ends.size();
    for (std::size_t k = 0; k < arm_[i].terminal.size(); ++k)
      if (good[c.label[arm_[i].terminal[k]]]) ends.push_back(join_terminal_[i][k]);
    if (ends.size() == before) return false;
  }
  const auto c = clusters(join_->pull(w));
  for (auto v : ends)
    if (c.label[v] != c.label[ends.front()]) return false;
  return true;
}

Rect CEvent::footprint() const { return arm_[0].probe->graph().box().united(arm_[1].probe->graph().box()); }

CComposite::CComposite(const SpongeGraph& ambient, int n, CornerSet which, Point shift) {
  std::vector<Corner> cs;
  if (which != CornerSet::Top) cs.insert(cs.end(), {Corner::BottomLeft, Corner::BottomRight});
  if (which != CornerSet::Bottom) cs.insert(cs.end(), {Corner::TopLeft, Corner::TopRight});
  for (Corner c : cs) parts_.emplace_back(ambient, n, c, shift);
}

bool CComposite::operator()(const BondConfiguration& w) const {
  return std::all_of(parts_.begin(), parts_.end(), [&](const CEvent& e) { return e(w); });
}

Rect c_event_region(int n) {
  const Coord s = ipow(3, n);
  return {-3 * s, 0, 12 * s, 9 * s};
}

bool detect_C(const BondConfiguration& w, int n, Corner corner, Point shift) {
  return CEvent(w.graph(), n, corner, shift)(w);
}

bool detect_C_composite(const BondConfiguration& w, int n, CornerSet which, Point shift) {
  return CComposite(w.graph(), n, which, shift)(w);
}

namespace {
Coord pow3(int n) { return ipow(3, n); }
}  // namespace

DImplicationCheck::DImplicationCheck(const SpongeGraph& ambient, int n)
    : c_top_(ambient, n, CornerSet::Top),
      c_bottom_(ambient, n, CornerSet::Bottom),
      c_top_inner_(ambient, n - 1, CornerSet::All, {3 * pow3(n), 6 * pow3(n)}),
      c_bottom_inner_(ambient, n - 1, CornerSet::All, {3 * pow3(n), 0}),
      d_top_(ambient, Rect{3 * pow3(n), 6 * pow3(n), 6 * pow3(n), 9 * pow3(n)}),
      d_bottom_(ambient, Rect{3 * pow3(n), 0, 6 * pow3(n), 3 * pow3(n)}),
      d_full_(ambient, Rect{0, 0, 9 * pow3(n), 9 * pow3(n)}) {}

DImplication DImplicationCheck::operator()(const BondConfiguration& w) const {
  DImplication r;
  r.top = c_top_(w) && c_top_inner_(w) && d_top_.crossing(w, Direction::LeftRight);
  r.bottom = c_bottom_(w) && c_bottom_inner_(w) && d_bottom_.crossing(w, Direction::LeftRight);
  r.target = d_full_.crossing(w, Direction::LeftRight);
  return r;
}

bool check_d_implication(const BondConfiguration& w, int n) {
  if (n < 1) throw Error(ErrorKind::Geometry, "the inclusion needs n >= 1");
  return DImplicationCheck(w.graph(), n)(w).holds();
}

// ---------------------------------------------------------------------------------------------

bool in_annulus(double px, double py, int n, const Point& corner) {
  const double a = static_cast<double>(pow3(n + 1)), side = static_cast<double>(pow3(n + 2)), b = 2.0 * static_cast<double>(pow3(n));
  const double u = px - static_cast<double>(corner.x), v = py - static_cast<double>(corner.y);
  auto outer = [&](double t) { return t >= -a && t <= side + a; };
  auto inner = [&](double t) { return t > -b && t < side + b; };
  return outer(u) && outer(v) && !(inner(u) && inner(v));
}

AnnulusScan annulus_pivotal_scan(const BondConfiguration& w, const std::vector<int>& scales, std::optional<Rect> strip) {
  if (scales.empty()) throw Error(ErrorKind::Argument, "no scales given");
  for (std::size_t i = 1; i < scales.size(); ++i)
    if (scales[i] <= scales[i - 1]) throw Error(ErrorKind::Argument, "scales must increase");
  const SpongeGraph& g = w.graph();
  const Rect& box = g.box();
  const DualGraph d(g);
  AnnulusScan out;
  out.r = lowest_crossing(w, d);
  if (!out.r) throw Error(ErrorKind::Argument, "configuration has no open left-right crossing");
  out.crossing = true;
  if (!strip) strip = Rect{box.x0, box.y0, box.x0 + pow3(scales.back()), box.y1};
  out.psi = leftmost_closed_dual_path(w, *out.r, strip);
  for (int n : scales) out.scales.push_back({n, {}, false, false});
  if (!out.psi) return out;
  out.e_psi = out.psi->target;
  const auto pivotal = pivotal_crossing_edges(w, d, Direction::LeftRight);
  out.e_psi_pivotal = std::find(pivotal.begin(), pivotal.end(), out.e_psi) != pivotal.end();

  const SquareIndex idx{box};
  const auto below = squares_below(g, *out.r);
  const auto on_r = edge_mask(g, *out.r);
  std::vector<char> on_psi(idx.size(), 0);
  for (const auto& q : out.psi->squares) on_psi[idx(q)] = 1;
  // squares left of psi: reached from the left column without touching psi or r
  std::vector<char> left_of(idx.size(), 0);
  std::deque<Point> queue;
  for (Coord y = box.y0; y < box.y1; ++y) {
    const Point q{box.x0, y};
    if (!below[idx(q)] && !on_psi[idx(q)]) {
      left_of[idx(q)] = 1;
      queue.push_back(q);
    }
  }
  while (!queue.empty()) {
    const Point q = queue.front();
    queue.pop_front();
    for (int dd = 0; dd < 4; ++dd) {
      const Point nq = q + kStep[dd];
      if (!idx.inside(nq) || left_of[idx(nq)] || below[idx(nq)] || on_psi[idx(nq)]) continue;
      left_of[idx(nq)] = 1;
      queue.push_back(nq);
    }
  }
  auto mid = [&](EdgeId e) {
    const Point a = g.edge_low(e), b = g.edge_high(e);
    return std::pair<double, double>{(a.x + b.x) / 2.0, (a.y + b.y) / 2.0};
  };

  const Point lo = g.edge_low(out.e_psi);
  for (auto& rep : out.scales) {
    const Coord side = pow3(rep.n + 2);
    auto floor_div = [](Coord a, Coord b) { return a >= 0 ? a / b : -((-a + b - 1) / b); };
    rep.corner = {box.x0 + floor_div(lo.x - box.x0, side) * side, box.y0 + floor_div(lo.y - box.y0, side) * side};
    auto in_h = [&](const Point& q) { return in_annulus(q.x + 0.5, q.y + 0.5, rep.n, rep.corner); };
    for (EdgeId e : pivotal) {
      const auto [mx, my] = mid(e);
      if (in_annulus(mx, my, rep.n, rep.corner)) {
        rep.pivotal_in_annulus = true;
        break;
      }
    }
    std::vector<char> seen(idx.size(), 0);
    for (const auto& q : out.psi->squares)
      if (in_h(q) && !seen[idx(q)]) {
        seen[idx(q)] = 1;
        queue.push_back(q);
      }
    while (!queue.empty() && !rep.c_event) {
      const Point q = queue.front();
      queue.pop_front();
      for (int dd = 0; dd < 4 && !rep.c_event; ++dd) {
        const Point nq = q + kStep[dd];
        const auto [a, b] = crossing_ends(q, dd);
        const auto e = edge_between(g, std::min(a, b), std::max(a, b));
        if (e && on_r[static_cast<std::size_t>(*e)]) {
          const auto [mx, my] = mid(*e);
          if (in_annulus(mx, my, rep.n, rep.corner)) rep.c_event = true;
          continue;
        }
        if (!idx.inside(nq) || seen[idx(nq)] || below[idx(nq)] || left_of[idx(nq)] || !in_h(nq)) continue;
        if (e && w.open(*e)) continue;
        seen[idx(nq)] = 1;
        queue.push_back(nq);
      }
    }
    queue.clear();
  }
  return out;
}

}  // namespace carpetperc
