#include "carpetperc/branching.hpp"

#include <algorithm>

#include "carpetperc/error.hpp"

namespace carpetperc {

TreeIndex TreeIndex::parent() const {
  if (is_root()) throw Error(ErrorKind::Argument, "the root has no parent");
  TreeIndex p = *this;
  p.digits.pop_back();
  return p;
}

TreeIndex TreeIndex::child(int digit) const {
  if (digit != 1 && digit != 2) throw Error(ErrorKind::Argument, "tree digits are 1 or 2");
  TreeIndex c = *this;
  c.digits.push_back(static_cast<std::uint8_t>(digit));
  return c;
}

std::size_t TreeIndex::heap_index() const {
  std::size_t i = 0;
  for (auto d : digits) i = 2 * i + d;
  return i;
}

TreeIndex TreeIndex::from_heap_index(std::size_t i) {
  TreeIndex t;
  while (i > 0) {
    t.digits.push_back(static_cast<std::uint8_t>(i % 2 == 1 ? 1 : 2));
    i = (i - 1) / 2;
  }
  std::reverse(t.digits.begin(), t.digits.end());
  return t;
}

std::string TreeIndex::to_string() const {
  if (is_root()) return "0";
  std::string s;
  for (auto d : digits) s.push_back(static_cast<char>('0' + d));
  return s;
}

TreeIndex TreeIndex::parse(const std::string& s) {
  TreeIndex t;
  if (s == "0") return t;
  if (s.empty()) throw Error(ErrorKind::Parse, "empty tree index");
  for (char c : s) {
    if (c != '1' && c != '2') throw Error(ErrorKind::Parse, "tree index '" + s + "' must use digits 1 and 2");
    t.digits.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return t;
}

int tree_distance(const TreeIndex& a, const TreeIndex& b) {
  std::size_t common = 0;
  while (common < a.digits.size() && common < b.digits.size() && a.digits[common] == b.digits[common]) ++common;
  return a.depth() + b.depth() - 2 * static_cast<int>(common);
}

std::vector<TreeIndex> tree_nodes(int max_depth) {
  if (max_depth < 0) throw Error(ErrorKind::Depth, "negative tree depth");
  std::vector<TreeIndex> out;
  const std::size_t count = (std::size_t{1} << (max_depth + 1)) - 1;
  for (std::size_t i = 0; i < count; ++i) out.push_back(TreeIndex::from_heap_index(i));
  return out;
}

TreeStats tree_stats(const TreeIndex& j) {
  TreeStats s;
  s.depth = j.depth();
  for (int a = 1; a <= s.depth; ++a)
    if (j.digits[a - 1] == 2) {
      ++s.n2;
      s.tau.push_back(a);
    }
  s.epsilon = s.n2 % 2;
  return s;
}

namespace {

Coord pow3(int e) { return ipow(3, e); }

void require_depth(const TreeIndex& j, int N) {
  if (N < 1) throw Error(ErrorKind::Depth, "scale N must be at least 1");
  if (j.depth() > N - 1)
    throw Error(ErrorKind::Depth, "tree index " + j.to_string() + " is too deep for N=" + std::to_string(N));
}

}  // namespace

EllOffsets ell_offsets(const TreeIndex& j, int N) {
  require_depth(j, N);
  const TreeStats st = tree_stats(j);
  const int n = st.depth;
  const int inf = n + 1;
  auto tau = [&](int nu) { return nu == 0 ? 0 : (nu <= st.n2 ? st.tau[nu - 1] : inf); };
  auto run = [&](int from, int to) {
    Coord sum = 0;
    for (int a = from; a <= std::min(to, n); ++a) sum += 2 * pow3(N - a + 1);
    return sum;
  };
  EllOffsets out;
  for (int mu = 0; mu <= st.n2 / 2; ++mu) out.v += run(tau(2 * mu), tau(2 * mu + 1) - 1);
  // an infinite lower index leaves the inner sum empty
  for (int mu = 1; mu <= (st.n2 + 1) / 2; ++mu) out.h += run(tau(2 * mu - 1), tau(2 * mu) - 1);
  return out;
}

Coord delta_v(const TreeIndex& j, int N) {
  if (j.is_root()) return 0;
  return pow3(N - j.depth()) * tree_stats(j).epsilon;
}

Coord delta_h(const TreeIndex& j, int N) {
  if (j.is_root()) return pow3(N);
  return pow3(N - j.depth()) * (1 - tree_stats(j).epsilon);
}

Point anchor(const TreeIndex& j, int N) {
  if (j.is_root()) throw Error(ErrorKind::Argument, "the root box has no anchor");
  require_depth(j, N);
  const TreeIndex p = j.parent();
  const EllOffsets l = ell_offsets(p, N);
  const Coord far = pow3(N + 2);
  if (j.digits.back() == 1) return {far - l.h, l.v};
  return {far - l.h - delta_h(p, N), l.v + delta_v(p, N)};
}

Point mirror_anchor(const TreeIndex& j, int N) {
  const Point a = anchor(j, N);
  return {a.y, a.x};
}

Rect BoxSpec::hull() const {
  Rect r = pieces.front().rect;
  for (const auto& p : pieces) r = r.united(p.rect);
  return r;
}

namespace {

struct MotherPiece {
  const char* name;
  Rect rect;  // in units of 3^(N-1)
  Direction dir;
};

const MotherPiece kStraight[4] = {
    {"V", {-3, -3, 3, 19}, Direction::UpDown},
    {"J", {-4, 17, 4, 19}, Direction::LeftRight},
    {"Jl", {-4, 17, -2, 19}, Direction::UpDown},
    {"Jr", {2, 17, 4, 19}, Direction::UpDown},
};

const MotherPiece kBranching[4] = {
    {"L", {-10, -3, 3, 3}, Direction::LeftRight},
    {"I", {-10, -4, -8, 4}, Direction::UpDown},
    {"It", {-10, 2, -8, 4}, Direction::LeftRight},
    {"Ib", {-10, -4, -8, -2}, Direction::LeftRight},
};

BoxSpec assemble(const TreeIndex& j, int N, bool mirror) {
  require_depth(j, N);
  BoxSpec b;
  b.index = j;
  b.N = N;
  b.mirror = mirror;
  b.kind = (j.is_root() || j.digits.back() == 1) ? BoxKind::Straight : BoxKind::Branching;
  int turns = 0;
  if (j.is_root()) {
    turns = mirror ? -1 : 0;
    b.anchor = mirror ? Point{0, pow3(N + 2)} : Point{pow3(N + 2), 0};
  } else {
    const int eps = tree_stats(j.parent()).epsilon;
    if (b.kind == BoxKind::Straight) turns = mirror ? -1 - eps : eps;
    else turns = mirror ? 1 + eps : -eps;
    b.anchor = mirror ? mirror_anchor(j, N) : anchor(j, N);
  }
  b.orientation = RegionTransform{turns, false, false, b.anchor};
  const Coord unit = pow3(N - 1 - j.depth());
  const MotherPiece* mother = b.kind == BoxKind::Straight ? kStraight : kBranching;
  for (int i = 0; i < 4; ++i) {
    const Rect& r = mother[i].rect;
    const Rect scaled{r.x0 * unit, r.y0 * unit, r.x1 * unit, r.y1 * unit};
    b.pieces.push_back({mother[i].name, b.orientation.apply(scaled), b.orientation.apply(mother[i].dir)});
  }
  return b;
}

}  // namespace

BoxSpec build_box(const TreeIndex& j, int N) { return assemble(j, N, false); }
BoxSpec mirror_box(const TreeIndex& j, int N) { return assemble(j, N, true); }

namespace {

void require_scales(int N, int m) {
  if (m < 1) throw Error(ErrorKind::Argument, "m must be at least 1");
  if (N < m) throw Error(ErrorKind::Depth, "N must be at least m");
}

std::vector<BoxSpec> all_boxes(int N, int m) {
  std::vector<BoxSpec> out;
  for (const auto& t : tree_nodes(N - m)) {
    out.push_back(build_box(t, N));
    out.push_back(mirror_box(t, N));
  }
  return out;
}

}  // namespace

Rect branching_region(int N, int m) {
  require_scales(N, m);
  const auto boxes = all_boxes(N, m);
  Rect r = boxes.front().hull();
  for (const auto& b : boxes) r = r.united(b.hull());
  return r;
}

SpongeGraph build_branching_window(int N, int m, const GeneratorSet& T, const Limits& limits) {
  require_scales(N, m);
  const auto boxes = all_boxes(N, m);
  std::uint64_t area = 0;
  for (const auto& b : boxes)
    for (const auto& p : b.pieces) area += static_cast<std::uint64_t>(p.rect.width() * p.rect.height());
  if (area > limits.max_cells) throw Error(ErrorKind::Capacity, "branching window needs " + std::to_string(area) + " cells");
  std::vector<Point> cells;
  cells.reserve(area);
  for (const auto& b : boxes)
    for (const auto& p : b.pieces)
      for (Coord y = p.rect.y0; y < p.rect.y1; ++y)
        for (Coord x = p.rect.x0; x < p.rect.x1; ++x)
          if (full_cell_retained(T, x, y)) cells.push_back({x, y});
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return SpongeGraph::from_cells(std::move(cells), branching_region(N, m));
}

BoxEvent::BoxEvent(const SpongeGraph& ambient, const BoxSpec& box) {
  for (const auto& p : box.pieces) {
    if (!ambient.box().contains(p.rect))
      throw Error(ErrorKind::Geometry, "box piece " + p.name + " " + to_string(p.rect) + " leaves the window");
    probes_.push_back(std::make_unique<Probe>(ambient, p.rect));
    dirs_.push_back(p.dir);
  }
}

bool BoxEvent::operator()(const BondConfiguration& w) const {
  for (std::size_t i = 0; i < probes_.size(); ++i)
    if (!probes_[i]->crossing(w, dirs_[i])) return false;
  return true;
}

std::vector<bool> BoxEvent::pieces(const BondConfiguration& w) const {
  std::vector<bool> out;
  for (std::size_t i = 0; i < probes_.size(); ++i) out.push_back(probes_[i]->crossing(w, dirs_[i]));
  return out;
}

bool detect_box_event(const BondConfiguration& w, const TreeIndex& j, int N) {
  return BoxEvent(w.graph(), build_box(j, N))(w);
}

bool detect_mirror_event(const BondConfiguration& w, const TreeIndex& j, int N) {
  return BoxEvent(w.graph(), mirror_box(j, N))(w);
}

BranchingField::BranchingField(const SpongeGraph& ambient, int N, int m) : N_(N), m_(m) {
  require_scales(N, m);
  nodes_ = tree_nodes(N - m);
  for (const auto& t : nodes_) {
    boxes_.emplace_back(ambient, build_box(t, N));
    mirrors_.emplace_back(ambient, mirror_box(t, N));
  }
}

TreeField BranchingField::operator()(const BondConfiguration& w) const {
  TreeField f;
  f.N = N_;
  f.m = m_;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    f.x.push_back(boxes_[i](w) ? 1 : 0);
    f.x_dagger.push_back(mirrors_[i](w) ? 1 : 0);
  }
  return f;
}

std::vector<bool> BranchingField::constituents(const BondConfiguration& w, std::size_t heap) const {
  auto out = boxes_.at(heap).pieces(w);
  const auto more = mirrors_.at(heap).pieces(w);
  out.insert(out.end(), more.begin(), more.end());
  return out;
}

TreeField z_field(const BondConfiguration& w, int N, int m) { return BranchingField(w.graph(), N, m)(w); }

TreeCluster tree_cluster(const std::vector<std::uint8_t>& values, int depth) {
  const std::size_t count = (std::size_t{1} << (depth + 1)) - 1;
  if (values.size() != count) throw Error(ErrorKind::Argument, "field size does not match the tree depth");
  TreeCluster c;
  c.member.assign(count, 0);
  c.generation.assign(static_cast<std::size_t>(depth) + 1, 0);
  for (std::size_t i = 0; i < count; ++i) {
    const bool up = i == 0 || c.member[(i - 1) / 2];
    c.member[i] = (up && values[i]) ? 1 : 0;
    if (c.member[i]) ++c.generation[static_cast<std::size_t>(TreeIndex::from_heap_index(i).depth())];
  }
  return c;
}

TreeCluster tree_cluster(const TreeField& f) {
  std::vector<std::uint8_t> z(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) z[i] = f.z(i);
  return tree_cluster(z, f.N - f.m);
}

Point q_center(const TreeIndex& j, int N, int m) {
  require_scales(N, m);
  if (j.depth() != N - m || j.is_root())
    throw Error(ErrorKind::Depth, "Q squares live at depth N-m >= 1, got " + j.to_string());
  const EllOffsets l = ell_offsets(j.parent(), N);
  if (tree_stats(j).epsilon == 0) {
    const Coord c = pow3(N + 2) - l.h;
    return {c, c};
  }
  return {l.v, l.v};
}

Rect q_square(const TreeIndex& j, int N, int m) {
  const Point c = q_center(j, N, m);
  const Coord h = pow3(m + 1);
  return {c.x - h, c.y - h, c.x + h, c.y + h};
}

bool audit_q_disjoint(int N, int m) {
  std::vector<Rect> qs;
  for (const auto& t : tree_nodes(N - m))
    if (t.depth() == N - m) qs.push_back(q_square(t, N, m));
  for (std::size_t a = 0; a < qs.size(); ++a)
    for (std::size_t b = a + 1; b < qs.size(); ++b)
      if (qs[a].interiors_overlap(qs[b])) return false;
  return true;
}

Coord connection_cost(int m) { return 8 * pow3(m + 1); }

namespace {

struct Carpet {
  const GeneratorSet& T;
  bool cell(Coord x, Coord y) const { return full_cell_retained(T, x, y); }
  bool vertex(const Point& p) const {
    return cell(p.x, p.y) || cell(p.x - 1, p.y) || cell(p.x, p.y - 1) || cell(p.x - 1, p.y - 1);
  }
  // unit segment from p to the right (horizontal) or upward
  bool edge(const Point& p, bool horizontal) const {
    return horizontal ? (cell(p.x, p.y) || cell(p.x, p.y - 1)) : (cell(p.x, p.y) || cell(p.x - 1, p.y));
  }
};

bool boundary_complete(const Carpet& c, const Rect& r) {
  for (Coord x = r.x0; x < r.x1; ++x)
    if (!c.edge({x, r.y0}, true) || !c.edge({x, r.y1}, true)) return false;
  for (Coord y = r.y0; y < r.y1; ++y)
    if (!c.edge({r.x0, y}, false) || !c.edge({r.x1, y}, false)) return false;
  return true;
}

bool shares_edge(const Carpet& c, const Rect& a, const Rect& b) {
  const Rect i{std::max(a.x0, b.x0), std::max(a.y0, b.y0), std::min(a.x1, b.x1), std::min(a.y1, b.y1)};
  if (i.x1 < i.x0 || i.y1 < i.y0) return false;
  if (i.width() == 0 && i.height() == 0) return false;
  if (i.width() == 0) {
    for (Coord y = i.y0; y < i.y1; ++y)
      if (c.edge({i.x0, y}, false)) return true;
    return false;
  }
  if (i.height() == 0) {
    for (Coord x = i.x0; x < i.x1; ++x)
      if (c.edge({x, i.y0}, true)) return true;
    return false;
  }
  for (Coord y = i.y0; y < i.y1; ++y)
    for (Coord x = i.x0; x < i.x1; ++x)
      if (c.cell(x, y)) return true;
  return false;
}

std::string box_name(const BoxSpec& b) { return std::string(b.mirror ? "B+" : "B") + "_" + b.index.to_string(); }

}  // namespace

GeometryReport audit_boxes(const std::vector<BoxSpec>& boxes, const GeneratorSet& T, bool count_holes) {
  const Carpet c{T};
  GeometryReport rep;
  rep.boxes = static_cast<int>(boxes.size());
  for (const auto& b : boxes)
    for (const auto& p : b.pieces) {
      if (!boundary_complete(c, p.rect)) {
        ++rep.boundary_violations;
        rep.messages.push_back(box_name(b) + " piece " + p.name + " " + to_string(p.rect) + " has a boundary outside S^T");
      }
      if (count_holes)
        for (Coord y = p.rect.y0; y < p.rect.y1; ++y)
          for (Coord x = p.rect.x0; x < p.rect.x1; ++x)
            if (!c.cell(x, y)) ++rep.interior_hole_cells;
    }
  for (std::size_t a = 0; a < boxes.size(); ++a)
    for (std::size_t b = a + 1; b < boxes.size(); ++b) {
      if (tree_distance(boxes[a].index, boxes[b].index) <= 1) continue;
      bool hit = false;
      for (const auto& pa : boxes[a].pieces)
        for (const auto& pb : boxes[b].pieces)
          if (!hit && shares_edge(c, pa.rect, pb.rect)) hit = true;
      if (hit) {
        ++rep.overlap_violations;
        rep.messages.push_back(box_name(boxes[a]) + " and " + box_name(boxes[b]) + " share an edge");
      }
    }
  return rep;
}

GeometryReport geometry_audit(int N, int m, const GeneratorSet& T, bool count_holes) {
  require_scales(N, m);
  auto rep = audit_boxes(all_boxes(N, m), T, count_holes);
  if (N - m >= 1) {
    std::vector<std::pair<TreeIndex, Rect>> qs;
    for (const auto& t : tree_nodes(N - m))
      if (t.depth() == N - m) qs.emplace_back(t, q_square(t, N, m));
    for (std::size_t a = 0; a < qs.size(); ++a)
      for (std::size_t b = a + 1; b < qs.size(); ++b)
        if (qs[a].second.interiors_overlap(qs[b].second)) {
          ++rep.q_violations;
          rep.messages.push_back("Q(" + qs[a].first.to_string() + ") and Q(" + qs[b].first.to_string() + ") overlap");
        }
  }
  return rep;
}

}  // namespace carpetperc
