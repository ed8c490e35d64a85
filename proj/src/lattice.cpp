#include "carpetperc/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <queue>
#include <sstream>

#include "carpetperc/error.hpp"

namespace carpetperc {

// ---------------------------------------------------------------------------------------------
// GeneratorSet

GeneratorSet::GeneratorSet(int base, std::vector<std::pair<int, int>> cells) : base_(base) {
  if (base < 1) throw Error(ErrorKind::Argument, "generator base must be positive");
  if (cells.empty()) throw Error(ErrorKind::Argument, "generator set is empty");
  for (const auto& [i, j] : cells) {
    if (i < 0 || j < 0 || i >= base || j >= base)
      throw Error(ErrorKind::Argument, "generator cell out of range for base " + std::to_string(base));
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  cells_ = std::move(cells);
  mask_.assign(static_cast<std::size_t>(base_) * base_, 0);
  for (const auto& [i, j] : cells_) mask_[static_cast<std::size_t>(j) * base_ + i] = 1;
}

GeneratorSet GeneratorSet::carpet3() {
  std::vector<std::pair<int, int>> c;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (!(i == 1 && j == 1)) c.emplace_back(i, j);
  return GeneratorSet(3, std::move(c));
}

GeneratorSet GeneratorSet::full(int base) {
  std::vector<std::pair<int, int>> c;
  for (int i = 0; i < base; ++i)
    for (int j = 0; j < base; ++j) c.emplace_back(i, j);
  return GeneratorSet(base, std::move(c));
}

GeneratorSet GeneratorSet::parse(const std::string& text) {
  if (text == "carpet3" || text == "carpet") return carpet3();
  if (text.rfind("full", 0) == 0) {
    const std::string rest = text.substr(4);
    const int base = rest.empty() ? 3 : std::atoi(rest.c_str());
    if (base < 1) throw Error(ErrorKind::Parse, "bad generator '" + text + "'");
    return full(base);
  }
  std::string body = text;
  int base = -1;
  if (auto colon = body.find(':'); colon != std::string::npos) {
    base = std::atoi(body.substr(0, colon).c_str());
    body = body.substr(colon + 1);
  }
  std::vector<std::pair<int, int>> cells;
  std::stringstream ss(body);
  std::string item;
  int max_digit = 0;
  while (std::getline(ss, item, ';')) {
    if (item.empty()) continue;
    const auto comma = item.find(',');
    if (comma == std::string::npos) throw Error(ErrorKind::Parse, "bad generator cell '" + item + "'");
    char* end = nullptr;
    const long i = std::strtol(item.c_str(), &end, 10);
    if (end != item.c_str() + comma) throw Error(ErrorKind::Parse, "bad generator cell '" + item + "'");
    const long j = std::strtol(item.c_str() + comma + 1, &end, 10);
    if (*end != '\0') throw Error(ErrorKind::Parse, "bad generator cell '" + item + "'");
    cells.emplace_back(static_cast<int>(i), static_cast<int>(j));
    max_digit = std::max<int>(max_digit, static_cast<int>(std::max(i, j)));
  }
  if (cells.empty()) throw Error(ErrorKind::Parse, "empty generator '" + text + "'");
  if (base < 0) base = std::max(max_digit + 1, 1);
  return GeneratorSet(base, std::move(cells));
}

bool GeneratorSet::contains(int i, int j) const {
  if (i < 0 || j < 0 || i >= base_ || j >= base_) return false;
  return mask_[static_cast<std::size_t>(j) * base_ + i] != 0;
}

std::string GeneratorSet::to_string() const {
  std::string s = std::to_string(base_) + ":";
  for (std::size_t k = 0; k < cells_.size(); ++k) {
    if (k) s += ';';
    s += std::to_string(cells_[k].first) + "," + std::to_string(cells_[k].second);
  }
  return s;
}

// ---------------------------------------------------------------------------------------------
// Cell tests

bool retained_cell(const CellAddress& addr, const GeneratorSet& T) {
  bool ok = true;
  for (const auto& [i, j] : addr.digits) {
    if (i < 0 || j < 0 || i >= T.base() || j >= T.base())
      throw Error(ErrorKind::InvalidAddress, "digit (" + std::to_string(i) + "," + std::to_string(j) + ") out of range");
    ok = ok && T.contains(i, j);
  }
  return ok;
}

bool level_cell_retained(const GeneratorSet& T, int n, Coord a, Coord b) {
  const Coord L = T.base();
  for (int k = 0; k < n; ++k) {
    if (!T.contains(static_cast<int>(a % L), static_cast<int>(b % L))) return false;
    a /= L;
    b /= L;
  }
  return a == 0 && b == 0;
}

bool full_cell_retained(const GeneratorSet& T, Coord a, Coord b) {
  if (!T.contains(0, 0)) return false;
  if (a < 0) a = -a - 1;
  if (b < 0) b = -b - 1;
  const Coord L = T.base();
  while (a > 0 || b > 0) {
    if (!T.contains(static_cast<int>(a % L), static_cast<int>(b % L))) return false;
    a /= L;
    b /= L;
  }
  return true;
}

Limits Limits::from_env() {
  Limits l;
  if (const char* v = std::getenv("CARPET_PERC_MAX_CELLS")) {
    const long long cap = std::atoll(v);
    if (cap > 0) l.max_cells = static_cast<std::uint64_t>(cap);
  }
  return l;
}

// ---------------------------------------------------------------------------------------------
// SpongeGraph

std::uint64_t lattice_edge_key(const Point& low, bool horizontal) {
  constexpr Coord off = Coord{1} << 30;
  return (static_cast<std::uint64_t>(low.x + off) << 33) | (static_cast<std::uint64_t>(low.y + off) << 1) |
         (horizontal ? 0u : 1u);
}

std::uint64_t SpongeGraph::edge_key(EdgeId e) const {
  return lattice_edge_key(edge_low(e), edges_[e].horizontal);
}

SpongeGraph SpongeGraph::from_cells(std::vector<Point> cells, Rect box) {
  std::vector<Point> verts;
  verts.reserve(cells.size() * 4);
  for (const auto& c : cells) {
    verts.push_back(c);
    verts.push_back({c.x + 1, c.y});
    verts.push_back({c.x, c.y + 1});
    verts.push_back({c.x + 1, c.y + 1});
  }
  return from_vertices(std::move(verts), std::move(cells), box);
}

SpongeGraph SpongeGraph::from_vertices(std::vector<Point> vertices, std::vector<Point> cells, Rect box) {
  SpongeGraph g;
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  g.box_ = box;
  g.vertices_ = std::move(vertices);
  g.cells_ = std::move(cells);
  g.index();
  return g;
}

void SpongeGraph::index() {
  const Coord w = box_.width() + 1;
  const Coord h = box_.height() + 1;
  if (w <= 0 || h <= 0) throw Error(ErrorKind::Geometry, "empty window box");
  grid_.assign(static_cast<std::size_t>(w * h), -1);
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const Point& p = vertices_[i];
    if (!box_.contains(p)) throw Error(ErrorKind::Geometry, "vertex " + carpetperc::to_string(p) + " outside window box");
    grid_[static_cast<std::size_t>((p.y - box_.y0) * w + (p.x - box_.x0))] = static_cast<VertexId>(i);
  }
  cell_grid_.assign(static_cast<std::size_t>(std::max<Coord>(box_.width(), 0) * std::max<Coord>(box_.height(), 0)), 0);
  for (const auto& c : cells_) {
    if (c.x < box_.x0 || c.y < box_.y0 || c.x + 1 > box_.x1 || c.y + 1 > box_.y1)
      throw Error(ErrorKind::Geometry, "cell outside window box");
    cell_grid_[static_cast<std::size_t>((c.y - box_.y0) * box_.width() + (c.x - box_.x0))] = 1;
  }
  const std::size_t nv = vertices_.size();
  right_.assign(nv, -1);
  up_.assign(nv, -1);
  left_.assign(nv, -1);
  down_.assign(nv, -1);
  edges_.clear();
  for (std::size_t i = 0; i < nv; ++i) {
    const Point p = vertices_[i];
    if (auto r = vertex_id({p.x + 1, p.y})) {
      right_[i] = static_cast<EdgeId>(edges_.size());
      left_[*r] = right_[i];
      edges_.push_back({static_cast<VertexId>(i), *r, true});
    }
    if (auto u = vertex_id({p.x, p.y + 1})) {
      up_[i] = static_cast<EdgeId>(edges_.size());
      down_[*u] = up_[i];
      edges_.push_back({static_cast<VertexId>(i), *u, false});
    }
  }
}

std::optional<VertexId> SpongeGraph::vertex_id(const Point& p) const {
  if (!box_.contains(p) || grid_.empty()) return std::nullopt;
  const VertexId id = grid_[static_cast<std::size_t>((p.y - box_.y0) * (box_.width() + 1) + (p.x - box_.x0))];
  if (id < 0) return std::nullopt;
  return id;
}

std::optional<EdgeId> SpongeGraph::edge_id(const Point& a, const Point& b) const {
  const Point lo = std::min(a, b);
  const Point hi = std::max(a, b);
  auto id = vertex_id(lo);
  if (!id) return std::nullopt;
  EdgeId e = -1;
  if (hi == Point{lo.x + 1, lo.y}) e = right_[*id];
  else if (hi == Point{lo.x, lo.y + 1}) e = up_[*id];
  if (e < 0) return std::nullopt;
  return e;
}

bool SpongeGraph::has_cell(const Point& c) const {
  if (c.x < box_.x0 || c.y < box_.y0 || c.x + 1 > box_.x1 || c.y + 1 > box_.y1) return false;
  return cell_grid_[static_cast<std::size_t>((c.y - box_.y0) * box_.width() + (c.x - box_.x0))] != 0;
}

std::vector<EdgeId> SpongeGraph::incident(VertexId v) const {
  std::vector<EdgeId> out;
  for (EdgeId e : {right_[v], up_[v], left_[v], down_[v]})
    if (e >= 0) out.push_back(e);
  return out;
}

// ---------------------------------------------------------------------------------------------
// Builders

namespace {

void check_level(int n, const Limits& limits) {
  if (n < 0 || n > limits.max_level)
    throw Error(ErrorKind::Capacity, "level " + std::to_string(n) + " outside [0," + std::to_string(limits.max_level) + "]");
}

void check_cells(long double count, const Limits& limits) {
  if (count > static_cast<long double>(limits.max_cells))
    throw Error(ErrorKind::Capacity, "window needs about " + std::to_string(static_cast<unsigned long long>(count)) +
                                         " cells, above the limit " + std::to_string(limits.max_cells));
}

std::vector<Point> level_cells(int n, const GeneratorSet& T) {
  std::vector<Point> cur{{0, 0}};
  Coord scale = 1;
  for (int k = 0; k < n; ++k) {
    std::vector<Point> next;
    next.reserve(cur.size() * T.cells().size());
    for (const auto& [i, j] : T.cells())
      for (const auto& c : cur) next.push_back({c.x + i * scale, c.y + j * scale});
    cur = std::move(next);
    scale *= T.base();
  }
  return cur;
}

}  // namespace

SpongeGraph build_sponge(int n, int cols, int rows, const GeneratorSet& T, Point origin, const Limits& limits) {
  check_level(n, limits);
  if (cols < 1 || rows < 1) throw Error(ErrorKind::Capacity, "cols and rows must be at least 1");
  const Coord s = ipow(T.base(), n);
  check_cells(static_cast<long double>(cols) * rows * static_cast<long double>(s) * static_cast<long double>(s), limits);
  const auto base = level_cells(n, T);
  std::vector<Point> cells;
  cells.reserve(base.size() * static_cast<std::size_t>(cols) * rows);
  for (int j = 0; j < rows; ++j)
    for (int i = 0; i < cols; ++i)
      for (const auto& c : base) cells.push_back({c.x + i * s + origin.x, c.y + j * s + origin.y});
  const Rect box{origin.x, origin.y, origin.x + cols * s, origin.y + rows * s};
  SpongeGraph g = SpongeGraph::from_cells(std::move(cells), box);
  g.level = n;
  g.cols = cols;
  g.rows = rows;
  g.origin = origin;
  return g;
}

SpongeGraph build_full_window(int n, const GeneratorSet& T, const Limits& limits) {
  check_level(n, limits);
  const Coord s = ipow(T.base(), n);
  check_cells(4.0L * static_cast<long double>(s) * static_cast<long double>(s), limits);
  const auto base = level_cells(n, T);
  std::vector<Point> cells;
  cells.reserve(base.size() * 4);
  for (const auto& c : base) {
    cells.push_back(c);
    cells.push_back({-c.x - 1, c.y});
    cells.push_back({c.x, -c.y - 1});
    cells.push_back({-c.x - 1, -c.y - 1});
  }
  SpongeGraph g = SpongeGraph::from_cells(std::move(cells), Rect{-s, -s, s, s});
  g.level = n;
  g.cols = 2;
  g.rows = 2;
  g.origin = {-s, -s};
  return g;
}

SpongeGraph build_region(const Rect& rect, const GeneratorSet& T, const Limits& limits) {
  if (rect.width() < 0 || rect.height() < 0) throw Error(ErrorKind::Geometry, "inverted rectangle");
  check_cells(static_cast<long double>(rect.width()) * static_cast<long double>(rect.height()), limits);
  std::vector<Point> cells;
  for (Coord b = rect.y0; b < rect.y1; ++b)
    for (Coord a = rect.x0; a < rect.x1; ++a)
      if (full_cell_retained(T, a, b)) cells.push_back({a, b});
  SpongeGraph g = SpongeGraph::from_cells(std::move(cells), rect);
  g.origin = {rect.x0, rect.y0};
  return g;
}

SubGraph restrict_to(const SpongeGraph& g, const std::vector<Rect>& rects) {
  if (rects.empty()) throw Error(ErrorKind::Geometry, "empty region");
  Rect hull = rects.front();
  for (const auto& r : rects) hull = hull.united(r);
  auto inside = [&](const Point& p) {
    for (const auto& r : rects)
      if (r.contains(p)) return true;
    return false;
  };
  std::vector<Point> verts;
  for (const auto& v : g.vertices())
    if (inside(v)) verts.push_back(v);
  std::vector<Point> cells;
  for (const auto& c : g.cells())
    for (const auto& r : rects)
      if (c.x >= r.x0 && c.y >= r.y0 && c.x + 1 <= r.x1 && c.y + 1 <= r.y1) {
        cells.push_back(c);
        break;
      }
  SubGraph out;
  out.graph = SpongeGraph::from_vertices(std::move(verts), std::move(cells), hull);
  out.graph.origin = {hull.x0, hull.y0};
  out.parent_edge.reserve(out.graph.edge_count());
  for (EdgeId e = 0; e < static_cast<EdgeId>(out.graph.edge_count()); ++e)
    out.parent_edge.push_back(*g.edge_id(out.graph.edge_low(e), out.graph.edge_high(e)));
  return out;
}

SubGraph restrict_to(const SpongeGraph& g, const Rect& rect) { return restrict_to(g, std::vector<Rect>{rect}); }

SpongeGraph apply_transform(const SpongeGraph& g, const RegionTransform& tr) {
  std::vector<Point> verts;
  verts.reserve(g.vertex_count());
  for (const auto& v : g.vertices()) verts.push_back(tr.apply(v));
  std::vector<Point> cells;
  cells.reserve(g.cells().size());
  for (const auto& c : g.cells()) {
    const Rect img = tr.apply(Rect{c.x, c.y, c.x + 1, c.y + 1});
    cells.push_back({img.x0, img.y0});
  }
  SpongeGraph out = SpongeGraph::from_vertices(std::move(verts), std::move(cells), tr.apply(g.box()));
  out.level = g.level;
  out.cols = g.cols;
  out.rows = g.rows;
  out.origin = {out.box().x0, out.box().y0};
  return out;
}

// ---------------------------------------------------------------------------------------------
// Vertex locality

bool in_level_graph(const Point& x, int n, const GeneratorSet& T) {
  const Coord s = ipow(T.base(), n);
  if (x.x < 0 || x.y < 0 || x.x > s || x.y > s) return false;
  for (Coord dx = 0; dx <= 1; ++dx)
    for (Coord dy = 0; dy <= 1; ++dy) {
      const Coord a = x.x - dx, b = x.y - dy;
      if (a >= 0 && b >= 0 && a < s && b < s && level_cell_retained(T, n, a, b)) return true;
    }
  return false;
}

bool in_carpet(const Point& x, const GeneratorSet& T) {
  if (x.x < 0 || x.y < 0) return false;
  for (Coord dx = 0; dx <= 1; ++dx)
    for (Coord dy = 0; dy <= 1; ++dy) {
      const Coord a = x.x - dx, b = x.y - dy;
      if (a >= 0 && b >= 0 && full_cell_retained(T, a, b)) return true;
    }
  return false;
}

namespace {

bool in_full_lattice(const Point& x, const GeneratorSet& T) {
  return in_carpet({x.x < 0 ? -x.x : x.x, x.y < 0 ? -x.y : x.y}, T);
}

}  // namespace

int level_of(const Point& x, const GeneratorSet& T) {
  if (!in_carpet(x, T)) throw Error(ErrorKind::NotAVertex, carpetperc::to_string(x) + " is not a carpet vertex");
  for (int n = 0;; ++n)
    if (in_level_graph(x, n, T)) return n;
}

Point nth_box_any(const Point& x, int n, const GeneratorSet& T) {
  if (n < 0) throw Error(ErrorKind::Level, "negative level");
  const Point q{x.x < 0 ? -x.x : x.x, x.y < 0 ? -x.y : x.y};
  if (!in_carpet(q, T)) throw Error(ErrorKind::NotAVertex, carpetperc::to_string(x) + " is not a carpet vertex");
  const Coord s = ipow(T.base(), n);
  std::vector<Coord> is{q.x / s}, js{q.y / s};
  if (q.x % s == 0 && q.x > 0) is.push_back(q.x / s - 1);
  if (q.y % s == 0 && q.y > 0) js.push_back(q.y / s - 1);
  std::optional<Point> best;
  long double best_d = 0;
  for (Coord i : is)
    for (Coord j : js) {
      if (!full_cell_retained(T, i, j)) continue;
      const Point w{i * s, j * s};
      const long double cx = w.x + s / 2.0L, cy = w.y + s / 2.0L;
      const long double d = cx * cx + cy * cy;
      if (!best || d < best_d || (d == best_d && std::make_pair(w.x, w.y) < std::make_pair(best->x, best->y))) {
        best = w;
        best_d = d;
      }
    }
  if (!best) throw Error(ErrorKind::NotAVertex, "no retained box of level " + std::to_string(n) + " contains " + carpetperc::to_string(x));
  Point w = *best;
  if (x.x < 0) w.x = -w.x - s;
  if (x.y < 0) w.y = -w.y - s;
  return w;
}

Point nth_box(const Point& x, int n, const GeneratorSet& T) {
  const int lvl = level_of(x, T);
  if (n < lvl)
    throw Error(ErrorKind::Level, "level " + std::to_string(n) + " below level_of " + std::to_string(lvl));
  return nth_box_any(x, n, T);
}

int separation_scale(const Point& x, const Point& y, const GeneratorSet& T) {
  if (!in_full_lattice(x, T)) throw Error(ErrorKind::NotAVertex, carpetperc::to_string(x) + " is not a lattice vertex");
  if (!in_full_lattice(y, T)) throw Error(ErrorKind::NotAVertex, carpetperc::to_string(y) + " is not a lattice vertex");
  const long double dx = static_cast<long double>(x.x - y.x), dy = static_cast<long double>(x.y - y.y);
  const long double dist2 = dx * dx + dy * dy;
  if (dist2 <= 72.0L) return 0;
  int best = 0;
  for (int n = 0;; ++n) {
    const Coord s = ipow(T.base(), n);
    const Point a = nth_box_any(x, n, T), b = nth_box_any(y, n, T);
    const Coord gx = std::max<Coord>({0, a.x - (b.x + s), b.x - (a.x + s)});
    const Coord gy = std::max<Coord>({0, a.y - (b.y + s), b.y - (a.y + s)});
    if (gx > 0 || gy > 0) best = n;
    if (static_cast<long double>(s) * static_cast<long double>(s) > dist2) break;
  }
  return best;
}

ConditionReport check_generator_conditions(const GeneratorSet& T) {
  ConditionReport r;
  const int L = T.base();
  // (1) shared-edge connectivity of the retained cells
  std::vector<std::pair<int, int>> seen{T.cells().front()};
  std::queue<std::pair<int, int>> q;
  q.push(T.cells().front());
  std::vector<char> mark(static_cast<std::size_t>(L) * L, 0);
  mark[static_cast<std::size_t>(T.cells().front().second) * L + T.cells().front().first] = 1;
  std::size_t reached = 1;
  while (!q.empty()) {
    auto [i, j] = q.front();
    q.pop();
    const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      const int a = i + di[k], b = j + dj[k];
      if (!T.contains(a, b) || mark[static_cast<std::size_t>(b) * L + a]) continue;
      mark[static_cast<std::size_t>(b) * L + a] = 1;
      ++reached;
      q.push({a, b});
    }
  }
  r.connected = reached == T.cells().size();
  // (2) closure under (i,j)->(j,i) and (i,j)->(i,L-1-j)
  r.symmetric = std::all_of(T.cells().begin(), T.cells().end(), [&](const auto& c) {
    return T.contains(c.second, c.first) && T.contains(c.first, L - 1 - c.second);
  });
  // (3) full left column
  r.left_column_full = true;
  for (int j = 0; j < L; ++j) r.left_column_full = r.left_column_full && T.contains(0, j);
  return r;
}

}  // namespace carpetperc
