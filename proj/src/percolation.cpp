#include "carpetperc/percolation.hpp"

#include <algorithm>
#include <numeric>

#include "carpetperc/error.hpp"

namespace carpetperc {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t Stream::prefix() const {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ (static_cast<std::uint64_t>(tag) * 0xD1B54A32D192ED03ULL));
  return splitmix64(h ^ (replica * 0x8CB92BA72F3D8DD7ULL + 0x632BE59BD9B4E019ULL));
}

std::vector<std::uint64_t> edge_prehash(const SpongeGraph& g) {
  std::vector<std::uint64_t> out(g.edge_count());
  for (EdgeId e = 0; e < static_cast<EdgeId>(out.size()); ++e) out[e] = splitmix64(g.edge_key(e));
  return out;
}

void fill_uniforms(const std::vector<std::uint64_t>& prehash, const Stream& s, std::vector<double>& out) {
  const std::uint64_t pre = s.prefix();
  out.resize(prehash.size());
  for (std::size_t i = 0; i < prehash.size(); ++i) out[i] = uniform_from_hash(splitmix64(prehash[i] ^ pre));
}

// ---------------------------------------------------------------------------------------------

void DisjointSet::reset(std::size_t n) {
  parent_.resize(n);
  std::iota(parent_.begin(), parent_.end(), 0u);
  rank_.assign(n, 0);
}

std::size_t DisjointSet::find(std::size_t a) {
  while (parent_[a] != a) {
    parent_[a] = parent_[parent_[a]];
    a = parent_[a];
  }
  return a;
}

bool DisjointSet::unite(std::size_t a, std::size_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (rank_[a] < rank_[b]) std::swap(a, b);
  parent_[b] = static_cast<std::uint32_t>(a);
  if (rank_[a] == rank_[b]) ++rank_[a];
  return true;
}

// ---------------------------------------------------------------------------------------------

BondConfiguration::BondConfiguration(const SpongeGraph& g, bool all_open)
    : graph_(&g), open_(g.edge_count(), all_open ? 1 : 0) {}

BondConfiguration::BondConfiguration(const SpongeGraph& g, std::vector<std::uint8_t> bits)
    : graph_(&g), open_(std::move(bits)) {
  if (open_.size() != g.edge_count())
    throw Error(ErrorKind::Argument, "bit vector length " + std::to_string(open_.size()) + " != edge count " +
                                         std::to_string(g.edge_count()));
  for (auto& b : open_) b = b ? 1 : 0;
}

std::size_t BondConfiguration::open_count() const {
  return static_cast<std::size_t>(std::count(open_.begin(), open_.end(), std::uint8_t{1}));
}

UniformField::UniformField(const SpongeGraph& g, std::uint64_t seed, std::uint64_t replica, StreamTag tag)
    : graph_(&g), seed_(seed) {
  fill_uniforms(edge_prehash(g), Stream{seed, tag, replica}, u_);
}

namespace {

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::Domain, "probability " + std::to_string(p) + " outside [0,1]");
}

}  // namespace

BondConfiguration threshold_config(const UniformField& f, double p) {
  check_probability(p);
  BondConfiguration w(f.graph());
  for (EdgeId e = 0; e < static_cast<EdgeId>(w.size()); ++e) w.set(e, f[e] < p);
  w.p = p;
  w.seed = f.seed();
  return w;
}

BondConfiguration sample_config(const SpongeGraph& g, double p, std::uint64_t seed, std::uint64_t replica) {
  check_probability(p);
  return threshold_config(UniformField(g, seed, replica), p);
}

BondConfiguration flip_edge(const BondConfiguration& w, EdgeId e) {
  if (e < 0 || e >= static_cast<EdgeId>(w.size())) throw Error(ErrorKind::Index, "edge id " + std::to_string(e) + " out of range");
  BondConfiguration out = w;
  out.set(e, !w.open(e));
  return out;
}

BondConfiguration restrict_config(const BondConfiguration& w, const SubGraph& sub) {
  BondConfiguration out(sub.graph);
  for (EdgeId e = 0; e < static_cast<EdgeId>(sub.parent_edge.size()); ++e) out.set(e, w.open(sub.parent_edge[e]));
  out.p = w.p;
  out.seed = w.seed;
  return out;
}

// ---------------------------------------------------------------------------------------------

ClusterPartition clusters(const BondConfiguration& w) {
  const SpongeGraph& g = w.graph();
  DisjointSet dsu(g.vertex_count());
  for (EdgeId e = 0; e < static_cast<EdgeId>(g.edge_count()); ++e)
    if (w.open(e)) dsu.unite(g.edges()[e].u, g.edges()[e].v);
  ClusterPartition c;
  c.label.assign(g.vertex_count(), -1);
  std::vector<std::int32_t> root_label(g.vertex_count(), -1);
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    const std::size_t r = dsu.find(v);
    const Point& p = g.vertices()[v];
    if (root_label[r] < 0) {
      root_label[r] = static_cast<std::int32_t>(c.extent.size());
      c.extent.push_back({p.x, p.y, p.x, p.y});
    }
    c.label[v] = root_label[r];
    c.extent[root_label[r]] = c.extent[root_label[r]].united({p.x, p.y, p.x, p.y});
  }
  return c;
}

bool connected(const BondConfiguration& w, const Point& x, const Point& y) {
  const SpongeGraph& g = w.graph();
  auto a = g.vertex_id(x), b = g.vertex_id(y);
  if (!a) throw Error(ErrorKind::NotAVertex, to_string(x) + " is not a vertex of the window");
  if (!b) throw Error(ErrorKind::NotAVertex, to_string(y) + " is not a vertex of the window");
  if (*a == *b) return true;
  DisjointSet dsu(g.vertex_count());
  for (EdgeId e = 0; e < static_cast<EdgeId>(g.edge_count()); ++e)
    if (w.open(e)) dsu.unite(g.edges()[e].u, g.edges()[e].v);
  return dsu.same(*a, *b);
}

std::vector<std::int32_t> crossing_clusters(const SpongeGraph& g, const ClusterPartition& c, Direction d) {
  const Rect& box = g.box();
  std::vector<std::int32_t> out;
  for (std::size_t k = 0; k < c.count(); ++k) {
    const Rect& r = c.extent[k];
    const bool hit = d == Direction::LeftRight ? (r.x0 == box.x0 && r.x1 == box.x1) : (r.y0 == box.y0 && r.y1 == box.y1);
    if (hit) out.push_back(static_cast<std::int32_t>(k));
  }
  return out;
}

bool has_crossing(const BondConfiguration& w, Direction d) {
  const SpongeGraph& g = w.graph();
  if (g.vertex_count() == 0) return false;
  return !crossing_clusters(g, clusters(w), d).empty();
}

std::vector<std::int32_t> dual_clusters(const BondConfiguration& w, const DualGraph& d,
                                        std::initializer_list<Sector> blocked) {
  if (!d.pairs_with(w.graph())) throw Error(ErrorKind::Pairing, "dual graph was built from a different window");
  std::vector<char> skip(d.face_count(), 0);
  for (Sector s : blocked) skip[d.sector(s)] = 1;
  DisjointSet dsu(d.face_count());
  for (const auto& de : d.edges())
    if (!w.open(de.primal) && !skip[de.a] && !skip[de.b]) dsu.unite(static_cast<std::size_t>(de.a), static_cast<std::size_t>(de.b));
  std::vector<std::int32_t> label(d.face_count());
  for (std::size_t f = 0; f < label.size(); ++f) label[f] = static_cast<std::int32_t>(dsu.find(f));
  return label;
}

bool has_dual_crossing(const BondConfiguration& w, const DualGraph& d, Direction dir) {
  if (dir == Direction::LeftRight) {
    const auto label = dual_clusters(w, d, {Sector::Top, Sector::Bottom});
    return label[d.sector(Sector::Left)] == label[d.sector(Sector::Right)];
  }
  const auto label = dual_clusters(w, d, {Sector::Left, Sector::Right});
  return label[d.sector(Sector::Top)] == label[d.sector(Sector::Bottom)];
}

bool has_circuit_around(const BondConfiguration& w, int n, CircuitMode mode) {
  const SpongeGraph& g = w.graph();
  const Rect& box = g.box();
  if (n < 1 || box.width() != box.height()) throw Error(ErrorKind::Geometry, "circuit query needs a square window and n >= 1");
  if (mode == CircuitMode::Open) {
    if (box.x0 != 0 || box.y0 != 0) throw Error(ErrorKind::Geometry, "open circuit query expects G_n^T at the origin");
    const DualGraph d(g);
    const Coord s = box.width();
    const FaceId hole = d.face_of_square({s / 2, s / 2});
    if (d.faces()[hole].kind != FaceKind::Hole)
      throw Error(ErrorKind::Geometry, "window has no central hole at level " + std::to_string(n));
    const auto label = dual_clusters(w, d);
    for (int s4 = 0; s4 < 4; ++s4)
      if (label[hole] == label[d.sector(static_cast<Sector>(s4))]) return false;
    return true;
  }
  const Coord s = box.width() / 2;
  if (box.x0 != -s || box.y0 != -s || n < 2) throw Error(ErrorKind::Geometry, "dual circuit query expects [-L^n, L^n]^2 with n >= 2");
  // s = L^n; recover L from the level
  Coord L = 2;
  while (ipow(L, n) < s) ++L;
  if (ipow(L, n) != s) throw Error(ErrorKind::Geometry, "window side is not a power of the level");
  const Coord r = ipow(L, n - 2);
  const Rect inner{-r, -r, r, r};
  const auto c = clusters(w);
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    if (!inner.contains(g.vertices()[v])) continue;
    const Rect& e = c.extent[c.label[v]];
    if (e.x0 == box.x0 || e.x1 == box.x1 || e.y0 == box.y0 || e.y1 == box.y1) return false;
  }
  return true;
}

}  // namespace carpetperc
