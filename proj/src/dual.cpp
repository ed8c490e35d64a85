#include "carpetperc/dual.hpp"

#include <algorithm>
#include <numeric>

#include "carpetperc/error.hpp"
#include "carpetperc/percolation.hpp"

namespace carpetperc {

const char* to_string(FaceKind k) {
  switch (k) {
    case FaceKind::Cell: return "cell";
    case FaceKind::Hole: return "hole";
    case FaceKind::Sector: return "sector";
  }
  return "?";
}

const char* to_string(Sector s) {
  switch (s) {
    case Sector::Left: return "left";
    case Sector::Right: return "right";
    case Sector::Bottom: return "bottom";
    case Sector::Top: return "top";
  }
  return "?";
}

std::pair<Point, Point> edge_side_squares(const SpongeGraph& g, EdgeId e) {
  const Point lo = g.edge_low(e);
  if (g.edges()[e].horizontal) return {{lo.x, lo.y - 1}, {lo.x, lo.y}};
  return {{lo.x - 1, lo.y}, {lo.x, lo.y}};
}

DualGraph::DualGraph(const SpongeGraph& g) : graph_(&g) {
  const Rect& box = g.box();
  const Coord w = box.width(), h = box.height();
  const std::size_t n = static_cast<std::size_t>(std::max<Coord>(w, 0) * std::max<Coord>(h, 0));
  DisjointSet dsu(n);
  auto idx = [&](Coord x, Coord y) { return static_cast<std::size_t>((y - box.y0) * w + (x - box.x0)); };
  for (Coord y = box.y0; y < box.y1; ++y)
    for (Coord x = box.x0; x < box.x1; ++x) {
      // the segment between (x,y) and its right neighbour is the vertical line at x+1
      if (x + 1 < box.x1 && !g.edge_id({x + 1, y}, {x + 1, y + 1})) dsu.unite(idx(x, y), idx(x + 1, y));
      if (y + 1 < box.y1 && !g.edge_id({x, y + 1}, {x + 1, y + 1})) dsu.unite(idx(x, y), idx(x, y + 1));
    }
  square_face_.assign(n, -1);
  std::vector<FaceId> root_face(n, -1);
  for (Coord y = box.y0; y < box.y1; ++y)
    for (Coord x = box.x0; x < box.x1; ++x) {
      const std::size_t r = dsu.find(idx(x, y));
      if (root_face[r] < 0) {
        root_face[r] = static_cast<FaceId>(faces_.size());
        faces_.push_back({FaceKind::Hole, {x, y}, 0, Rect{x, y, x + 1, y + 1}});
      }
      Face& f = faces_[root_face[r]];
      ++f.squares;
      f.bounds = f.bounds.united(Rect{x, y, x + 1, y + 1});
      square_face_[idx(x, y)] = root_face[r];
    }
  for (auto& f : faces_)
    if (f.squares == 1 && g.has_cell(f.first_square)) f.kind = FaceKind::Cell;
  finite_ = faces_.size();
  for (int s = 0; s < 4; ++s) faces_.push_back({FaceKind::Sector, {}, 0, {}});

  edges_.reserve(g.edge_count());
  for (EdgeId e = 0; e < static_cast<EdgeId>(g.edge_count()); ++e) {
    auto [sa, sb] = edge_side_squares(g, e);
    edges_.push_back({face_of_square(sa), face_of_square(sb), e});
  }
}

FaceId DualGraph::face_of_square(const Point& sq) const {
  const Rect& box = graph_->box();
  if (sq.x < box.x0) return sector(Sector::Left);
  if (sq.x >= box.x1) return sector(Sector::Right);
  if (sq.y < box.y0) return sector(Sector::Bottom);
  if (sq.y >= box.y1) return sector(Sector::Top);
  return square_face_[static_cast<std::size_t>((sq.y - box.y0) * box.width() + (sq.x - box.x0))];
}

std::int32_t DualGraph::dual_edge_of(EdgeId e) const {
  if (e < 0 || e >= static_cast<EdgeId>(edges_.size()))
    throw Error(ErrorKind::Index, "unknown primal edge id " + std::to_string(e));
  return e;
}

EdgeId DualGraph::primal_of(std::int32_t d) const {
  if (d < 0 || d >= static_cast<std::int32_t>(edges_.size()))
    throw Error(ErrorKind::Index, "unknown dual edge id " + std::to_string(d));
  return edges_[d].primal;
}

bool DualGraph::pairs_with(const SpongeGraph& g) const {
  if (!graph_) return false;
  if (&g == graph_) return true;
  return g.box() == graph_->box() && g.edge_count() == graph_->edge_count() && g.vertex_count() == graph_->vertex_count();
}

DualGraph build_dual(const SpongeGraph& g) { return DualGraph(g); }

}  // namespace carpetperc
