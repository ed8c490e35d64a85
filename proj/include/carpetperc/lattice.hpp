#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "carpetperc/geometry.hpp"

namespace carpetperc {

/// The retained sub-cells T of {0..L-1}^2 that generate a carpet.
class GeneratorSet {
 public:
  GeneratorSet(int base, std::vector<std::pair<int, int>> cells);

  /// L = 3, all cells except the centre (1,1).
  static GeneratorSet carpet3();
  /// All L*L cells: the plain square lattice.
  static GeneratorSet full(int base);
  /// "carpet3", "full3", or an explicit list "0,0;0,1;..." (base inferred as max digit + 1
  /// unless prefixed with "L:", e.g. "4:0,0;...").
  static GeneratorSet parse(const std::string& text);

  int base() const { return base_; }
  const std::vector<std::pair<int, int>>& cells() const { return cells_; }
  bool contains(int i, int j) const;
  std::string to_string() const;

 private:
  int base_;
  std::vector<std::pair<int, int>> cells_;  // sorted, unique
  std::vector<char> mask_;
};

struct CellAddress {
  std::vector<std::pair<int, int>> digits;  // coarsest scale first
  int level() const { return static_cast<int>(digits.size()); }
};

/// True iff every digit pair of addr belongs to T. Throws InvalidAddress on out-of-range digits.
bool retained_cell(const CellAddress& addr, const GeneratorSet& T);

/// Retained-cell test for the unit cell with lower-left corner (a,b), a,b in [0, L^n), inside G_n^T.
bool level_cell_retained(const GeneratorSet& T, int n, Coord a, Coord b);

/// Retained-cell test for a unit cell of the full lattice S^T (any sign); cells with negative
/// coordinates are reflections of the first quadrant.
bool full_cell_retained(const GeneratorSet& T, Coord a, Coord b);

/// Resource guard for lattice construction.
struct Limits {
  int max_level = 7;
  std::uint64_t max_cells = 20'000'000;

  /// Defaults, with max_cells overridden by CARPET_PERC_MAX_CELLS when set.
  static Limits from_env();
};

using VertexId = std::int32_t;
using EdgeId = std::int32_t;

struct Edge {
  VertexId u = 0;  // lower-left endpoint
  VertexId v = 0;
  bool horizontal = true;
};

/// Finite window of a carpet lattice: unit-length edges between integer points, canonically
/// ordered (vertices row-major, edges by lower endpoint then horizontal before vertical).
class SpongeGraph {
 public:
  SpongeGraph() = default;

  /// Vertices are the corners of the given unit cells; edges join vertices at distance 1.
  static SpongeGraph from_cells(std::vector<Point> cells, Rect box);
  /// Explicit vertex set (edges still by the unit-distance rule).
  static SpongeGraph from_vertices(std::vector<Point> vertices, std::vector<Point> cells, Rect box);

  int level = 0;
  int cols = 1;
  int rows = 1;
  Point origin{};

  const Rect& box() const { return box_; }
  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  /// Lower-left corners of retained unit cells, row-major.
  const std::vector<Point>& cells() const { return cells_; }
  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  std::optional<VertexId> vertex_id(const Point& p) const;
  bool has_vertex(const Point& p) const { return vertex_id(p).has_value(); }
  std::optional<EdgeId> edge_id(const Point& a, const Point& b) const;
  bool has_cell(const Point& lower_left) const;

  Point edge_low(EdgeId e) const { return vertices_[edges_[e].u]; }
  Point edge_high(EdgeId e) const { return vertices_[edges_[e].v]; }
  /// Geometry-only key: equal for the same lattice edge in any window.
  std::uint64_t edge_key(EdgeId e) const;

  /// Edge id leaving vertex v to the right / upward, or -1.
  EdgeId right_edge(VertexId v) const { return right_[v]; }
  EdgeId up_edge(VertexId v) const { return up_[v]; }
  /// All edges incident to v (up to four).
  std::vector<EdgeId> incident(VertexId v) const;
  VertexId other_end(EdgeId e, VertexId v) const { return edges_[e].u == v ? edges_[e].v : edges_[e].u; }

  bool same_shape(const SpongeGraph& o) const {
    return vertices_ == o.vertices_ && cells_ == o.cells_ && edges_.size() == o.edges_.size();
  }

 private:
  void index();

  Rect box_{};
  std::vector<Point> vertices_;
  std::vector<Edge> edges_;
  std::vector<Point> cells_;
  std::vector<VertexId> grid_;    // (box.width+1)*(box.height+1)
  std::vector<char> cell_grid_;   // box.width*box.height
  std::vector<EdgeId> right_, up_, left_, down_;
};

std::uint64_t lattice_edge_key(const Point& low, bool horizontal);

/// Union of cols x rows shifted copies of G_n^T, lower-left corner at origin.
SpongeGraph build_sponge(int n, int cols, int rows, const GeneratorSet& T, Point origin = {},
                         const Limits& limits = Limits::from_env());

/// S^T restricted to [-L^n, L^n]^2 (the four reflected copies of G_n^T).
SpongeGraph build_full_window(int n, const GeneratorSet& T, const Limits& limits = Limits::from_env());

/// S^T restricted to an arbitrary rectangle.
SpongeGraph build_region(const Rect& rect, const GeneratorSet& T, const Limits& limits = Limits::from_env());

/// Subgraph of g spanned by its vertices inside rect, with the parent id of every kept edge.
struct SubGraph {
  SpongeGraph graph;
  std::vector<EdgeId> parent_edge;
};
SubGraph restrict_to(const SpongeGraph& g, const Rect& rect);
/// Same for a union of rectangles; edges join kept vertices at unit distance.
SubGraph restrict_to(const SpongeGraph& g, const std::vector<Rect>& rects);

SpongeGraph apply_transform(const SpongeGraph& g, const RegionTransform& tr);

/// Membership of x in G_n^T.
bool in_level_graph(const Point& x, int n, const GeneratorSet& T);
/// Membership of x in G^T (first quadrant).
bool in_carpet(const Point& x, const GeneratorSet& T);

/// Smallest n with x in G_n^T; throws NotAVertex.
int level_of(const Point& x, const GeneratorSet& T);

/// Shift w with G_n^T + w a subgraph of G^T containing x, nearest to the origin
/// (box centre distance, then lexicographic). Throws Level when n < level_of(x).
Point nth_box(const Point& x, int n, const GeneratorSet& T);
/// Same without the level precondition (any n >= 0); x may lie in any quadrant of S^T.
Point nth_box_any(const Point& x, int n, const GeneratorSet& T);

/// n(x,y): 0 if |x-y| <= 6*sqrt(2), else the largest n with positive distance between the
/// n-th boxes of x and y.
int separation_scale(const Point& x, const Point& y, const GeneratorSet& T);

struct ConditionReport {
  bool connected = false;
  bool symmetric = false;
  bool left_column_full = false;
  bool all() const { return connected && symmetric && left_column_full; }
};
ConditionReport check_generator_conditions(const GeneratorSet& T);

}  // namespace carpetperc
