#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "carpetperc/lattice.hpp"

namespace carpetperc {

enum class FaceKind { Cell, Hole, Sector };
enum class Sector { Left = 0, Right = 1, Bottom = 2, Top = 3 };

const char* to_string(FaceKind k);
const char* to_string(Sector s);

using FaceId = std::int32_t;

struct Face {
  FaceKind kind = FaceKind::Cell;
  Point first_square{};  // row-major smallest unit square of the face
  std::int64_t squares = 0;
  Rect bounds{};  // hull of its squares; empty for sectors
};

/// Crossing of a primal edge: the face on its left/below side and the face on its right/above side.
struct DualEdge {
  FaceId a = 0;
  FaceId b = 0;
  EdgeId primal = 0;
};

/// Face-contracted dual of a window. Finite faces are the connected components of the unit
/// squares inside the window box, joined across every unit segment that is not a primal edge;
/// a retained cell is a face of its own and every hole collapses to one face. The outside of the
/// box is split into four sectors. Dual edge ids coincide with primal edge ids.
class DualGraph {
 public:
  DualGraph() = default;
  explicit DualGraph(const SpongeGraph& g);

  const SpongeGraph& graph() const { return *graph_; }
  std::size_t finite_face_count() const { return finite_; }
  std::size_t face_count() const { return faces_.size(); }
  const std::vector<Face>& faces() const { return faces_; }
  const std::vector<DualEdge>& edges() const { return edges_; }

  FaceId sector(Sector s) const { return static_cast<FaceId>(finite_) + static_cast<FaceId>(s); }
  bool is_sector(FaceId f) const { return f >= static_cast<FaceId>(finite_); }

  /// Face containing the unit square with lower-left corner sq; sectors outside the box.
  FaceId face_of_square(const Point& sq) const;

  std::int32_t dual_edge_of(EdgeId e) const;
  EdgeId primal_of(std::int32_t dual_edge) const;

  /// Ids must refer to the same window geometry.
  bool pairs_with(const SpongeGraph& g) const;

 private:
  const SpongeGraph* graph_ = nullptr;
  std::size_t finite_ = 0;
  std::vector<Face> faces_;
  std::vector<FaceId> square_face_;  // box.width * box.height
  std::vector<DualEdge> edges_;
};

DualGraph build_dual(const SpongeGraph& g);

/// Unit squares on the two sides of a primal edge: below/above for horizontal, left/right for vertical.
std::pair<Point, Point> edge_side_squares(const SpongeGraph& g, EdgeId e);

}  // namespace carpetperc
