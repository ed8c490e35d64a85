#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "carpetperc/geometry.hpp"
#include "carpetperc/lattice.hpp"
#include "carpetperc/paperevents.hpp"
#include "carpetperc/percolation.hpp"

namespace carpetperc {

/// Vertex of the rooted binary tree: digits in {1,2}, empty for the root.
struct TreeIndex {
  std::vector<std::uint8_t> digits;

  int depth() const { return static_cast<int>(digits.size()); }
  bool is_root() const { return digits.empty(); }
  TreeIndex parent() const;
  TreeIndex child(int digit) const;
  /// Breadth-first position: root 0, children of i at 2i+1 and 2i+2.
  std::size_t heap_index() const;
  static TreeIndex from_heap_index(std::size_t i);
  /// "0" for the root, else the digits, e.g. "212".
  std::string to_string() const;
  static TreeIndex parse(const std::string& s);

  friend bool operator==(const TreeIndex&, const TreeIndex&) = default;
};

int tree_distance(const TreeIndex& a, const TreeIndex& b);
/// All indices with depth <= max_depth in breadth-first order.
std::vector<TreeIndex> tree_nodes(int max_depth);

struct TreeStats {
  int depth = 0;
  int n2 = 0;
  int epsilon = 0;
  std::vector<int> tau;  // tau_1..tau_n2; later entries are infinite
};
TreeStats tree_stats(const TreeIndex& j);

struct EllOffsets {
  Coord v = 0;
  Coord h = 0;
};
/// Vertical and horizontal run lengths of the path of boxes leading to j. Depth error when
/// |j| > N-1.
EllOffsets ell_offsets(const TreeIndex& j, int N);

Coord delta_v(const TreeIndex& j, int N);
Coord delta_h(const TreeIndex& j, int N);

/// x(j) and its reflection across the diagonal; argument error for the root.
Point anchor(const TreeIndex& j, int N);
Point mirror_anchor(const TreeIndex& j, int N);

enum class BoxKind { Straight, Branching };

struct BoxPiece {
  std::string name;  // V, J, Jl, Jr or L, I, It, Ib
  Rect rect;
  Direction dir;     // traversing direction in the ambient frame
};

struct BoxSpec {
  BoxKind kind = BoxKind::Straight;
  TreeIndex index;
  int N = 0;
  bool mirror = false;
  RegionTransform orientation;
  Point anchor{};
  std::vector<BoxPiece> pieces;

  Rect hull() const;
};

/// B_j (or its mirror B_j^dagger). Depth error unless |j| <= N-1.
BoxSpec build_box(const TreeIndex& j, int N);
BoxSpec mirror_box(const TreeIndex& j, int N);

/// Hull of every box and mirror box with |t| <= N-m.
Rect branching_region(int N, int m);
/// S^T restricted to the union of those boxes.
SpongeGraph build_branching_window(int N, int m, const GeneratorSet& T, const Limits& limits = Limits::from_env());

/// Conjunction of the traversings of the pieces of one box.
class BoxEvent {
 public:
  BoxEvent(const SpongeGraph& ambient, const BoxSpec& box);
  bool operator()(const BondConfiguration& w) const;
  /// Indicator per piece.
  std::vector<bool> pieces(const BondConfiguration& w) const;

 private:
  std::vector<std::unique_ptr<Probe>> probes_;
  std::vector<Direction> dirs_;
};

bool detect_box_event(const BondConfiguration& w, const TreeIndex& j, int N);
bool detect_mirror_event(const BondConfiguration& w, const TreeIndex& j, int N);

struct TreeField {
  int N = 0;
  int m = 0;
  std::vector<std::uint8_t> x, x_dagger;  // by heap index, |t| <= N-m

  std::uint8_t z(std::size_t heap) const { return x[heap] & x_dagger[heap]; }
  std::size_t size() const { return x.size(); }
};

class BranchingField {
 public:
  BranchingField(const SpongeGraph& ambient, int N, int m);
  TreeField operator()(const BondConfiguration& w) const;
  const std::vector<TreeIndex>& nodes() const { return nodes_; }
  /// The eight traversings behind Z(t): four pieces of B_t then four of its mirror.
  std::vector<bool> constituents(const BondConfiguration& w, std::size_t heap) const;

 private:
  int N_, m_;
  std::vector<TreeIndex> nodes_;
  std::vector<BoxEvent> boxes_, mirrors_;
};

TreeField z_field(const BondConfiguration& w, int N, int m);

struct TreeCluster {
  std::vector<std::uint8_t> member;   // by heap index
  std::vector<std::int64_t> generation;  // members per depth; entry 0 is the root
};
TreeCluster tree_cluster(const std::vector<std::uint8_t>& values, int depth);
TreeCluster tree_cluster(const TreeField& f);

/// y(j) and the open square Q(j) = (-3^(m+1), 3^(m+1))^2 + y(j), as its closure. Depth error
/// unless |j| = N-m >= 1.
Point q_center(const TreeIndex& j, int N, int m);
Rect q_square(const TreeIndex& j, int N, int m);
bool audit_q_disjoint(int N, int m);
/// c(m) = 8 * 3^(m+1).
Coord connection_cost(int m);

struct GeometryReport {
  int boxes = 0;
  int boundary_violations = 0;   // box boundary points or segments missing from S^T
  int overlap_violations = 0;    // boxes at tree distance > 1 sharing an S^T edge
  int q_violations = 0;          // overlapping Q squares
  std::int64_t interior_hole_cells = 0;  // informational: carpet holes inside the boxes
  std::vector<std::string> messages;
  bool clean() const { return boundary_violations == 0 && overlap_violations == 0 && q_violations == 0; }
};

/// Audit of an explicit box list (pairs are compared by the tree distance of their indices).
GeometryReport audit_boxes(const std::vector<BoxSpec>& boxes, const GeneratorSet& T, bool count_holes = false);
GeometryReport geometry_audit(int N, int m, const GeneratorSet& T = GeneratorSet::carpet3(), bool count_holes = false);

}  // namespace carpetperc
