#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "carpetperc/dual.hpp"
#include "carpetperc/lattice.hpp"
#include "carpetperc/percolation.hpp"

namespace carpetperc {

/// Open primal path: vertices[i] and vertices[i+1] are the ends of edges[i].
struct LatticePath {
  std::vector<EdgeId> edges;
  std::vector<VertexId> vertices;
};

/// Closed dual path as a chain of unit squares; consecutive squares share a segment that is
/// either a closed edge or not an edge. `target` is the open edge it ends on.
struct DualPath {
  std::vector<Point> squares;
  std::vector<EdgeId> crossed;  // closed edges crossed along the way
  EdgeId target = -1;
};

/// A window plus its dual, held at a fixed address so the dual's graph pointer stays valid.
class Probe {
 public:
  Probe(const SpongeGraph& ambient, std::vector<Rect> rects);
  Probe(const SpongeGraph& ambient, const Rect& rect) : Probe(ambient, std::vector<Rect>{rect}) {}

  const SpongeGraph& graph() const { return sub_->graph; }
  const DualGraph& dual() const;
  BondConfiguration pull(const BondConfiguration& w) const;
  bool crossing(const BondConfiguration& w, Direction d) const { return has_crossing(pull(w), d); }
  bool dual_crossing(const BondConfiguration& w, Direction d) const { return has_dual_crossing(pull(w), dual(), d); }

 private:
  std::unique_ptr<SubGraph> sub_;
  mutable std::unique_ptr<DualGraph> dual_;
};

// ---------------------------------------------------------------------------------------------
// Pivotality

using EventFn = std::function<bool(const BondConfiguration&)>;

/// Edges whose flip changes the event, by flipping each edge in turn.
std::vector<EdgeId> pivotal_edges(const BondConfiguration& w, const EventFn& event);
/// Pivotal edges for the open crossing of the whole window, from one cluster and one dual pass.
std::vector<EdgeId> pivotal_crossing_edges(const BondConfiguration& w, const DualGraph& d, Direction dir);

// ---------------------------------------------------------------------------------------------
// Lowest crossing and the leftmost closed dual path above it

std::optional<LatticePath> lowest_crossing(const BondConfiguration& w, const DualGraph& d);
std::optional<LatticePath> lowest_crossing(const BondConfiguration& w);

/// Squares of the window lying on or below r (flooded from the bottom without crossing r).
std::vector<char> squares_below(const SpongeGraph& g, const LatticePath& r);

/// Leftmost closed dual path from the top of `strip` down to an edge of r, staying inside the
/// strip and above r. The default strip is the whole window.
std::optional<DualPath> leftmost_closed_dual_path(const BondConfiguration& w, const LatticePath& r,
                                                  std::optional<Rect> strip = std::nullopt);

// ---------------------------------------------------------------------------------------------
// Box and chain events behind long-range connectivity

/// Delta_n: crossings of the four side rectangles of size 3s x s (s = L^(n-1)) of G_n^T + shift.
class DeltaEvent {
 public:
  DeltaEvent(const SpongeGraph& ambient, int n, const GeneratorSet& T, Point shift = {});
  bool operator()(const BondConfiguration& w) const;
  /// Ambient cluster label holding every traversing of every rectangle, when Delta_n holds.
  std::optional<std::int32_t> spanning_cluster(const BondConfiguration& w, const ClusterPartition& c) const;
  /// True when Delta_n fails or all traversings of the four rectangles lie in one ambient cluster.
  bool audit(const BondConfiguration& w) const;
  const Rect& box() const { return box_; }

 private:
  struct Piece {
    std::unique_ptr<Probe> probe;
    Direction dir;
  };
  std::vector<Piece> pieces_;
  Rect box_;
};

bool detect_delta(const BondConfiguration& w, int n, const GeneratorSet& T, Point shift = {});
std::optional<std::int32_t> spanning_cluster(const BondConfiguration& w, int n, const GeneratorSet& T);

/// Delta_n at the origin and at w_n(x) for m0 < n <= level_of(x), and G_m0 around both open.
class DeltaChainEvent {
 public:
  DeltaChainEvent(const SpongeGraph& ambient, const Point& x, int m0, const GeneratorSet& T);
  bool operator()(const BondConfiguration& w) const;
  const Point& target() const { return x_; }

 private:
  std::vector<DeltaEvent> deltas_;
  std::vector<EdgeId> base_edges_;
  Point x_;
};

bool detect_delta_chain(const BondConfiguration& w, const Point& x, int m0, const GeneratorSet& T);

/// Closed dual traversings of the four rectangles around G_n^T(x); they form a dual circuit
/// around x inside the square `enclosure()`.
class SurroundEvent {
 public:
  SurroundEvent(const SpongeGraph& ambient, const Point& x, int n, const GeneratorSet& T);
  bool operator()(const BondConfiguration& w) const;
  const Rect& enclosure() const { return enclosure_; }
  /// True when the event fails or x reaches no vertex outside the enclosure.
  bool audit(const BondConfiguration& w) const;

 private:
  std::vector<std::unique_ptr<Probe>> probes_;
  Rect enclosure_;
  Point x_;
};

bool detect_surrounding_dual(const BondConfiguration& w, const Point& x, int n, const GeneratorSet& T);

/// Open path in [0,3s]x[0,s] + shift (s = 3^(n-1)) from [0,s]x{s} to [2s,3s]x{s} that avoids the
/// open middle segment (s,2s)x{s}.
class EEvent {
 public:
  EEvent(const SpongeGraph& ambient, int n, Point shift = {});
  bool operator()(const BondConfiguration& w) const;

 private:
  std::unique_ptr<Probe> probe_;
  std::vector<char> blocked_;  // per probe edge
  std::vector<VertexId> sources_, targets_;
};

bool detect_E(const BondConfiguration& w, int n, Point shift = {});

/// Audit of the chain of k shifted E_n copies on G_(n-1)(k+2,1) placed at (-3^(n-1), 0).
struct EChainAudit {
  bool chain = false;
  bool crossing = false;
  bool holds() const { return !chain || crossing; }
};
class EChain {
 public:
  EChain(const SpongeGraph& ambient, int n, int k);
  EChainAudit operator()(const BondConfiguration& w) const;

 private:
  std::vector<EEvent> copies_;
  std::unique_ptr<Probe> target_;
};

// ---------------------------------------------------------------------------------------------
// C-events around the central hole of G_(n+2)^T + shift

enum class Corner { BottomLeft, BottomRight, TopLeft, TopRight };
enum class CornerSet { Bottom, Top, All };

const char* to_string(Corner c);
Corner parse_corner(const std::string& s);
CornerSet parse_corner_set(const std::string& s);

class CEvent {
 public:
  CEvent(const SpongeGraph& ambient, int n, Corner corner, Point shift = {});
  bool operator()(const BondConfiguration& w) const;
  /// Ambient rectangle the event reads.
  Rect footprint() const;

 private:
  struct Arm {
    std::unique_ptr<Probe> probe;
    std::vector<VertexId> entry, terminal;
  };
  Arm arm_[2];
  std::unique_ptr<Probe> join_;
  std::vector<std::vector<VertexId>> join_terminal_;  // per arm: join-probe ids of terminals
};

class CComposite {
 public:
  CComposite(const SpongeGraph& ambient, int n, CornerSet which, Point shift = {});
  bool operator()(const BondConfiguration& w) const;

 private:
  std::vector<CEvent> parts_;
};

/// S^T region large enough for the C-events of level n at the origin.
Rect c_event_region(int n);

bool detect_C(const BondConfiguration& w, int n, Corner corner, Point shift = {});
bool detect_C_composite(const BondConfiguration& w, int n, CornerSet which, Point shift = {});

/// Both sides of the inclusion of C-events and crossings into D_(n+2).
struct DImplication {
  bool top = false;     // C_top, C''_all(n-1), D''(n+1)
  bool bottom = false;  // C_bottom, C'_all(n-1), D'(n+1)
  bool target = false;  // D_(n+2)
  bool holds() const { return !(top || bottom) || target; }
};

class DImplicationCheck {
 public:
  DImplicationCheck(const SpongeGraph& ambient, int n);
  DImplication operator()(const BondConfiguration& w) const;

 private:
  CComposite c_top_, c_bottom_, c_top_inner_, c_bottom_inner_;
  Probe d_top_, d_bottom_, d_full_;
};

bool check_d_implication(const BondConfiguration& w, int n);

// ---------------------------------------------------------------------------------------------
// Annuli around e_psi

/// H_n + corner: the closed square [-3^(n+1), 3^(n+2)+3^(n+1)]^2 minus the open square
/// (-2*3^n, 3^(n+2)+2*3^n)^2.
bool in_annulus(double px, double py, int n, const Point& corner);

struct ScaleReport {
  int n = 0;
  Point corner{};
  bool c_event = false;
  bool pivotal_in_annulus = false;
  bool holds() const { return !c_event || pivotal_in_annulus; }
};

struct AnnulusScan {
  bool crossing = false;
  std::optional<LatticePath> r;
  std::optional<DualPath> psi;
  EdgeId e_psi = -1;
  bool e_psi_pivotal = false;
  std::vector<ScaleReport> scales;
};

/// Window is w's graph (normally G_(n_k+2)(2,2)); strip defaults to the left column of width
/// 3^(n_k). Throws Argument when the window has no open crossing.
AnnulusScan annulus_pivotal_scan(const BondConfiguration& w, const std::vector<int>& scales,
                                 std::optional<Rect> strip = std::nullopt);

}  // namespace carpetperc
