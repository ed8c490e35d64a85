#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <vector>

#include "carpetperc/dual.hpp"
#include "carpetperc/lattice.hpp"

namespace carpetperc {

// ---------------------------------------------------------------------------------------------
// Keyed randomness: the uniform of an edge depends only on (seed, stream tag, replica, geometric
// edge key), so one lattice edge sees the same value in every window that contains it.

enum class StreamTag : std::uint64_t { Primal = 1, Dual = 2, Auxiliary = 3 };

std::uint64_t splitmix64(std::uint64_t x);

struct Stream {
  std::uint64_t seed = 0;
  StreamTag tag = StreamTag::Primal;
  std::uint64_t replica = 0;

  std::uint64_t prefix() const;
};

inline double uniform_from_hash(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

/// splitmix64 of every edge key, reusable across streams.
std::vector<std::uint64_t> edge_prehash(const SpongeGraph& g);
void fill_uniforms(const std::vector<std::uint64_t>& prehash, const Stream& s, std::vector<double>& out);

// ---------------------------------------------------------------------------------------------

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n = 0) { reset(n); }
  void reset(std::size_t n);
  std::size_t find(std::size_t a);
  bool unite(std::size_t a, std::size_t b);
  bool same(std::size_t a, std::size_t b) { return find(a) == find(b); }
  std::size_t size() const { return parent_.size(); }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> rank_;
};

/// One open/closed bit per edge of a window. Holds a reference to the window, which must outlive it.
class BondConfiguration {
 public:
  BondConfiguration(const SpongeGraph& g, bool all_open = false);
  BondConfiguration(const SpongeGraph& g, std::vector<std::uint8_t> bits);

  const SpongeGraph& graph() const { return *graph_; }
  std::size_t size() const { return open_.size(); }
  bool open(EdgeId e) const { return open_[static_cast<std::size_t>(e)] != 0; }
  void set(EdgeId e, bool v) { open_[static_cast<std::size_t>(e)] = v ? 1 : 0; }
  std::size_t open_count() const;
  const std::vector<std::uint8_t>& bits() const { return open_; }

  std::optional<double> p;
  std::optional<std::uint64_t> seed;

 private:
  const SpongeGraph* graph_;
  std::vector<std::uint8_t> open_;
};

class UniformField {
 public:
  UniformField(const SpongeGraph& g, std::uint64_t seed, std::uint64_t replica = 0,
               StreamTag tag = StreamTag::Primal);

  const SpongeGraph& graph() const { return *graph_; }
  double operator[](EdgeId e) const { return u_[static_cast<std::size_t>(e)]; }
  const std::vector<double>& values() const { return u_; }
  std::uint64_t seed() const { return seed_; }

 private:
  const SpongeGraph* graph_;
  std::vector<double> u_;
  std::uint64_t seed_;
};

BondConfiguration sample_config(const SpongeGraph& g, double p, std::uint64_t seed, std::uint64_t replica = 0);
BondConfiguration threshold_config(const UniformField& f, double p);
BondConfiguration flip_edge(const BondConfiguration& w, EdgeId e);

/// Copy of the bits of `w` onto a restriction of its window.
BondConfiguration restrict_config(const BondConfiguration& w, const SubGraph& sub);

struct ClusterPartition {
  std::vector<std::int32_t> label;  // per vertex; clusters numbered by smallest vertex id
  std::vector<Rect> extent;         // per cluster, hull of its vertices
  std::size_t count() const { return extent.size(); }
};

ClusterPartition clusters(const BondConfiguration& w);
bool connected(const BondConfiguration& w, const Point& x, const Point& y);

/// Labels of clusters touching both box lines of the given direction (x0 and x1 for LR).
std::vector<std::int32_t> crossing_clusters(const SpongeGraph& g, const ClusterPartition& c, Direction d);
bool has_crossing(const BondConfiguration& w, Direction d);

/// Component label of every face under closed-edge adjacency. Dual edges ending in a sector
/// listed in `blocked` are ignored.
std::vector<std::int32_t> dual_clusters(const BondConfiguration& w, const DualGraph& d,
                                        std::initializer_list<Sector> blocked = {});
/// Closed dual path from the left to the right sector (LR) or from the top to the bottom sector
/// (UD), never passing through the other two sectors.
bool has_dual_crossing(const BondConfiguration& w, const DualGraph& d, Direction dir);

enum class CircuitMode { Open, DualClosed };

/// Open mode: w lives on G_n^T and the circuit must surround its central hole.
/// Dual-closed mode: w lives on the S^T window [-L^n, L^n]^2 and the circuit must surround
/// [-L^(n-2), L^(n-2)]^2.
bool has_circuit_around(const BondConfiguration& w, int n, CircuitMode mode);

}  // namespace carpetperc
