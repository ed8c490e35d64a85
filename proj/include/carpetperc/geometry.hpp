#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace carpetperc {

using Coord = std::int64_t;

struct Point {
  Coord x = 0;
  Coord y = 0;

  friend bool operator==(const Point&, const Point&) = default;
  friend auto operator<=>(const Point& a, const Point& b) {
    // row-major: compare y first
    if (auto c = a.y <=> b.y; c != 0) return c;
    return a.x <=> b.x;
  }
  Point operator+(const Point& o) const { return {x + o.x, y + o.y}; }
  Point operator-(const Point& o) const { return {x - o.x, y - o.y}; }
};

std::string to_string(const Point& p);

/// Closed axis-aligned rectangle [x0,x1] x [y0,y1] with integer corners.
struct Rect {
  Coord x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  friend bool operator==(const Rect&, const Rect&) = default;

  Coord width() const { return x1 - x0; }
  Coord height() const { return y1 - y0; }
  bool contains(const Point& p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
  bool contains(const Rect& r) const { return r.x0 >= x0 && r.x1 <= x1 && r.y0 >= y0 && r.y1 <= y1; }
  Rect shifted(const Point& d) const { return {x0 + d.x, y0 + d.y, x1 + d.x, y1 + d.y}; }
  Rect united(const Rect& r) const;
  /// True when the open interiors overlap.
  bool interiors_overlap(const Rect& r) const;
};

std::string to_string(const Rect& r);

enum class Direction { LeftRight, UpDown };

Direction flip(Direction d);
std::string to_string(Direction d);

/// Horizontal or vertical lattice segment; `a` and `b` are its endpoints with a <= b.
struct Segment {
  Point a, b;

  bool contains(const Point& p) const {
    return p.x >= a.x && p.x <= b.x && p.y >= a.y && p.y <= b.y;
  }
};

/// Isometry of Z^2 built from the dihedral group of the square plus a shift.
///
/// Applied as: reflect across the x1-axis (x,y)->(x,-y) if reflect_x1, then across the
/// x2-axis (x,y)->(-x,y) if reflect_x2, then rotate by quarter_turns * 90 degrees
/// counter-clockwise, then translate by shift.
struct RegionTransform {
  int quarter_turns = 0;
  bool reflect_x1 = false;
  bool reflect_x2 = false;
  Point shift{};

  static RegionTransform identity() { return {}; }
  static RegionTransform translation(Point d) { return {0, false, false, d}; }
  static RegionTransform rotation(int quarter_turns) { return {quarter_turns, false, false, {}}; }
  /// Reflection across the line {x1 = x2}.
  static RegionTransform diagonal_reflection();

  Point apply(const Point& p) const;
  /// Image of a closed rectangle (still axis-aligned).
  Rect apply(const Rect& r) const;
  Segment apply(const Segment& s) const;
  /// Image of a direction: quarter turns swap LR and UD.
  Direction apply(Direction d) const;

  /// (this * other)(p) == this->apply(other.apply(p)).
  RegionTransform compose(const RegionTransform& other) const;
  RegionTransform inverse() const;

  /// Linear part as a row-major 2x2 integer matrix.
  void matrix(int m[4]) const;
  static RegionTransform from_matrix(const int m[4], Point shift);

  bool equivalent(const RegionTransform& o) const;
};

struct PointHash {
  std::size_t operator()(const Point& p) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(p.x) * 0x9E3779B97F4A7C15ULL;
    h ^= static_cast<std::uint64_t>(p.y) + 0x7F4A7C159E3779B9ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

/// Integer power with overflow guard for the small bases used here.
Coord ipow(Coord base, int exp);

}  // namespace carpetperc
