#include "carpetperc/geometry.hpp"

#include <algorithm>
#include <limits>

#include "carpetperc/error.hpp"

namespace carpetperc {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidAddress: return "invalid-address";
    case ErrorKind::Capacity: return "capacity";
    case ErrorKind::NotAVertex: return "not-a-vertex";
    case ErrorKind::Level: return "level";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Index: return "index";
    case ErrorKind::Pairing: return "pairing";
    case ErrorKind::Geometry: return "geometry";
    case ErrorKind::Argument: return "argument";
    case ErrorKind::Depth: return "depth";
    case ErrorKind::Subcritical: return "subcritical";
    case ErrorKind::Saturation: return "saturation";
    case ErrorKind::Starvation: return "starvation";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

std::string to_string(const Point& p) {
  return "(" + std::to_string(p.x) + "," + std::to_string(p.y) + ")";
}

std::string to_string(const Rect& r) {
  return "[" + std::to_string(r.x0) + "," + std::to_string(r.x1) + "]x[" + std::to_string(r.y0) + "," +
         std::to_string(r.y1) + "]";
}

Rect Rect::united(const Rect& r) const {
  return {std::min(x0, r.x0), std::min(y0, r.y0), std::max(x1, r.x1), std::max(y1, r.y1)};
}

bool Rect::interiors_overlap(const Rect& r) const {
  return std::max(x0, r.x0) < std::min(x1, r.x1) && std::max(y0, r.y0) < std::min(y1, r.y1);
}

Direction flip(Direction d) {
  return d == Direction::LeftRight ? Direction::UpDown : Direction::LeftRight;
}

std::string to_string(Direction d) { return d == Direction::LeftRight ? "LR" : "UD"; }

Coord ipow(Coord base, int exp) {
  if (exp < 0) throw Error(ErrorKind::Domain, "negative exponent");
  Coord r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > std::numeric_limits<Coord>::max() / base) throw Error(ErrorKind::Capacity, "integer overflow in power");
    r *= base;
  }
  return r;
}

namespace {

void mat_mul(const int a[4], const int b[4], int out[4]) {
  int r[4] = {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
              a[2] * b[1] + a[3] * b[3]};
  std::copy(r, r + 4, out);
}

Point mat_apply(const int m[4], const Point& p) {
  return {m[0] * p.x + m[1] * p.y, m[2] * p.x + m[3] * p.y};
}

}  // namespace

RegionTransform RegionTransform::diagonal_reflection() {
  const int m[4] = {0, 1, 1, 0};
  return from_matrix(m, {});
}

void RegionTransform::matrix(int m[4]) const {
  int acc[4] = {1, 0, 0, 1};
  if (reflect_x1) {
    const int f[4] = {1, 0, 0, -1};
    mat_mul(f, acc, acc);
  }
  if (reflect_x2) {
    const int f[4] = {-1, 0, 0, 1};
    mat_mul(f, acc, acc);
  }
  const int q = ((quarter_turns % 4) + 4) % 4;
  const int rot[4] = {0, -1, 1, 0};
  for (int i = 0; i < q; ++i) mat_mul(rot, acc, acc);
  std::copy(acc, acc + 4, m);
}

RegionTransform RegionTransform::from_matrix(const int m[4], Point shift) {
  // every D4 element is R^q or R^q * F1
  for (int q = 0; q < 4; ++q) {
    for (int f = 0; f < 2; ++f) {
      RegionTransform t{q, f == 1, false, shift};
      int c[4];
      t.matrix(c);
      if (std::equal(c, c + 4, m)) return t;
    }
  }
  throw Error(ErrorKind::Argument, "matrix is not a lattice symmetry");
}

Point RegionTransform::apply(const Point& p) const {
  int m[4];
  matrix(m);
  return mat_apply(m, p) + shift;
}

Rect RegionTransform::apply(const Rect& r) const {
  const Point a = apply(Point{r.x0, r.y0});
  const Point b = apply(Point{r.x1, r.y1});
  return {std::min(a.x, b.x), std::min(a.y, b.y), std::max(a.x, b.x), std::max(a.y, b.y)};
}

Segment RegionTransform::apply(const Segment& s) const {
  const Point a = apply(s.a);
  const Point b = apply(s.b);
  return {Point{std::min(a.x, b.x), std::min(a.y, b.y)}, Point{std::max(a.x, b.x), std::max(a.y, b.y)}};
}

Direction RegionTransform::apply(Direction d) const {
  int m[4];
  matrix(m);
  // an axis-swapping linear part has zero diagonal
  return m[0] == 0 ? flip(d) : d;
}

RegionTransform RegionTransform::compose(const RegionTransform& other) const {
  int a[4], b[4], c[4];
  matrix(a);
  other.matrix(b);
  mat_mul(a, b, c);
  return from_matrix(c, mat_apply(a, other.shift) + shift);
}

RegionTransform RegionTransform::inverse() const {
  int m[4];
  matrix(m);
  // orthogonal: inverse is the transpose
  const int t[4] = {m[0], m[2], m[1], m[3]};
  const Point s = mat_apply(t, shift);
  return from_matrix(t, Point{-s.x, -s.y});
}

bool RegionTransform::equivalent(const RegionTransform& o) const {
  int a[4], b[4];
  matrix(a);
  o.matrix(b);
  return std::equal(a, a + 4, b) && shift == o.shift;
}

}  // namespace carpetperc
