#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace isingtorus {

struct Vec2i {
  long long x = 0;
  long long y = 0;

  friend bool operator==(const Vec2i&, const Vec2i&) = default;
  Vec2i operator+(const Vec2i& o) const { return {x + o.x, y + o.y}; }
  Vec2i operator-(const Vec2i& o) const { return {x - o.x, y - o.y}; }
  Vec2i operator-() const { return {-x, -y}; }
};

inline long long cross(const Vec2i& a, const Vec2i& b) { return a.x * b.y - a.y * b.x; }
inline long long dot(const Vec2i& a, const Vec2i& b) { return a.x * b.x + a.y * b.y; }

struct SectorLabel {
  int i = 0;  // twist across omega1
  int j = 0;  // twist across omega2
  friend bool operator==(const SectorLabel&, const SectorLabel&) = default;
};

inline constexpr SectorLabel kSector00{0, 0};
inline constexpr SectorLabel kSector01{0, 1};
inline constexpr SectorLabel kSector10{1, 0};
inline constexpr SectorLabel kSector11{1, 1};
inline constexpr SectorLabel kAllSectors[4] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};

// Momentum point with exact rational coordinates q = (nx/den, ny/den).
// Exactness matters only for membership tests (zero mode, grid congruence);
// numeric evaluation converts to double.
struct MomentumPoint {
  long long nx = 0;
  long long ny = 0;
  long long den = 1;  // > 0

  double qx() const { return static_cast<double>(nx) / static_cast<double>(den); }
  double qy() const { return static_cast<double>(ny) / static_cast<double>(den); }
  // q in Z^2 (the zero momentum modulo the unit dual lattice)
  bool is_integral() const { return nx % den == 0 && ny % den == 0; }
};

// Integer period lattice of the discrete torus. The constructor normalizes
// orientation so that Im(omega2/omega1) > 0, i.e. cross(omega1, omega2) > 0.
struct TorusPeriods {
  Vec2i omega1;
  Vec2i omega2;
  double mesh = 1.0;

  TorusPeriods(Vec2i w1, Vec2i w2, double delta = 1.0) : omega1(w1), omega2(w2), mesh(delta) {
    if (cross(omega1, omega2) == 0) throw std::invalid_argument("degenerate torus lattice");
    if (mesh <= 0) throw std::invalid_argument("mesh must be positive");
    if (cross(omega1, omega2) < 0) omega2 = -omega2;
  }

  long long det() const { return cross(omega1, omega2); }  // = |T^delta| after normalization
  long long num_vertices() const { return det(); }
};

// Hermite normal form of the lattice spanned by two integer row vectors:
// basis {(a,0), (b,c)} with a,c > 0 and 0 <= b < a.
struct Hnf {
  long long a = 1, b = 0, c = 1;
};

Hnf hermite_normal_form(Vec2i r1, Vec2i r2);

// Coset representatives of Z^2 modulo the lattice spanned by r1, r2
// (exactly |det| of them, enumerated from the HNF box).
std::vector<Vec2i> lattice_cosets(Vec2i r1, Vec2i r2);

// Reduce v to its canonical representative modulo the lattice spanned by r1, r2.
Vec2i lattice_reduce(const Hnf& h, Vec2i v);

// Fundamental-domain vertices of the torus.
std::vector<Vec2i> enumerate_vertices(const TorusPeriods& periods);

// Shift vector s_(ij): the unique real pair with s.omega1 = i/2, s.omega2 = j/2.
// Returned exactly, as a rational pair over the common denominator 2*det.
MomentumPoint shift_vector(const TorusPeriods& periods, SectorLabel sector);

// Sector momentum grid: |T| points q with q.omega1 in Z + i/2 and
// q.omega2 in Z + j/2, pairwise distinct modulo Z^2.
std::vector<MomentumPoint> momentum_grid(const TorusPeriods& periods, SectorLabel sector);

// Shortest nonzero lattice vector in the sup norm. A torus graph (square or
// triangular adjacency) is simple iff this is >= 3.
long long min_lattice_width(const TorusPeriods& periods);

}  // namespace isingtorus
