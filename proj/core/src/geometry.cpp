#include "isingtorus/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

namespace isingtorus {

namespace {

long long floor_div(long long a, long long b) {
  long long q = a / b, r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

}  // namespace

Hnf hermite_normal_form(Vec2i r1, Vec2i r2) {
  // Euclid on the second column to reach a lower-triangular row basis.
  while (r1.y != 0) {
    if (r2.y == 0) {
      std::swap(r1, r2);
      continue;
    }
    if (std::llabs(r1.y) > std::llabs(r2.y)) std::swap(r1, r2);
    long long k = r2.y / r1.y;
    r2 = r2 - Vec2i{k * r1.x, k * r1.y};
  }
  // now r1 = (a', 0), r2 = (b', c')
  long long a = r1.x, b = r2.x, c = r2.y;
  if (a == 0 || c == 0) throw std::invalid_argument("degenerate lattice in HNF");
  if (a < 0) a = -a;
  if (c < 0) {
    b = -b;
    c = -c;
  }
  b -= floor_div(b, a) * a;
  return {a, b, c};
}

Vec2i lattice_reduce(const Hnf& h, Vec2i v) {
  long long n = floor_div(v.y, h.c);
  v.x -= n * h.b;
  v.y -= n * h.c;
  v.x -= floor_div(v.x, h.a) * h.a;
  return v;
}

std::vector<Vec2i> lattice_cosets(Vec2i r1, Vec2i r2) {
  Hnf h = hermite_normal_form(r1, r2);
  std::vector<Vec2i> reps;
  reps.reserve(static_cast<size_t>(h.a * h.c));
  for (long long y = 0; y < h.c; ++y)
    for (long long x = 0; x < h.a; ++x) reps.push_back({x, y});
  return reps;
}

std::vector<Vec2i> enumerate_vertices(const TorusPeriods& periods) {
  return lattice_cosets(periods.omega1, periods.omega2);
}

MomentumPoint shift_vector(const TorusPeriods& periods, SectorLabel sector) {
  const Vec2i w1 = periods.omega1, w2 = periods.omega2;
  const long long d = periods.det();
  // solve [[w1x,w1y],[w2x,w2y]] s = (i/2, j/2)
  return MomentumPoint{sector.i * w2.y - sector.j * w1.y, -sector.i * w2.x + sector.j * w1.x,
                       2 * d};
}

std::vector<MomentumPoint> momentum_grid(const TorusPeriods& periods, SectorLabel sector) {
  const Vec2i w1 = periods.omega1, w2 = periods.omega2;
  const long long d = periods.det();
  // q = B^{-1}(k + (i/2, j/2)) with B rows (w1, w2); k runs over Z^2 modulo
  // the lattice spanned by the columns of B.
  std::vector<Vec2i> ks = lattice_cosets({w1.x, w2.x}, {w1.y, w2.y});
  std::vector<MomentumPoint> grid;
  grid.reserve(ks.size());
  for (const Vec2i& k : ks) {
    const long long rx = 2 * k.x + sector.i;  // doubled right-hand side
    const long long ry = 2 * k.y + sector.j;
    grid.push_back({rx * w2.y - ry * w1.y, -rx * w2.x + ry * w1.x, 2 * d});
  }
  return grid;
}

long long min_lattice_width(const TorusPeriods& periods) {
  // Lagrange-reduce, then scan small integer combinations.
  Vec2i b1 = periods.omega1, b2 = periods.omega2;
  auto norm2 = [](const Vec2i& v) { return dot(v, v); };
  for (int iter = 0; iter < 64; ++iter) {
    if (norm2(b1) > norm2(b2)) std::swap(b1, b2);
    long long n1 = norm2(b1);
    if (n1 == 0) throw std::invalid_argument("degenerate lattice");
    long long mu = std::llround(static_cast<double>(dot(b1, b2)) / static_cast<double>(n1));
    if (mu == 0) break;
    b2 = b2 - Vec2i{mu * b1.x, mu * b1.y};
  }
  long long best = std::max(std::llabs(b1.x), std::llabs(b1.y));
  for (long long a = -3; a <= 3; ++a)
    for (long long b = -3; b <= 3; ++b) {
      if (a == 0 && b == 0) continue;
      Vec2i v{a * b1.x + b * b2.x, a * b1.y + b * b2.y};
      best = std::min(best, std::max(std::llabs(v.x), std::llabs(v.y)));
    }
  return best;
}

}  // namespace isingtorus
