#pragma once

#include <cmath>
#include <cstdint>

namespace isingtorus {

// Exact element a + b*sqrt(D) of a real quadratic ring, with 128-bit integer
// coefficients. Used by the oracle to evaluate signed subgraph sums at the
// critical couplings alpha_c = -1 + sqrt(2) and alpha_tri = 2 - sqrt(3)
// exactly, so that identities like Z^(00)(alpha_c) = 0 come out as literal
// zeros instead of rounding residue.
template <int D>
struct QuadInt {
  __int128 a = 0;
  __int128 b = 0;

  static QuadInt zero() { return {0, 0}; }
  static QuadInt one() { return {1, 0}; }

  QuadInt operator+(const QuadInt& o) const { return {a + o.a, b + o.b}; }
  QuadInt operator-(const QuadInt& o) const { return {a - o.a, b - o.b}; }
  QuadInt operator-() const { return {-a, -b}; }
  QuadInt& operator+=(const QuadInt& o) {
    a += o.a;
    b += o.b;
    return *this;
  }
  QuadInt& operator-=(const QuadInt& o) {
    a -= o.a;
    b -= o.b;
    return *this;
  }
  QuadInt operator*(const QuadInt& o) const {
    return {a * o.a + D * (b * o.b), a * o.b + b * o.a};
  }

  bool is_zero() const { return a == 0 && b == 0; }
  bool operator==(const QuadInt&) const = default;

  double to_double() const {
    return static_cast<double>(a) + static_cast<double>(b) * std::sqrt(static_cast<double>(D));
  }
};

using Z_sqrt2 = QuadInt<2>;  // alpha_c = -1 + sqrt(2)
using Z_sqrt3 = QuadInt<3>;  // alpha_tri = 2 - sqrt(3)

inline Z_sqrt2 critical_alpha_sqrt2() { return {-1, 1}; }
inline Z_sqrt3 critical_alpha_sqrt3() { return {2, -1}; }

}  // namespace isingtorus
