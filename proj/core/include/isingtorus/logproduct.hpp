#pragma once

#include <cmath>
#include <stdexcept>

namespace isingtorus {

// A determinant held as (log-magnitude, sign). Products of ~10^6 spectral
// factors overflow doubles, so everything downstream stays in log space and
// exponentiates once at the end, if at all.
struct LogProduct {
  double log_mag = 0.0;
  int sgn = 1;  // +1, -1, or 0 (an exactly-vanishing factor was seen)

  static LogProduct one() { return {0.0, 1}; }
  static LogProduct zero() { return {0.0, 0}; }

  void mul_positive(double f) {
    if (sgn == 0) return;
    if (!(f > 0)) throw std::domain_error("LogProduct::mul_positive needs f > 0");
    log_mag += std::log(f);
  }
  void mul_zero() { sgn = 0; }
  void flip_sign() { sgn = -sgn; }

  LogProduct& operator*=(const LogProduct& o) {
    sgn *= o.sgn;
    log_mag = (sgn == 0) ? 0.0 : log_mag + o.log_mag;
    return *this;
  }

  bool is_zero() const { return sgn == 0; }
  // May overflow for large tori; callers that can overflow must stay in logs.
  double value() const { return sgn == 0 ? 0.0 : sgn * std::exp(log_mag); }
};

inline LogProduct operator*(LogProduct a, const LogProduct& b) { return a *= b; }

// log(exp(a) + exp(b)) without overflow
inline double log_add_exp(double a, double b) {
  double m = a > b ? a : b;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace isingtorus
