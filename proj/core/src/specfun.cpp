#include "isingtorus/specfun.hpp"

#include <cmath>
#include <numbers>

namespace isingtorus {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxTerms = 400;
constexpr double kRelTol = 1e-16;

complexd nome(const ModularParameter& tau) { return std::exp(complexd(0, kPi) * tau.tau); }

// sum_{n>=0} coeff(n) * q^{e(n)} style series with relative-tolerance stop
template <typename Term>
complexd sum_series(Term&& term, complexd first) {
  complexd acc = first;
  for (int n = 1; n < kMaxTerms; ++n) {
    complexd t = term(n);
    acc += t;
    if (std::abs(t) < kRelTol * (1.0 + std::abs(acc))) return acc;
  }
  return acc;
}

complexd qpow(complexd q, double e) { return std::exp(e * std::log(q)); }

}  // namespace

complexd theta1(complexd v, complexd q) {
  auto term = [&](int n) {
    double sgn = (n % 2 == 0) ? 1.0 : -1.0;
    double e = (n + 0.5) * (n + 0.5);
    return 2.0 * sgn * qpow(q, e) * std::sin(double(2 * n + 1) * v);
  };
  return sum_series(term, 2.0 * qpow(q, 0.25) * std::sin(v));
}

complexd theta2(complexd v, complexd q) {
  auto term = [&](int n) {
    double e = (n + 0.5) * (n + 0.5);
    return 2.0 * qpow(q, e) * std::cos(double(2 * n + 1) * v);
  };
  return sum_series(term, 2.0 * qpow(q, 0.25) * std::cos(v));
}

complexd theta3(complexd v, complexd q) {
  auto term = [&](int n) { return 2.0 * qpow(q, double(n) * n) * std::cos(2.0 * double(n) * v); };
  return sum_series(term, complexd(1.0));
}

complexd theta4(complexd v, complexd q) {
  auto term = [&](int n) {
    double sgn = (n % 2 == 0) ? 1.0 : -1.0;
    return 2.0 * sgn * qpow(q, double(n) * n) * std::cos(2.0 * double(n) * v);
  };
  return sum_series(term, complexd(1.0));
}

complexd theta1_prime0(complexd q) {
  auto term = [&](int n) {
    double sgn = (n % 2 == 0) ? 1.0 : -1.0;
    return 2.0 * sgn * double(2 * n + 1) * qpow(q, (n + 0.5) * (n + 0.5));
  };
  return sum_series(term, 2.0 * qpow(q, 0.25));
}

complexd theta1_triple_prime0(complexd q) {
  auto term = [&](int n) {
    double sgn = (n % 2 == 0) ? -1.0 : 1.0;
    double m = 2 * n + 1;
    return 2.0 * sgn * m * m * m * qpow(q, (n + 0.5) * (n + 0.5));
  };
  return sum_series(term, -2.0 * qpow(q, 0.25));
}

ThetaConstants theta_constants(const ModularParameter& tau) {
  complexd q = nome(tau);
  return {theta2(0.0, q), theta3(0.0, q), theta4(0.0, q)};
}

complexd dedekind_eta(const ModularParameter& tau) {
  ThetaConstants t = theta_constants(tau);
  return std::pow(0.5 * t.theta2 * t.theta3 * t.theta4, 1.0 / 3.0);
}

ModulusK modulus_and_K(const ModularParameter& tau) {
  ThetaConstants t = theta_constants(tau);
  complexd r = t.theta2 / t.theta3;
  return {r * r, kPi / 2.0 * t.theta3 * t.theta3};
}

namespace {

// distance from z to the nearest point of the lattice spanned by (w1, w2),
// together with that point
complexd nearest_lattice_point(complexd z, complexd w1, complexd w2) {
  // coordinates of z in the (w1, w2) basis: z = c1 w1 + c2 w2
  double det = std::imag(std::conj(w1) * w2);
  double c1 = std::imag(std::conj(z) * w2) / det;
  double c2 = -std::imag(std::conj(z) * w1) / det;
  complexd best = 0;
  double bd = std::abs(z);
  for (long long m = llround(c1) - 1; m <= llround(c1) + 1; ++m)
    for (long long n = llround(c2) - 1; n <= llround(c2) + 1; ++n) {
      complexd p = double(m) * w1 + double(n) * w2;
      if (std::abs(z - p) < bd) {
        bd = std::abs(z - p);
        best = p;
      }
    }
  return best;
}

}  // namespace

complexd jacobi_cnd(JacobiKind kind, complexd z, const PeriodPair& periods) {
  const complexd w1 = periods.omega1;
  complexd pole = nearest_lattice_point(z, periods.omega1, periods.omega2);
  if (std::abs(z - pole) < 1e-10 * std::abs(w1))
    throw PoleError("jacobi kernel evaluated at a pole", pole);

  const ModularParameter tau = periods.tau();
  const complexd q = nome(tau);
  ThetaConstants t = theta_constants(tau);
  const complexd v = kPi * z / w1;
  const complexd twoK_w1 = kPi * t.theta3 * t.theta3 / w1;  // 2K/w1
  switch (kind) {
    case JacobiKind::cs:
      return twoK_w1 * (t.theta4 / t.theta3) * theta2(v, q) / theta1(v, q);
    case JacobiKind::ns:
      return twoK_w1 * (t.theta2 / t.theta3) * theta4(v, q) / theta1(v, q);
    case JacobiKind::ds:
      return twoK_w1 * (t.theta2 * t.theta4 / (t.theta3 * t.theta3)) * theta3(v, q) /
             theta1(v, q);
  }
  throw std::logic_error("unreachable");
}

complexd weierstrass_zeta(complexd z, const PeriodPair& periods) {
  const complexd w1 = periods.omega1;
  complexd pole = nearest_lattice_point(z, periods.omega1, periods.omega2);
  if (std::abs(z - pole) < 1e-10 * std::abs(w1))
    throw PoleError("weierstrass zeta evaluated at a lattice point", pole);

  const complexd q = nome(periods.tau());
  const complexd v = kPi * z / w1;
  const complexd pre = kPi / w1;
  const complexd e2 = -pre * pre * theta1_triple_prime0(q) / (3.0 * theta1_prime0(q));
  // theta1'(v)/theta1(v) via term-wise derivative
  complexd t1 = theta1(v, q);
  auto term = [&](int n) {
    double sgn = (n % 2 == 0) ? 1.0 : -1.0;
    double m = 2 * n + 1;
    return 2.0 * sgn * m * std::exp((n + 0.5) * (n + 0.5) * std::log(q)) * std::cos(m * v);
  };
  complexd t1p = term(0);
  for (int n = 1; n < kMaxTerms; ++n) {
    complexd t = term(n);
    t1p += t;
    if (std::abs(t) < kRelTol * (1.0 + std::abs(t1p))) break;
  }
  return e2 * z + pre * t1p / t1;
}

complexd jacobi_second_laurent(JacobiKind kind, complexd k) {
  complexd k2 = k * k;
  switch (kind) {
    case JacobiKind::cs:
      return k2 / 6.0 - 1.0 / 3.0;
    case JacobiKind::ns:
      return (1.0 + k2) / 6.0;
    case JacobiKind::ds:
      return 1.0 / 6.0 - k2 / 3.0;
  }
  throw std::logic_error("unreachable");
}

}  // namespace isingtorus
