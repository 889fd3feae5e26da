#pragma once

#include <complex>
#include <stdexcept>

namespace isingtorus {

using complexd = std::complex<double>;

struct ModularParameter {
  complexd tau;
  explicit ModularParameter(complexd t) : tau(t) {
    if (!(t.imag() > 0)) throw std::domain_error("modular parameter needs Im(tau) > 0");
    if (t.imag() < 0.05)
      throw std::domain_error("Im(tau) < 0.05: apply a modular transform before evaluating");
  }
};

struct ThetaConstants {
  complexd theta2, theta3, theta4;
};

struct PeriodPair {
  complexd omega1, omega2;
  PeriodPair(complexd w1, complexd w2) : omega1(w1), omega2(w2) {
    if (!(std::imag(w2 / w1) > 0)) throw std::domain_error("periods need Im(omega2/omega1) > 0");
  }
  ModularParameter tau() const { return ModularParameter(omega2 / omega1); }
};

struct PoleError : std::runtime_error {
  complexd pole;
  PoleError(const char* what, complexd p) : std::runtime_error(what), pole(p) {}
};

// Jacobi theta functions of nome q = exp(i pi tau), series summed until the
// next term falls below 1e-16 relative (hard cap 400 terms).
complexd theta1(complexd v, complexd q);
complexd theta2(complexd v, complexd q);
complexd theta3(complexd v, complexd q);
complexd theta4(complexd v, complexd q);
complexd theta1_prime0(complexd q);       // theta1'(0, q)
complexd theta1_triple_prime0(complexd q);  // theta1'''(0, q)

ThetaConstants theta_constants(const ModularParameter& tau);

// eta(tau) = (theta2 theta3 theta4 / 2)^(1/3), principal cube root
// (real positive on the imaginary axis).
complexd dedekind_eta(const ModularParameter& tau);

// k = (theta2/theta3)^2 and K = (pi/2) theta3^2
struct ModulusK {
  complexd k, K;
};
ModulusK modulus_and_K(const ModularParameter& tau);

enum class JacobiKind { cs, ns, ds };

// Period-scaled Jacobi kernels: cs_{w1,w2}(z) = (2K/w1) cs((2K/w1) z, k), etc.
// Implemented as theta quotients at argument pi z / w1. Poles lie on the
// period lattice of (w1, w2); evaluation closer than 1e-10*|w1| to a pole
// throws PoleError with the pole location.
complexd jacobi_cnd(JacobiKind kind, complexd z, const PeriodPair& periods);

// Weierstrass zeta with full periods (w1, w2): the odd function with a simple
// pole of residue 1 at 0 whose derivative is doubly periodic. Computed as
// e2 z + (pi/w1) theta1'(pi z/w1)/theta1(pi z/w1) with
// e2 = -(pi/w1)^2 theta1'''(0) / (3 theta1'(0)).
complexd weierstrass_zeta(complexd z, const PeriodPair& periods);

// Laurent coefficient of u in cs/ns/ds(u, k):
//   cs: k^2/6 - 1/3,  ns: (1 + k^2)/6,  ds: 1/6 - k^2/3.
complexd jacobi_second_laurent(JacobiKind kind, complexd k);

}  // namespace isingtorus
