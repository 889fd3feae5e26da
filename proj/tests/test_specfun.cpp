#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "isingtorus/specfun.hpp"
#include "oracles.hpp"

using namespace isingtorus;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("theta constants: limits, symmetry, Jacobi identity") {
  SUBCASE("q -> 0 limit") {
    ThetaConstants t = theta_constants(ModularParameter({0, 40}));
    CHECK(std::abs(t.theta3 - 1.0) < 1e-14);
    CHECK(std::abs(t.theta4 - 1.0) < 1e-14);
    CHECK(std::abs(t.theta2) < 1e-13);
  }
  SUBCASE("square torus self-duality") {
    ThetaConstants t = theta_constants(ModularParameter({0, 1}));
    CHECK(std::abs(t.theta2 - t.theta4) < 1e-14);
  }
  SUBCASE("independent 40-term summation at tau = i") {
    // direct sum in a different order: pair the +n and -n halves explicitly
    double q = std::exp(-kPi);
    double acc = 1.0;
    for (int n = 40; n >= 1; --n) acc += 2.0 * std::pow(q, double(n) * n);
    ThetaConstants t = theta_constants(ModularParameter({0, 1}));
    CHECK(std::abs(t.theta3 - acc) < 1e-15);
  }
  SUBCASE("Jacobi identity") {
    for (complexd tau : {complexd(0, 1), complexd(0, 2), complexd(0.5, 1), complexd(0.3, 0.8)}) {
      ThetaConstants t = theta_constants(ModularParameter(tau));
      complexd lhs = std::pow(t.theta3, 4);
      complexd rhs = std::pow(t.theta2, 4) + std::pow(t.theta4, 4);
      CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(lhs));
    }
  }
  SUBCASE("domain guard") {
    CHECK_THROWS_AS(ModularParameter({0, -1}), std::domain_error);
    CHECK_THROWS_AS(ModularParameter({0, 0.01}), std::domain_error);
  }
}

TEST_CASE("theta reduction identities") {
  for (complexd tau : {complexd(0, 1), complexd(0, 2), complexd(0.5, 1)}) {
    ThetaConstants t = theta_constants(ModularParameter(tau));
    ThetaConstants td = theta_constants(ModularParameter(2.0 * tau));
    ThetaConstants th = theta_constants(ModularParameter(0.5 * tau));
    complexd lhs1 = td.theta2 * td.theta3 * td.theta4;
    complexd rhs1 = 0.5 * t.theta2 * t.theta2 * std::sqrt(t.theta3) * std::sqrt(t.theta4);
    CHECK(std::abs(lhs1 - rhs1) <= 1e-12 * std::abs(lhs1));
    complexd lhs2 = th.theta2 * th.theta3 * th.theta4;
    complexd rhs2 = std::sqrt(2.0) * std::sqrt(t.theta2) * std::sqrt(t.theta3) * t.theta4 *
                    t.theta4;
    CHECK(std::abs(lhs2 - rhs2) <= 1e-12 * std::abs(lhs2));
  }
}

TEST_CASE("Dedekind eta") {
  SUBCASE("cube root of the theta product") {
    for (complexd tau : {complexd(0, 1), complexd(0, 2), complexd(0.5, 1)}) {
      ModularParameter mp(tau);
      ThetaConstants t = theta_constants(mp);
      complexd e = dedekind_eta(mp);
      CHECK(std::abs(e * e * e - 0.5 * t.theta2 * t.theta3 * t.theta4) <= 1e-13);
    }
  }
  SUBCASE("matches the q-product on the imaginary axis") {
    for (complexd tau : {complexd(0, 1), complexd(0, 2)}) {
      complexd mine = dedekind_eta(ModularParameter(tau));
      complexd ref = testor::eta_q_product(tau);
      CHECK(std::abs(mine - ref) <= 1e-12 * std::abs(ref));
    }
    complexd r = dedekind_eta(ModularParameter({0, 2})) / dedekind_eta(ModularParameter({0, 1}));
    complexd rr = testor::eta_q_product({0, 2}) / testor::eta_q_product({0, 1});
    CHECK(std::abs(r - rr) < 1e-12);
  }
}

TEST_CASE("elliptic modulus and complete integral") {
  SUBCASE("self-dual point") {
    ModulusK mk = modulus_and_K(ModularParameter({0, 1}));
    CHECK(std::abs(mk.k - 1.0 / std::sqrt(2.0)) < 1e-12);
    // k^2 + k'^2 = 1 with k = k' forced by theta2 = theta4
    ThetaConstants t = theta_constants(ModularParameter({0, 1}));
    complexd kp = std::pow(t.theta4 / t.theta3, 2);
    CHECK(std::abs(mk.k * mk.k + kp * kp - 1.0) < 1e-12);
  }
  SUBCASE("degenerate limit") {
    ModulusK mk = modulus_and_K(ModularParameter({0, 30}));
    CHECK(std::abs(mk.k) < 1e-12);
    CHECK(std::abs(mk.K - kPi / 2) < 1e-12);
  }
  SUBCASE("modular relation between K(tau) and K(-1/tau)") {
    // theta3^2(-1/tau) = -i tau theta3^2(tau), so K(-1/tau) = -i tau K(tau)
    complexd tau(0.2, 1.3);
    ModulusK a = modulus_and_K(ModularParameter(tau));
    ModulusK b = modulus_and_K(ModularParameter(-1.0 / tau));
    CHECK(std::abs(b.K - complexd(0, -1) * tau * a.K) <= 1e-12 * std::abs(b.K));
  }
}

TEST_CASE("scaled Jacobi kernels") {
  PeriodPair per(complexd(1.0, 0.0), complexd(0.3, 1.1));
  ModulusK mk = modulus_and_K(per.tau());

  SUBCASE("residue one at the origin") {
    for (JacobiKind kind : {JacobiKind::cs, JacobiKind::ns, JacobiKind::ds}) {
      for (complexd dir : {complexd(1, 0), complexd(0, 1), complexd(1, 1), complexd(-1, 0.5)}) {
        complexd z = 1e-6 * dir / std::abs(dir);
        CHECK(std::abs(z * jacobi_cnd(kind, z, per) - 1.0) < 1e-10);
      }
    }
  }
  SUBCASE("second Laurent coefficients") {
    // extract by the Cauchy formula on a small circle
    for (JacobiKind kind : {JacobiKind::cs, JacobiKind::ns, JacobiKind::ds}) {
      complexd c1 = 0;
      const int n = 64;
      const double r = 0.2;
      for (int j = 0; j < n; ++j) {
        complexd z = std::polar(r, 2 * kPi * j / n);
        c1 += (jacobi_cnd(kind, z, per) - 1.0 / z) / z;
      }
      c1 /= double(n);
      complexd scale = 2.0 * mk.K / per.omega1;
      CHECK(std::abs(c1 - scale * scale * jacobi_second_laurent(kind, mk.k)) < 1e-12);
    }
  }
  SUBCASE("sector (anti)periodicity table") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    auto sign_of = [](JacobiKind k) {
      // cs ~ sector (0,1), ns ~ (1,0), ds ~ (1,1)
      if (k == JacobiKind::cs) return std::pair<int, int>{1, -1};
      if (k == JacobiKind::ns) return std::pair<int, int>{-1, 1};
      return std::pair<int, int>{-1, -1};
    };
    for (JacobiKind kind : {JacobiKind::cs, JacobiKind::ns, JacobiKind::ds}) {
      auto [s1, s2] = sign_of(kind);
      for (int t = 0; t < 20; ++t) {
        complexd z = u(rng) * per.omega1 + u(rng) * per.omega2;
        complexd f = jacobi_cnd(kind, z, per);
        CHECK(std::abs(jacobi_cnd(kind, z + per.omega1, per) - double(s1) * f) <=
              1e-10 * (1 + std::abs(f)));
        CHECK(std::abs(jacobi_cnd(kind, z + per.omega2, per) - double(s2) * f) <=
              1e-10 * (1 + std::abs(f)));
      }
    }
  }
  SUBCASE("four poles per doubled fundamental domain, by the argument principle") {
    // winding of cs around the candidate points of the doubled domain:
    // poles wind by -1, zeros by +1, regular points by 0
    int poles = 0;
    auto winding = [&](complexd c) {
      const int n = 256;
      const double r = 0.17;
      double acc = 0;
      complexd prev = jacobi_cnd(JacobiKind::cs, c + r, per);
      for (int j = 1; j <= n; ++j) {
        complexd z = c + std::polar(r, 2 * kPi * j / n);
        complexd cur = jacobi_cnd(JacobiKind::cs, z, per);
        acc += std::arg(cur / prev);
        prev = cur;
      }
      return std::lround(acc / (2 * kPi));
    };
    for (complexd c : {complexd(0, 0), per.omega1, per.omega2, per.omega1 + per.omega2}) {
      CHECK(winding(c) == -1);
      ++poles;
    }
    CHECK(poles == 4);
    // and zeros at the half-shifted points, so no further poles hide there
    CHECK(winding(0.5 * per.omega1) >= 0);
    CHECK(winding(0.5 * per.omega2) >= 0);
    CHECK(winding(0.5 * (per.omega1 + per.omega2)) >= 0);
  }
  SUBCASE("pole proximity raises with the located pole") {
    try {
      jacobi_cnd(JacobiKind::cs, per.omega1 + complexd(1e-12, 0), per);
      FAIL("expected PoleError");
    } catch (const PoleError& e) {
      CHECK(std::abs(e.pole - per.omega1) < 1e-9);
    }
  }
}

TEST_CASE("Weierstrass zeta") {
  PeriodPair per(complexd(1.0, 0.0), complexd(0.2, 1.3));
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.08, 0.92);
  SUBCASE("odd function") {
    for (int t = 0; t < 50; ++t) {
      complexd z = u(rng) * per.omega1 + u(rng) * per.omega2 - 0.5 * (per.omega1 + per.omega2);
      if (std::abs(z) < 0.05) continue;
      CHECK(std::abs(weierstrass_zeta(-z, per) + weierstrass_zeta(z, per)) <=
            1e-11 * (1 + std::abs(weierstrass_zeta(z, per))));
    }
  }
  SUBCASE("residue one along four rays") {
    for (complexd dir : {complexd(1, 0), complexd(0, 1), complexd(1, 1), complexd(-1, 1)}) {
      complexd z = 1e-7 * dir / std::abs(dir);
      CHECK(std::abs(z * weierstrass_zeta(z, per) - 1.0) < 1e-9);
    }
  }
  SUBCASE("quasi-periods do not depend on the base point") {
    complexd z1(0.31, 0.17), z2(0.12, 0.83);
    for (complexd w : {per.omega1, per.omega2}) {
      complexd c1 = weierstrass_zeta(z1 + w, per) - weierstrass_zeta(z1, per);
      complexd c2 = weierstrass_zeta(z2 + w, per) - weierstrass_zeta(z2, per);
      CHECK(std::abs(c1 - c2) < 1e-10);
    }
  }
  SUBCASE("zeta' = -P against the lattice-summed P") {
    // compare d/dz [zeta - 1/z] with -(P - 1/z^2): the pole terms cancel
    // exactly, so moderate radii suffice for 1e-8
    std::mt19937_64 rng2(29);
    std::uniform_real_distribution<double> v(-0.22, 0.22);
    int done = 0;
    while (done < 12) {
      complexd z(v(rng2), v(rng2));
      if (std::abs(z) < 0.08) continue;
      ++done;
      const complexd h(1e-5, 0);
      auto reg = [&](complexd w) { return weierstrass_zeta(w, per) - 1.0 / w; };
      complexd d1 = (reg(z + h) - reg(z - h)) / (2.0 * h);
      complexd d2 = (reg(z + h / 2.0) - reg(z - h / 2.0)) / h;
      complexd deriv = (4.0 * d2 - d1) / 3.0;
      complexd wp = testor::wp_minus_pole_lattice_sum(z, per.omega1, per.omega2, 250);
      CHECK(std::abs(deriv + wp) < 1e-8);
    }
  }
  SUBCASE("lattice point proximity raises") {
    CHECK_THROWS_AS(weierstrass_zeta(per.omega2 * 1.0 + complexd(1e-12, 0), per), PoleError);
  }
}
