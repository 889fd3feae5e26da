#include "isingtorus/continuum.hpp"

#include <cmath>
#include <numbers>

namespace isingtorus {

namespace {

constexpr double kPi = std::numbers::pi;

double torus_area(const PeriodPair& p) { return std::imag(std::conj(p.omega1) * p.omega2); }

JacobiKind sector_kernel(SectorLabel s) {
  if (s == kSector01) return JacobiKind::cs;
  if (s == kSector10) return JacobiKind::ns;
  if (s == kSector11) return JacobiKind::ds;
  throw std::invalid_argument("sector (0,0) has no elliptic kernel");
}

complexd ipow(int k) {
  static const complexd tab[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return tab[((k % 4) + 4) % 4];
}

// the constant <psi psi*>^(00) magnitude: (Im tau)^{1/2}|t2 t3 t4| / (Z |T|^{1/2})
double one_point_constant(const PeriodPair& periods) {
  ModularParameter tau = periods.tau();
  ThetaConstants t = theta_constants(tau);
  double Z = std::abs(t.theta2) + std::abs(t.theta3) + std::abs(t.theta4);
  return std::sqrt(tau.tau.imag()) * std::abs(t.theta2 * t.theta3 * t.theta4) /
         (Z * std::sqrt(torus_area(periods)));
}

}  // namespace

SectorWeights sector_weights(const ModularParameter& tau) {
  ThetaConstants t = theta_constants(tau);
  return {std::abs(t.theta2), std::abs(t.theta4), std::abs(t.theta3)};
}

double energy_sum_limit(const ModularParameter& tau, double area) {
  if (!(area > 0)) throw std::domain_error("area must be positive");
  ThetaConstants t = theta_constants(tau);
  double Z = std::abs(t.theta2) + std::abs(t.theta3) + std::abs(t.theta4);
  return 2.0 * std::sqrt(tau.tau.imag()) * std::abs(t.theta2 * t.theta3 * t.theta4) /
         (Z * std::sqrt(area));
}

double energy_one_point_limit(const ModularParameter& tau, double area) {
  return 0.5 * energy_sum_limit(tau, area);
}

double stress_tensor_H(const PeriodPair& periods) {
  ModularParameter tau = periods.tau();
  ThetaConstants t = theta_constants(tau);
  SectorWeights w = sector_weights(tau);
  complexd iw2 = 1.0 / (periods.omega1 * periods.omega1);
  complexd t2_4 = std::pow(t.theta2, 4), t3_4 = std::pow(t.theta3, 4);
  return w.normalized(kSector01) * std::real(iw2 * (t2_4 - 2.0 * t3_4)) +
         w.normalized(kSector10) * std::real(iw2 * (t2_4 + t3_4)) +
         w.normalized(kSector11) * std::real(iw2 * (t3_4 - 2.0 * t2_4));
}

double energy_difference_prediction(const PeriodPair& periods, double delta) {
  return std::sqrt(2.0) * kPi / 6.0 * stress_tensor_H(periods) * delta * delta;
}

complexd sector_kernel_derivative(SectorLabel s, const PeriodPair& periods) {
  ModularParameter tau = periods.tau();
  ThetaConstants t = theta_constants(tau);
  complexd t2_4 = std::pow(t.theta2, 4), t3_4 = std::pow(t.theta3, 4);
  complexd pre = kPi * kPi / (6.0 * periods.omega1 * periods.omega1);
  if (s == kSector01) return pre * (t2_4 - 2.0 * t3_4);
  if (s == kSector10) return pre * (t2_4 + t3_4);
  if (s == kSector11) return pre * (t3_4 - 2.0 * t2_4);
  throw std::invalid_argument("sector (0,0) has no kernel derivative");
}

// ---- Pfaffian -----------------------------------------------------------------

SkewMatrix::SkewMatrix(int n) : n_(n), upper_(static_cast<size_t>(n) * n, complexd(0)) {
  if (n < 0) throw std::invalid_argument("negative dimension");
}

void SkewMatrix::set_upper(int i, int j, complexd v) {
  if (!(0 <= i && i < j && j < n_)) throw std::invalid_argument("need 0 <= i < j < n");
  upper_[static_cast<size_t>(i) * n_ + j] = v;
}

complexd SkewMatrix::at(int i, int j) const {
  if (i == j) return 0;
  if (i < j) return upper_[static_cast<size_t>(i) * n_ + j];
  return -upper_[static_cast<size_t>(j) * n_ + i];
}

complexd pfaffian(const SkewMatrix& m) {
  const int n = m.size();
  if (n % 2 != 0) throw std::invalid_argument("pfaffian needs even dimension");
  if (n == 0) return 1.0;
  std::vector<complexd> a(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[static_cast<size_t>(i) * n + j] = m.at(i, j);
  auto at = [&](int i, int j) -> complexd& { return a[static_cast<size_t>(i) * n + j]; };

  complexd pf = 1.0;
  for (int k = 0; k < n - 1; k += 2) {
    // pivot: bring the largest |a(k, p)| into position (k, k+1)
    int p = k + 1;
    for (int j = k + 2; j < n; ++j)
      if (std::abs(at(k, j)) > std::abs(at(k, p))) p = j;
    if (std::abs(at(k, p)) == 0.0) return 0.0;
    if (p != k + 1) {
      for (int j = 0; j < n; ++j) std::swap(at(k + 1, j), at(p, j));
      for (int i = 0; i < n; ++i) std::swap(at(i, k + 1), at(i, p));
      pf = -pf;
    }
    const complexd piv = at(k, k + 1);
    pf *= piv;
    // congruence updates zero out row/col k beyond the pivot; Pf is invariant
    for (int i = k + 2; i < n; ++i) {
      const complexd f = at(k, i) / piv;
      if (f == complexd(0)) continue;
      for (int j = 0; j < n; ++j) at(i, j) -= f * at(k + 1, j);
      for (int j = 0; j < n; ++j) at(j, i) -= f * at(j, k + 1);
    }
  }
  return pf;
}

// ---- multipoint --------------------------------------------------------------

namespace {

complexd kernel_value(SectorLabel s, complexd diff, const PeriodPair& periods) {
  return jacobi_cnd(sector_kernel(s), diff, periods);
}

void check_distinct(const std::vector<complexd>& pts, const PeriodPair& periods) {
  const double min_sep = 1e-8 * std::abs(periods.omega1);
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j)
      if (std::abs(pts[i] - pts[j]) < min_sep)
        throw std::invalid_argument("multipoint evaluation needs distinct points");
}

double demand_real(complexd v) {
  if (std::abs(v.imag()) > 1e-10 * (1.0 + std::abs(v)))
    throw std::runtime_error("result has non-negligible imaginary part");
  return v.real();
}

}  // namespace

double multipoint_limit(const std::vector<complexd>& points, const PeriodPair& periods) {
  const int k = static_cast<int>(points.size());
  if (k == 0) return 1.0;
  check_distinct(points, periods);
  if (k % 2 == 0) {
    SectorWeights w = sector_weights(periods.tau());
    double acc = 0;
    for (SectorLabel s : {kSector01, kSector10, kSector11}) {
      SkewMatrix K(k);
      for (int n = 0; n < k; ++n)
        for (int m = n + 1; m < k; ++m)
          K.set_upper(n, m, kernel_value(s, points[n] - points[m], periods));
      double pf = std::abs(pfaffian(K));
      acc += w.normalized(s) * pf * pf;
    }
    return acc;
  }
  // odd k: interleaved (psi, psi*) blocks with the constant off-diagonal
  const complexd cconst = complexd(0, -kPi) * one_point_constant(periods);
  SkewMatrix M(2 * k);
  for (int i = 0; i < 2 * k; ++i)
    for (int j = i + 1; j < 2 * k; ++j) {
      const int n = i / 2, m = j / 2;
      const bool istar = i % 2, jstar = j % 2;
      complexd v;
      if (!istar && !jstar)
        v = weierstrass_zeta(points[n] - points[m], periods);
      else if (istar && jstar)
        v = std::conj(weierstrass_zeta(points[n] - points[m], periods));
      else if (!istar && jstar)
        v = cconst;  // <psi_n psi*_m>, including n == m
      else
        v = -cconst;  // <psi*_n psi_m> = -<psi_m psi*_n>
      M.set_upper(i, j, v);
    }
  return demand_real(ipow(k) * pfaffian(M));
}

// ---- continuum observables ------------------------------------------------------

namespace {

// pair correlator of the symbol list: even index = psi_{point}, odd = psi*_{point}
struct SymbolTable {
  std::vector<complexd> points;  // one per symbol
  std::vector<uint8_t> starred;
  SectorLabel sector;
  const PeriodPair* periods;
  double cconst;  // the (00) <psi psi*> constant, without -pi i

  complexd pair(int i, int j) const {
    const bool si = starred[i], sj = starred[j];
    if (sector == kSector00) {
      if (!si && !sj) return weierstrass_zeta(points[i] - points[j], *periods);
      if (si && sj) return std::conj(weierstrass_zeta(points[i] - points[j], *periods));
      complexd c = complexd(0, -kPi) * cconst;
      return si ? -c : c;  // <psi* psi> = -<psi psi*>
    }
    if (!si && !sj) return kernel_value(sector, points[i] - points[j], *periods);
    if (si && sj) return std::conj(kernel_value(sector, points[i] - points[j], *periods));
    return 0.0;
  }

  complexd pf() const {
    const int n = static_cast<int>(points.size());
    SkewMatrix M(n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) M.set_upper(i, j, pair(i, j));
    return pfaffian(M);
  }
};

SymbolTable energy_symbols(SectorLabel s, const std::vector<complexd>& energies,
                           const PeriodPair& periods, double cconst) {
  SymbolTable t;
  t.sector = s;
  t.periods = &periods;
  t.cconst = cconst;
  for (complexd e : energies) {
    t.points.push_back(e);
    t.starred.push_back(0);
    t.points.push_back(e);
    t.starred.push_back(1);
  }
  return t;
}

}  // namespace

complexd sector_energy_coefficient(SectorLabel s, const std::vector<complexd>& energies,
                                   const PeriodPair& periods) {
  const int k = static_cast<int>(energies.size());
  check_distinct(energies, periods);
  const bool zz = (s == kSector00);
  if ((!zz && k % 2 == 1) || (zz && k % 2 == 0)) return 0.0;
  SymbolTable t = energy_symbols(s, energies, periods, one_point_constant(periods));
  complexd pf = t.pf();
  if (zz) return ipow(k) * pf;
  return sector_weights(periods.tau()).normalized(s) * ipow(k) * pf;
}

complexd f_continuum(SectorLabel s, complexd a, complexd z,
                     const std::vector<complexd>& energies, const PeriodPair& periods,
                     complexd eta_a) {
  const int k = static_cast<int>(energies.size());
  std::vector<complexd> all = energies;
  all.push_back(a);
  all.push_back(z);
  check_distinct(all, periods);
  SymbolTable t = energy_symbols(s, energies, periods, one_point_constant(periods));
  t.points.push_back(z);
  t.starred.push_back(0);  // psi_z
  const bool zz = (s == kSector00);
  // <... psi_z psi_a> when ((ij)!=(00), k even) or ((ij)=(00), k odd);
  // <... psi_z psi*_a> in the complementary cases
  const bool plain_a = (!zz && k % 2 == 0) || (zz && k % 2 == 1);
  t.points.push_back(a);
  t.starred.push_back(plain_a ? 0 : 1);
  complexd pf = t.pf();
  complexd pre = plain_a ? std::conj(eta_a) : eta_a;
  if (!zz) pre *= sector_weights(periods.tau()).normalized(s);
  return pre * ipow(k) * pf;
}

namespace {

// smallest separation of `p` from the other marked points and all their
// lattice translates (the poles of f)
double nearest_singularity(complexd p, const std::vector<complexd>& others,
                           const PeriodPair& periods) {
  double best = 1e300;
  for (complexd q : others)
    for (int m = -2; m <= 2; ++m)
      for (int n = -2; n <= 2; ++n) {
        complexd t = q + double(m) * periods.omega1 + double(n) * periods.omega2;
        if (std::abs(p - t) > 1e-12) best = std::min(best, std::abs(p - t));
      }
  return best;
}

struct Contour {
  complexd residue;
  complexd constant;
};

template <typename F>
Contour contour_extract(F&& f, complexd center, double radius) {
  const int n = 64;
  complexd res = 0, cst = 0;
  for (int j = 0; j < n; ++j) {
    const double th = 2 * kPi * j / n;
    const complexd e = std::polar(1.0, th);
    const complexd val = f(center + radius * e);
    res += val * e;
    cst += val;
  }
  res *= radius / double(n);
  cst = cst / double(n);  // the pole term averages out exactly
  return {res, cst};
}

}  // namespace

ResidueReport residue_validator(SectorLabel s, complexd a, const std::vector<complexd>& energies,
                                const PeriodPair& periods, complexd eta_a) {
  ResidueReport rep;
  auto f = [&](complexd z) { return f_continuum(s, a, z, energies, periods, eta_a); };
  std::vector<complexd> all = energies;
  all.push_back(a);

  complexd residue_total = 0;
  for (size_t m = 0; m < energies.size(); ++m) {
    std::vector<complexd> others;
    for (size_t l = 0; l < all.size(); ++l)
      if (l != m) others.push_back(all[l]);
    const double r = nearest_singularity(energies[m], others, periods) / 4.0;
    Contour c = contour_extract(f, energies[m], r);
    std::vector<complexd> rest;
    for (size_t l = 0; l < energies.size(); ++l)
      if (l != m) rest.push_back(energies[l]);
    complexd expected =
        complexd(0, 1) * std::conj(f_continuum(s, a, energies[m], rest, periods, eta_a));
    rep.max_em_error = std::max(rep.max_em_error, std::abs(c.residue - expected));
    residue_total += c.residue;
  }
  {
    const double r = nearest_singularity(a, energies, periods) / 4.0;
    Contour c = contour_extract(f, a, r);
    complexd exp_res = std::conj(eta_a) * sector_energy_coefficient(s, energies, periods);
    std::vector<complexd> with_a = energies;
    with_a.push_back(a);
    complexd exp_cst =
        complexd(0, -1) * eta_a * sector_energy_coefficient(s, with_a, periods);
    rep.residue_a_error = std::abs(c.residue - exp_res);
    rep.constant_a_error = std::abs(c.constant - exp_cst);
    residue_total += c.residue;
  }
  // the doubled-torus fundamental domain holds the 4 shifted copies of every
  // pole, each scaled by (-1)^{ip+jq}
  int factor = 0;
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q) factor += ((s.i * p + s.j * q) % 2) ? -1 : 1;
  rep.residue_sum = std::abs(residue_total * double(factor));
  return rep;
}

double periodicity_violation(SectorLabel s, complexd a, const std::vector<complexd>& energies,
                             const PeriodPair& periods, complexd eta_a) {
  double worst = 0;
  // a fixed probe set away from the poles
  const complexd probes[4] = {{0.311, 0.141}, {0.727, 0.393}, {0.159, 0.621}, {0.481, 0.857}};
  for (complexd t : probes) {
    complexd z = t.real() * periods.omega1 + t.imag() * periods.omega2;
    complexd base = f_continuum(s, a, z, energies, periods, eta_a);
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q) {
        if (p == 0 && q == 0) continue;
        complexd shifted = f_continuum(
            s, a, z + double(p) * periods.omega1 + double(q) * periods.omega2, energies, periods,
            eta_a);
        double sgn = ((s.i * p + s.j * q) % 2) ? -1.0 : 1.0;
        worst = std::max(worst, std::abs(shifted - sgn * base));
      }
  }
  return worst;
}

}  // namespace isingtorus
