#include "isingtorus/spectral.hpp"

#include <cmath>
#include <numbers>

namespace isingtorus {

namespace {

constexpr double kPi = std::numbers::pi;

inline double sin2pi(double q) {
  double s = std::sin(kPi * q);
  return s * s;
}

// squared-sine coordinates of a momentum point, exact zero at integral q
inline void sector_sines(const MomentumPoint& q, double& s1, double& s2, double& s12) {
  s1 = sin2pi(q.qx());
  s2 = sin2pi(q.qy());
  s12 = sin2pi(q.qy() - q.qx());
}

}  // namespace

CouplingParameter CouplingParameter::critical_square() {
  return CouplingParameter(std::sqrt(2.0) - 1.0, Critical::square);
}

CouplingParameter CouplingParameter::critical_triangular() {
  return CouplingParameter(2.0 - std::sqrt(3.0), Critical::triangular);
}

double symbol_v(const CouplingParameter& alpha, const MomentumPoint& q) {
  const double a = alpha.alpha();
  const double at0 = a * a + 2 * a - 1;  // vanishes exactly at alpha_c
  if (alpha.is_critical_square() && q.is_integral()) return 0.0;
  return at0 * at0 + 4 * a * (1 - a * a) * (sin2pi(q.qx()) + sin2pi(q.qy()));
}

double tri_symbol_v(const CouplingParameter& alpha, const MomentumPoint& q) {
  const double a = alpha.alpha();
  const double at0 = (1 + a) * (a * a - 4 * a + 1);  // vanishes exactly at alpha_tri
  if (alpha.is_critical_triangular() && q.is_integral()) return 0.0;
  double s1, s2, s12;
  sector_sines(q, s1, s2, s12);
  const double c = 1 - a * a;
  return at0 * at0 + 4 * a * c * c * (s1 + s2 + s12);
}

std::complex<double> KWBlock::det() const {
  // 4x4 determinant by cofactor expansion along the first row
  auto m3 = [&](int r0, int r1, int r2, int c0, int c1, int c2) {
    const auto& e = entries;
    return e[r0][c0] * (e[r1][c1] * e[r2][c2] - e[r1][c2] * e[r2][c1]) -
           e[r0][c1] * (e[r1][c0] * e[r2][c2] - e[r1][c2] * e[r2][c0]) +
           e[r0][c2] * (e[r1][c0] * e[r2][c1] - e[r1][c1] * e[r2][c0]);
  };
  return entries[0][0] * m3(1, 2, 3, 1, 2, 3) - entries[0][1] * m3(1, 2, 3, 0, 2, 3) +
         entries[0][2] * m3(1, 2, 3, 0, 1, 3) - entries[0][3] * m3(1, 2, 3, 0, 1, 2);
}

KWBlock kw_block(const CouplingParameter& alpha, const MomentumPoint& q) {
  using cd = std::complex<double>;
  const double a = alpha.alpha();
  const cd z = std::polar(1.0, 2 * kPi * q.qx());
  const cd w = std::polar(1.0, 2 * kPi * q.qy());
  const cd phase[4] = {z, w, 1.0 / z, 1.0 / w};  // step phases for E, N, W, S
  KWBlock blk;
  for (int k = 0; k < 4; ++k) {
    for (int l = 0; l < 4; ++l) {
      const int d = (l - k + 4) % 4;
      cd t = 0.0;
      if (d != 2) {  // no U-turns
        const double turn = (d == 0) ? 0.0 : (d == 1 ? kPi / 2 : -kPi / 2);
        t = phase[l] * std::polar(a, turn / 2);
      }
      blk.entries[k][l] = ((k == l) ? cd(1.0) : cd(0.0)) - t;
    }
  }
  return blk;
}

namespace {

template <typename Symbol>
LogProduct grid_product(const TorusPeriods& periods, SectorLabel sector, Symbol&& factor) {
  LogProduct p = LogProduct::one();
  for (const MomentumPoint& q : momentum_grid(periods, sector)) {
    const double f = factor(q);
    if (f == 0.0) {
      p.mul_zero();
      return p;
    }
    p.mul_positive(f);
  }
  return p;
}

LogProduct laplacian_product(const TorusPeriods& periods, SectorLabel sector, bool drop_zero_mode,
                             bool triangular) {
  if (drop_zero_mode && !(sector == kSector00))
    throw std::invalid_argument("drop_zero_mode valid only for sector (0,0)");
  LogProduct p = LogProduct::one();
  for (const MomentumPoint& q : momentum_grid(periods, sector)) {
    if (q.is_integral()) {
      if (drop_zero_mode) continue;
      p.mul_zero();
      return p;
    }
    double s1, s2, s12;
    sector_sines(q, s1, s2, s12);
    p.mul_positive(4 * (triangular ? s1 + s2 + s12 : s1 + s2));
  }
  return p;
}

// log of sum of the three twisted-sector sqrt-determinants
double log_sum_sqrt_twisted(const TorusPeriods& periods, bool triangular) {
  double logs[3];
  int k = 0;
  for (SectorLabel s : {kSector10, kSector01, kSector11})
    logs[k++] = 0.5 * laplacian_product(periods, s, false, triangular).log_mag;
  double m = std::max({logs[0], logs[1], logs[2]});
  return m + std::log(std::exp(logs[0] - m) + std::exp(logs[1] - m) + std::exp(logs[2] - m));
}

}  // namespace

LogProduct det_kw(const CouplingParameter& alpha, const TorusPeriods& periods,
                  SectorLabel sector) {
  return grid_product(periods, sector, [&](const MomentumPoint& q) { return symbol_v(alpha, q); });
}

LogProduct tri_det_kw(const CouplingParameter& alpha, const TorusPeriods& periods,
                      SectorLabel sector) {
  return grid_product(periods, sector,
                      [&](const MomentumPoint& q) { return tri_symbol_v(alpha, q); });
}

LogProduct det_laplacian(const TorusPeriods& periods, SectorLabel sector, bool drop_zero_mode) {
  return laplacian_product(periods, sector, drop_zero_mode, false);
}

LogProduct tri_det_laplacian(const TorusPeriods& periods, SectorLabel sector,
                             bool drop_zero_mode) {
  return laplacian_product(periods, sector, drop_zero_mode, true);
}

double signed_partition_function(const CouplingParameter& alpha, const TorusPeriods& periods,
                                 SectorLabel sector, bool triangular) {
  LogProduct det = triangular ? tri_det_kw(alpha, periods, sector) : det_kw(alpha, periods, sector);
  if (det.is_zero()) return 0.0;
  double val = std::exp(0.5 * det.log_mag);
  if (sector == kSector00) {
    const double ac = triangular ? 2.0 - std::sqrt(3.0) : std::sqrt(2.0) - 1.0;
    if (alpha.alpha() > ac) val = -val;  // Z^(00) crosses zero downward at criticality
  }
  return val;
}

double energy_sum_exact(const TorusPeriods& periods) {
  const double num = 0.5 * det_laplacian(periods, kSector00, true).log_mag;
  const double den = log_sum_sqrt_twisted(periods, false);
  return 4.0 * std::exp(num - den) / static_cast<double>(periods.num_vertices());
}

double tri_energy_sum_exact(const TorusPeriods& periods) {
  const double num = 0.5 * tri_det_laplacian(periods, kSector00, true).log_mag;
  const double den = log_sum_sqrt_twisted(periods, true);
  return 6.0 * std::sqrt(2.0) * std::exp(num - den) / static_cast<double>(periods.num_vertices());
}

SectorRatios critical_sector_ratios(const TorusPeriods& periods) {
  // Z^(ij) ratios equal sqrt(det Lap^(ij)) ratios at alpha_c, since
  // det KW^(ij) = (2 alpha_c^2)^|T| det Lap^(ij).
  double l01 = 0.5 * det_laplacian(periods, kSector01, false).log_mag;
  double l10 = 0.5 * det_laplacian(periods, kSector10, false).log_mag;
  double l11 = 0.5 * det_laplacian(periods, kSector11, false).log_mag;
  double m = std::max({l01, l10, l11});
  double e01 = std::exp(l01 - m), e10 = std::exp(l10 - m), e11 = std::exp(l11 - m);
  double tot = e01 + e10 + e11;
  return {e01 / tot, e10 / tot, e11 / tot};
}

}  // namespace isingtorus
