#pragma once

#include <array>
#include <complex>

#include "isingtorus/geometry.hpp"
#include "isingtorus/logproduct.hpp"

namespace isingtorus {

// tanh(beta) coupling, restricted to (0,1). The critical values carry an
// exactness tag so the spectral products can flag the exactly-vanishing
// factor at (alpha_c, q=0) instead of trusting floating-point cancellation.
class CouplingParameter {
 public:
  explicit CouplingParameter(double alpha) : alpha_(alpha), critical_(Critical::none) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("alpha must lie in (0,1)");
  }

  static CouplingParameter critical_square();      // alpha_c = sqrt(2) - 1
  static CouplingParameter critical_triangular();  // alpha_tri = 2 - sqrt(3)

  double alpha() const { return alpha_; }
  bool is_critical_square() const { return critical_ == Critical::square; }
  bool is_critical_triangular() const { return critical_ == Critical::triangular; }

 private:
  enum class Critical { none, square, triangular };
  CouplingParameter(double alpha, Critical c) : alpha_(alpha), critical_(c) {}
  double alpha_;
  Critical critical_;
};

// v(alpha, q) = (1+a^2)^2 + a(a^2-1)(z + 1/z + w + 1/w), evaluated in the
// manifestly nonnegative form
//   (a^2+2a-1)^2 + 4a(1-a^2) [sin^2(pi qx) + sin^2(pi qy)].
double symbol_v(const CouplingParameter& alpha, const MomentumPoint& q);

// Triangular-lattice symbol: c0(a) + c1(a) * (z + w + 1/z + 1/w + z/w + w/z)
// with c0 = 1 + 3a^2 + 8a^3 + 3a^4 + a^6 and c1 = 2a^3 - a - a^5 = -a(1-a^2)^2,
// evaluated as ((1+a)(a^2-4a+1))^2 + 4a(1-a^2)^2 [sin^2 + sin^2 + sin^2].
double tri_symbol_v(const CouplingParameter& alpha, const MomentumPoint& q);

// One-vertex twisted Kac-Ward block. Oriented-edge order is
// [E, N, W, S] (directions +1, +i, -1, -i); the entry (e -> e') carries the
// momentum phase of e' (z, w, 1/z, 1/w respectively) times
// alpha * exp(i/2 * turn(e,e')) with turn in {0, +-pi/2}; U-turns are zero.
// det(kw_block) == symbol_v by construction of the conventions.
struct KWBlock {
  std::array<std::array<std::complex<double>, 4>, 4> entries{};
  std::complex<double> det() const;
};

KWBlock kw_block(const CouplingParameter& alpha, const MomentumPoint& q);

// det KW^(ij) = prod over the sector grid of v(alpha, q). The sign is `zero`
// iff a factor vanishes exactly, which happens only for sector (0,0) at the
// critical coupling (detected exactly: rational q == 0 and tagged alpha).
LogProduct det_kw(const CouplingParameter& alpha, const TorusPeriods& periods,
                  SectorLabel sector);
LogProduct tri_det_kw(const CouplingParameter& alpha, const TorusPeriods& periods,
                      SectorLabel sector);

// Twisted Laplacian determinants. Eigenvalues are (1/(2 alpha_c^2)) v(alpha_c, q)
// = 4 - 2cos(2 pi qx) - 2cos(2 pi qy) on the square lattice and
// 6 - (six-phase sum) on the triangular lattice. With drop_zero_mode the q = 0
// eigenvalue is excluded by the exact rational test (sector (0,0) only).
LogProduct det_laplacian(const TorusPeriods& periods, SectorLabel sector, bool drop_zero_mode);
LogProduct tri_det_laplacian(const TorusPeriods& periods, SectorLabel sector,
                             bool drop_zero_mode);

// Signed partition function Z^(ij)(alpha) = +-sqrt(det KW^(ij)). The twisted
// sectors are positive; Z^(00) is positive below alpha_c, zero at alpha_c and
// negative above (its derivative at the critical point is negative).
double signed_partition_function(const CouplingParameter& alpha, const TorusPeriods& periods,
                                 SectorLabel sector, bool triangular = false);

// E eps_V + E eps_H = 4 sqrt(det* Lap^00) / (sum_(ij)!=(00) sqrt(det Lap^ij)) / |T|,
// evaluated in log space throughout.
double energy_sum_exact(const TorusPeriods& periods);

// Triangular analog: E eps_e0 + E eps_e1 + E eps_e2
//   = 6 sqrt(2) sqrt(det* Lap^00) / (sum sqrt(det Lap^ij)) / |T|.
double tri_energy_sum_exact(const TorusPeriods& periods);

// Normalized sector ratios Z^(ij) / (Z^(01)+Z^(10)+Z^(11)) at criticality,
// indexed {01, 10, 11}; computed from log-determinant differences so they are
// stable at large N.
struct SectorRatios {
  double r01 = 0, r10 = 0, r11 = 0;
};
SectorRatios critical_sector_ratios(const TorusPeriods& periods);

}  // namespace isingtorus
