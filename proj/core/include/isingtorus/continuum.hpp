#pragma once

#include <vector>

#include "isingtorus/geometry.hpp"
#include "isingtorus/specfun.hpp"

namespace isingtorus {

// Limiting sector weights Z^(01) = |theta2|, Z^(10) = |theta4|, Z^(11) = |theta3|.
struct SectorWeights {
  double z01 = 0, z10 = 0, z11 = 0;
  double total() const { return z01 + z10 + z11; }
  double normalized(SectorLabel s) const {
    if (s == kSector01) return z01 / total();
    if (s == kSector10) return z10 / total();
    if (s == kSector11) return z11 / total();
    return 0.0;  // the (00) sector weight vanishes at criticality
  }
};

SectorWeights sector_weights(const ModularParameter& tau);

// Limit of E eps_V + E eps_H, coefficient of delta:
//   2 (Im tau)^{1/2} |theta2 theta3 theta4| / (|theta2|+|theta3|+|theta4|) / sqrt(area).
double energy_sum_limit(const ModularParameter& tau, double area);
// One-point limit (either edge orientation): half of the sum.
double energy_one_point_limit(const ModularParameter& tau, double area);

// Stress-tensor combination
//   H = (Z01/Z) Re[w1^{-2}(t2^4 - 2 t3^4)] + (Z10/Z) Re[w1^{-2}(t2^4 + t3^4)]
//     + (Z11/Z) Re[w1^{-2}(t3^4 - 2 t2^4)].
double stress_tensor_H(const PeriodPair& periods);

// Leading-order prediction for E eps_H - E eps_V at mesh delta. The
// coefficient is sqrt(2) pi / 6: the Laurent data of the sector kernels give
// dz g^(ij)|_a = conj(eta_a) E^(ij) (pi^2 / (6 w1^2)) {t2^4-2t3^4, t2^4+t3^4, t3^4-2t2^4},
// and the sector sum then carries sqrt(2)/pi.
double energy_difference_prediction(const PeriodPair& periods, double delta);

// dz g^(ij)(a, z)|_{z=a} for the three twisted sectors (the quantity above
// without the conj(eta_a) E^(ij) prefactor), exposed for validation.
complexd sector_kernel_derivative(SectorLabel s, const PeriodPair& periods);

// ---- Pfaffians ---------------------------------------------------------------

// Antisymmetric matrix builder: fill the strict upper triangle, the rest is
// derived, so A = -A^T holds exactly.
class SkewMatrix {
 public:
  explicit SkewMatrix(int n);
  int size() const { return n_; }
  void set_upper(int i, int j, complexd v);  // requires i < j
  complexd at(int i, int j) const;

 private:
  int n_;
  std::vector<complexd> upper_;  // row-major strict upper triangle
};

// Pf(A) for even-dimensional antisymmetric A (Parlett-Reid elimination with
// pivoting); Pf(A)^2 = det(A).
complexd pfaffian(const SkewMatrix& m);

// ---- multipoint correlations ---------------------------------------------------

// Scaling limit of pi^k delta^{-k} E[eps_1 ... eps_k]:
//  even k: sum over twisted sectors of (Z_ij/Z) |Pf[kernel(e_n - e_m)]|^2
//          with kernels cs / ns / ds;
//  odd k:  i^k Pf(M) with zeta blocks and the constant off-diagonal
//          -pi i (Im tau)^{1/2} |t2 t3 t4| / (Z |T|^{1/2}).
// The result is real (asserted; imaginary residue <= 1e-10 (1+|result|)).
double multipoint_limit(const std::vector<complexd>& points, const PeriodPair& periods);

// ---- continuum fermionic observables (Definitions of f and E) -----------------

// E^(ij)_{e1..ek}: (Z_ij/Z) i^k <psi psi* ... psi psi*> for even k ((ij) != (00)),
// i^k <...> for odd k ((ij) == (00)); zero in the complementary parity.
complexd sector_energy_coefficient(SectorLabel s, const std::vector<complexd>& energies,
                                   const PeriodPair& periods);

// f^(ij)_{e1..ek}(a, z) per the continuum definitions; eta_a must be one of
// the 8 admissible unit spinor values (default e^{i pi/8}).
complexd f_continuum(SectorLabel s, complexd a, complexd z,
                     const std::vector<complexd>& energies, const PeriodPair& periods,
                     complexd eta_a);

// Contour-extraction validation of the pole structure of f^(ij):
//   residue at e_m = i conj(f without e_m evaluated at e_m),
//   residue at a   = conj(eta_a) E^(ij)_{e1..ek},
//   constant term at a = -i eta_a E^(ij)_{e1..ek,a},
//   residues over the doubled-torus fundamental domain sum to zero.
struct ResidueReport {
  double max_em_error = 0;      // worst residue mismatch at the e_m
  double residue_a_error = 0;   // mismatch at a
  double constant_a_error = 0;  // constant-term mismatch at a
  double residue_sum = 0;       // |sum of residues| over the doubled domain
};
ResidueReport residue_validator(SectorLabel s, complexd a, const std::vector<complexd>& energies,
                                const PeriodPair& periods, complexd eta_a);

// sector (anti)periodicity factors (-1)^{ip+jq} checked numerically
double periodicity_violation(SectorLabel s, complexd a, const std::vector<complexd>& energies,
                             const PeriodPair& periods, complexd eta_a);

}  // namespace isingtorus
