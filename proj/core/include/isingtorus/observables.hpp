#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "isingtorus/oracle.hpp"

namespace isingtorus {

using complexd = std::complex<double>;

// Corner (p, q) of the doubled torus: position ((2p+1)/4, (2q+1)/4) in lattice
// units. Its primal vertex is (floor((p+1)/2), floor((q+1)/2)) and its dual
// vertex sits at (floor(p/2) + 1/2, floor(q/2) + 1/2).
struct CornerIndex {
  long long p = 0;
  long long q = 0;
  friend bool operator==(const CornerIndex&, const CornerIndex&) = default;
};

// Corner-lattice bookkeeping over the doubling of a rectangular Nx x Ny base
// torus (corner indices live modulo (4Nx, 4Ny)).
class CornerGeometry {
 public:
  CornerGeometry(int nx, int ny) : nx_(nx), ny_(ny) {}
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  long long pmod() const { return 4ll * nx_; }
  long long qmod() const { return 4ll * ny_; }
  CornerIndex norm(CornerIndex c) const {
    c.p = ((c.p % pmod()) + pmod()) % pmod();
    c.q = ((c.q % qmod()) + qmod()) % qmod();
    return c;
  }
  size_t flat(CornerIndex c) const {
    c = norm(c);
    return static_cast<size_t>(c.q * pmod() + c.p);
  }
  size_t num_corners() const { return static_cast<size_t>(pmod() * qmod()); }
  // doubled-torus primal vertex (coords mod (2Nx, 2Ny))
  Vec2i primal(CornerIndex c) const;
  // doubled-torus dual vertex label (a, b) meaning position (a+1/2, b+1/2)
  Vec2i dual(CornerIndex c) const;
  // direction z_dual - z_primal in half units: components +-1
  Vec2i u_dir(CornerIndex c) const {
    c = norm(c);
    return {(c.p % 2 == 0) ? 1 : -1, (c.q % 2 == 0) ? 1 : -1};
  }

 private:
  int nx_, ny_;
};

// Dirac spinor eta_z = e^{i pi/4} (u/|u|)^{-1/2} with u = z_dual - z_primal;
// two-valued, the sheet bit selects the branch.
complexd dirac_spinor(const CornerGeometry& geom, CornerIndex c, int sheet = 0);

// The observable F_{e1..ek}(a, .) on the cut corner graph of the doubled
// torus, assembled by spanning-tree transport from a^+ with the exact
// disorder-path and sign bookkeeping. The base corner a is fixed at index
// (0,0) (translation invariance), so eta_a = e^{i pi/8} and e_L, e_R are the
// vertical and horizontal base edges at the origin.
class ObservableField {
 public:
  // base must be a square-lattice rectangular torus (periods (Nx,0),(0,Ny))
  ObservableField(const TorusGraph& base, std::vector<int> energy_edges = {}, int jobs = 1);

  const CornerGeometry& geom() const { return geom_; }
  complexd eta_a() const { return eta_a_; }
  const std::vector<int>& energy_edges() const { return energies_; }

  bool is_split(CornerIndex c) const;
  // value at a generic (non-split) corner
  complexd value(CornerIndex c) const;
  // value at the split corner a + p*omega1 + q*omega2, side +1 or -1
  complexd value_at_split(int p, int q, int side) const;

  // F^{(ij)} antisymmetrization evaluated anywhere on the doubled torus
  complexd sector_value(SectorLabel s, CornerIndex c) const;
  complexd sector_value_at_split(SectorLabel s, int side) const;

  // corners a_L = a + i(a_dual - a_primal) and a_R = a - i(...)
  CornerIndex corner_L() const { return geom_.norm({-1, 1}); }
  CornerIndex corner_R() const { return geom_.norm({1, -1}); }
  int edge_L() const { return edge_L_; }  // vertical base edge at the origin
  int edge_R() const { return edge_R_; }  // horizontal base edge at the origin

  // transport self-consistency: re-derive every value across every non-tree
  // corner edge of the cut graph; returns the max mismatch
  double continuation_mismatch() const;

  const TorusGraph& base() const { return *base_; }
  int jobs() const { return jobs_; }
  bool edge_deleted(CornerIndex c, int dir) const;  // dir indexes +x,+y,-x,-y

 private:
  const TorusGraph* base_;
  CornerGeometry geom_;
  std::vector<int> energies_;
  int jobs_;
  complexd eta_a_;
  int edge_L_ = -1, edge_R_ = -1;

  // per corner-node transported state; split corners store both sides
  struct Node {
    complexd phase{0.0, 0.0};
    uint64_t gamma = 0;
    bool reached = false;
  };
  std::vector<Node> nodes_;                 // generic corners
  Node split_plus_[2][2], split_minus_[2][2];  // at a + p w1 + q w2
  mutable std::vector<complexd> value_cache_;
  mutable std::vector<uint8_t> value_cached_;
  mutable complexd split_cache_[2][2][2];
  mutable uint8_t split_cached_[2][2][2] = {};

  std::vector<uint8_t> deleted_edge_;  // corner edge (node, direction 0..3) deleted?
  int split_side(CornerIndex c, Vec2i step) const;  // +1/-1: which side owns the step
  Node transport(const Node& state, CornerIndex from, CornerIndex to) const;
  int base_edge_between_primal(Vec2i v1, Vec2i v2) const;
  int base_edge_between_dual(Vec2i d1, Vec2i d2) const;
  complexd value_of(const Node& n, CornerIndex c) const;
  void build();
};

// s-holomorphicity residual F(NE) + F(SW) - F(NW) - F(SE) per corner-graph
// face (one face per primal edge of the doubled torus). Faces touching the
// branch cuts or the deleted e_m corner edges are skipped.
struct ResidualReport {
  double max_residual = 0.0;  // over checked faces
  int checked = 0;
  int skipped = 0;
};
ResidualReport sholomorphy_residuals(const ObservableField& f,
                                     std::optional<SectorLabel> sector = std::nullopt);

// residual at the face of one primal edge of the doubled torus; nullopt if the
// face touches a cut
std::optional<complexd> sholomorphy_residual(const ObservableField& f, long long fx,
                                             long long fy,
                                             std::optional<SectorLabel> sector = std::nullopt);

// max | Im(value^2 / eta_z^2) | over all corners: the phase condition
double phase_condition_violation(const ObservableField& f);

// F^(00)(a, z) = Proj_{eta_z}(i eta_a c) with a single real constant c:
// extracts c, verifies the projection identity everywhere, and checks the
// exact vanishing on the sublattice with u_z = u_a.
struct ConstancyReport {
  double c = 0.0;
  double max_deviation = 0.0;   // |F00 - Proj(i eta_a c)| over all corners
  double max_on_sublattice = 0.0;  // |F00| where eta_z = +-eta_a
  bool passed(double tol) const { return max_deviation <= tol && max_on_sublattice <= tol; }
};
ConstancyReport constancy_check_00(const ObservableField& f);

// E eps_H - E eps_V assembled from the three twisted sector fields via
// sum_(ij) (1/(i sqrt2 eta_a)) (F^(ij)(a, a_L) - F^(ij)(a, a_R)).
double energy_difference_discrete(const TorusGraph& base, int jobs = 1);

}  // namespace isingtorus
