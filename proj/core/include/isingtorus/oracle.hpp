#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "isingtorus/geometry.hpp"
#include "isingtorus/quadint.hpp"

namespace isingtorus {

enum class LatticeKind { square, triangular };

// Direction tags: square uses {H, V}; triangular uses {e0, e1, e2} aligned
// with 1, e^{i pi/3}, e^{2 i pi/3} in (1, e^{i pi/3}) integer coordinates.
inline constexpr int kNumDirs[2] = {2, 3};
inline Vec2i dir_step(LatticeKind kind, int dir) {
  static constexpr Vec2i sq[2] = {{1, 0}, {0, 1}};
  static constexpr Vec2i tri[3] = {{1, 0}, {0, 1}, {-1, 1}};
  return kind == LatticeKind::square ? sq[dir] : tri[dir];
}

struct TorusEdge {
  int a = 0, b = 0;   // vertex indices
  int dir = 0;        // direction tag
  Vec2i from;         // representative base point (edge goes from `from` to `from + step`)
};

// Finite torus graph with exact coset arithmetic. Construction enforces the
// minimum-size rule (shortest lattice vector >= 3 in sup norm) so the graph
// is simple.
class TorusGraph {
 public:
  TorusGraph(const TorusPeriods& periods, LatticeKind kind);

  const TorusPeriods& periods() const { return periods_; }
  LatticeKind kind() const { return kind_; }
  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const std::vector<Vec2i>& vertices() const { return vertices_; }
  const std::vector<TorusEdge>& edges() const { return edges_; }

  int vertex_index(Vec2i v) const;                       // reduces v mod the lattice
  Vec2i reduce(Vec2i v) const;
  // reduction together with the wrap counts: v = rep + a*omega1 + b*omega2
  Vec2i reduce_with_wraps(Vec2i v, long long& wrap1, long long& wrap2) const;
  int edge_index(Vec2i from, int dir) const;             // edge leaving reduce(from)
  double critical_beta() const;                          // atanh(alpha_c) for the lattice kind
  double epsilon_offset() const;                         // 1/sqrt(2) or 2/3

 private:
  TorusPeriods periods_;
  LatticeKind kind_;
  Hnf hnf_;
  std::vector<Vec2i> vertices_;
  std::vector<TorusEdge> edges_;
  std::vector<int> vertex_of_rep_;  // dense lookup over the HNF box
  long long box_a_ = 0;
};

// ---- crossing parities against the reference lines -------------------------
//
// phi10(e) and phi01(e) are the mod-2 crossing numbers of an edge with the
// line families {z0 + t omega1 + Lambda} and {z0 + t omega2 + Lambda}. The
// base point z0 defaults to (1/2, 1/2) (quarter units (2,2)) and falls back to
// quarter offsets when a family would pass through lattice vertices (e.g. any
// omega with both components odd).
struct ReferenceLines {
  explicit ReferenceLines(const TorusPeriods& periods);
  // explicit base points (quarter units, one per family); throws if a family
  // would pass through lattice vertices
  ReferenceLines(const TorusPeriods& periods, Vec2i z0_quarter_fam0, Vec2i z0_quarter_fam1);
  // crossing parity of the edge from `from` in direction `step` with family 0
  // (direction omega1) or family 1 (direction omega2)
  int crossing_parity(int family, Vec2i from, Vec2i step) const;
  // all primal edges of `g` with odd crossing parity, as an edge bitmask
  uint64_t crossed_edges_mask(const TorusGraph& g, int family) const;
  Vec2i z0_quarter[2];  // 4*z0 used for each family

 private:
  TorusPeriods periods_;
  Vec2i line_dir(int family) const;
};

// (-1)^{q_ij(xi)} from the homology bits:
// q_ij = (1-i) phi10 + (1-j) phi01 + phi10 * phi01 (mod 2).
inline int q_form_sign(SectorLabel s, int phi10, int phi01) {
  int q = (1 - s.i) * phi10 + (1 - s.j) * phi01 + phi10 * phi01;
  return (q % 2 == 0) ? 1 : -1;
}

// ---- even subgraphs ---------------------------------------------------------

struct EvenSubgraphEnumerator {
  explicit EvenSubgraphEnumerator(const TorusGraph& g);  // throws if |E| > 40
  // Visit every even subgraph exactly once as an edge bitmask (Gray-code walk
  // over the cycle space, so consecutive masks differ by one fundamental
  // cycle).
  void for_each(const std::function<void(uint64_t mask)>& visit) const;
  int cycle_dim() const { return static_cast<int>(cycles_.size()); }

 private:
  std::vector<uint64_t> cycles_;  // fundamental cycle masks
};

// Signed even-subgraph sums and the edge observables B^(ij)(e).
struct SignedSubgraphSums {
  double z[4] = {0, 0, 0, 0};  // Z^(ij), indexed by 2i + j
  double zI = 0;               // plain high-temperature sum
  double& at(SectorLabel s) { return z[2 * s.i + s.j]; }
  double at(SectorLabel s) const { return z[2 * s.i + s.j]; }
};

SignedSubgraphSums signed_subgraph_sum(const TorusGraph& g, double alpha);
SignedSubgraphSums signed_subgraph_sum(const TorusGraph& g, double alpha,
                                       const ReferenceLines& lines);

// Exact critical-coupling variant: coefficients in Z[sqrt(2)] (square) or
// Z[sqrt(3)] (triangular). Z^(00) at the critical point is exactly zero.
struct ExactSectorSums {
  __int128 a[4] = {0, 0, 0, 0};
  __int128 b[4] = {0, 0, 0, 0};
  bool is_exact_zero(SectorLabel s) const {
    return a[2 * s.i + s.j] == 0 && b[2 * s.i + s.j] == 0;
  }
  double value(SectorLabel s, int D) const;
};
ExactSectorSums signed_subgraph_sum_critical(const TorusGraph& g);

// B^(ij)(e) = sum_xi (alpha^{-1} 1_{e in xi} - alpha 1_{e not in xi}) (-1)^{q_ij} alpha^{|xi|}
struct EdgeObservables {
  double b[4] = {0, 0, 0, 0};
  double at(SectorLabel s) const { return b[2 * s.i + s.j]; }
};
EdgeObservables b_observable(const TorusGraph& g, double alpha, int edge);

// unsigned variant of the same sum (the Lemma-7 representation of the energy
// density: E eps_e = ht_energy_sum / (sqrt(2) Z^I) at criticality)
double ht_energy_sum(const TorusGraph& g, double alpha, int edge);

// Triangular-lattice weights b(e, xi) = (1/alpha - 2/3) 1_{e in xi}
// + (alpha - 2/3) 1_{e not in xi}: E eps_e = tri_ht_energy_sum / Z^I, and the
// signed sector sums satisfy the same four-term combination as B^(ij).
double tri_ht_energy_sum(const TorusGraph& g, double alpha, int edge);
EdgeObservables tri_b_observable(const TorusGraph& g, double alpha, int edge);

// Lemma 6 pointwise check (exact integers): returns true iff
// (-1)^{q10} + (-1)^{q01} + (-1)^{q11} - (-1)^{q00} == 2 for every even
// subgraph.
bool lemma6_pointwise_holds(const TorusGraph& g);

// ---- spin-configuration sums ------------------------------------------------

inline constexpr int kMaxEnumVertices = 32;  // contract budget is 30; hard stop at 32

// Z(beta; flipped) = sum_sigma exp(beta * sum J sigma sigma), J = -1 on the
// edges in `flipped_mask`. Gray-code enumeration with a precomputed weight
// table; `jobs` > 1 splits the configuration space into fixed blocks with a
// deterministic reduction.
double partition_function(const TorusGraph& g, double beta, uint64_t flipped_mask = 0,
                          int jobs = 1);

// E[prod_m eps_{e_m}] with eps = sigma sigma - eps_bar (eps_bar chosen by the
// lattice kind). Edges must be pairwise distinct; k = 0 returns exactly 1.
double energy_correlation(const TorusGraph& g, double beta, const std::vector<int>& edges,
                          int jobs = 1);

// Per-direction-class E[sigma_x sigma_y]; O(1) incremental updates, suitable
// for the largest enumerable tori.
std::vector<double> edge_class_correlations(const TorusGraph& g, double beta, int jobs = 1);

// E[sigma_{v1}...sigma_{v2n} mu_gamma]; gamma is a set of dual edges given by
// the primal edges they cross (a bitmask). Odd spin count returns exact 0
// (flagged).
struct DisorderResult {
  double value = 0.0;
  bool odd_spin_count = false;
};
DisorderResult disorder_correlator(const TorusGraph& g, double beta, uint64_t gamma_mask,
                                   const std::vector<int>& spin_sites,
                                   const std::vector<int>& energy_edges = {}, int jobs = 1);

// mu_pq disorder loops, realized as the edge sets crossed by the reference
// line families (class p omega1 + q omega2 uses gamma1^p XOR gamma2^q).
uint64_t disorder_loop_mask(const TorusGraph& g, int p, int q);
uint64_t disorder_loop_mask(const TorusGraph& g, int p, int q, const ReferenceLines& lines);

// E[mu_pq] at the critical temperature, and the four sector expectations
// E[mu^(ij)] = (1/4) sum_pq (-1)^{(1-i)p + (1-j)q + pq} E[mu_pq].
double mu_pq_expectation(const TorusGraph& g, int p, int q, int jobs = 1);
double mu_sector_expectation(const TorusGraph& g, SectorLabel sector, int jobs = 1);

// E[mu^(ij) * prod eps_{e_m}] at criticality (same sector combination with
// energy insertions). With insertions present the loop representatives matter
// up to gauge: callers must supply lines whose loops do not separate the
// endpoints of any inserted edge.
double mu_sector_energy_expectation(const TorusGraph& g, SectorLabel sector,
                                    const std::vector<int>& energy_edges,
                                    const ReferenceLines& lines, int jobs = 1);

}  // namespace isingtorus
