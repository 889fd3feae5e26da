#include "isingtorus/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <future>
#include <map>
#include <thread>

namespace isingtorus {

namespace {

long long floor_div(long long a, long long b) {
  long long q = a / b, r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

}  // namespace

TorusGraph::TorusGraph(const TorusPeriods& periods, LatticeKind kind)
    : periods_(periods), kind_(kind), hnf_(hermite_normal_form(periods.omega1, periods.omega2)) {
  if (min_lattice_width(periods) < 3)
    throw std::invalid_argument("torus too small: lattice vector shorter than 3 (multi-edges)");
  vertices_ = enumerate_vertices(periods);
  box_a_ = hnf_.a;
  vertex_of_rep_.assign(static_cast<size_t>(hnf_.a * hnf_.c), -1);
  for (int i = 0; i < static_cast<int>(vertices_.size()); ++i)
    vertex_of_rep_[static_cast<size_t>(vertices_[i].y * box_a_ + vertices_[i].x)] = i;
  const int nd = kNumDirs[kind == LatticeKind::square ? 0 : 1];
  edges_.reserve(vertices_.size() * nd);
  for (const Vec2i& v : vertices_)
    for (int d = 0; d < nd; ++d) {
      Vec2i to = reduce(v + dir_step(kind, d));
      edges_.push_back({vertex_index(v), vertex_index(to), d, v});
    }
}

Vec2i TorusGraph::reduce(Vec2i v) const { return lattice_reduce(hnf_, v); }

Vec2i TorusGraph::reduce_with_wraps(Vec2i v, long long& wrap1, long long& wrap2) const {
  Vec2i r = reduce(v);
  Vec2i d = v - r;  // = wrap1*omega1 + wrap2*omega2
  const Vec2i w1 = periods_.omega1, w2 = periods_.omega2;
  const long long det = periods_.det();
  wrap1 = (d.x * w2.y - d.y * w2.x) / det;
  wrap2 = (-d.x * w1.y + d.y * w1.x) / det;
  return r;
}

int TorusGraph::vertex_index(Vec2i v) const {
  Vec2i r = reduce(v);
  return vertex_of_rep_[static_cast<size_t>(r.y * box_a_ + r.x)];
}

int TorusGraph::edge_index(Vec2i from, int dir) const {
  const int nd = kNumDirs[kind_ == LatticeKind::square ? 0 : 1];
  return vertex_index(from) * nd + dir;
}

double TorusGraph::critical_beta() const {
  const double ac =
      kind_ == LatticeKind::square ? std::sqrt(2.0) - 1.0 : 2.0 - std::sqrt(3.0);
  return std::atanh(ac);
}

double TorusGraph::epsilon_offset() const {
  return kind_ == LatticeKind::square ? 1.0 / std::sqrt(2.0) : 2.0 / 3.0;
}

// ---- reference lines --------------------------------------------------------

namespace {

// A family {z0 + t w + Lambda} avoids Z^2 iff no coset representative p has
// 4*cross(p, w) == cross(4*z0, w) (mod 4*det).
bool family_admissible(const TorusPeriods& periods, const std::vector<Vec2i>& reps, Vec2i w,
                       Vec2i z0q) {
  const long long period = 4 * periods.det();
  for (const Vec2i& p : reps) {
    long long h = 4 * cross(p, w) - cross(z0q, w);
    if (((h % period) + period) % period == 0) return false;
  }
  return true;
}

}  // namespace

ReferenceLines::ReferenceLines(const TorusPeriods& periods) : periods_(periods) {
  // quarter offsets tried in order; (2,2) = the (1/2,1/2) convention
  const Vec2i candidates[4] = {{2, 2}, {2, 1}, {1, 2}, {1, 1}};
  std::vector<Vec2i> reps = enumerate_vertices(periods);
  for (int fam = 0; fam < 2; ++fam) {
    const Vec2i w = fam == 0 ? periods.omega1 : periods.omega2;
    bool found = false;
    for (const Vec2i& z0q : candidates) {
      if (family_admissible(periods, reps, w, z0q)) {
        z0_quarter[fam] = z0q;
        found = true;
        break;
      }
    }
    if (!found) throw std::runtime_error("no admissible reference line offset");
  }
}

ReferenceLines::ReferenceLines(const TorusPeriods& periods, Vec2i z0_quarter_fam0,
                               Vec2i z0_quarter_fam1)
    : periods_(periods) {
  std::vector<Vec2i> reps = enumerate_vertices(periods);
  if (!family_admissible(periods, reps, periods.omega1, z0_quarter_fam0) ||
      !family_admissible(periods, reps, periods.omega2, z0_quarter_fam1))
    throw std::invalid_argument("reference line passes through lattice vertices");
  z0_quarter[0] = z0_quarter_fam0;
  z0_quarter[1] = z0_quarter_fam1;
}

Vec2i ReferenceLines::line_dir(int family) const {
  return family == 0 ? periods_.omega1 : periods_.omega2;
}

int ReferenceLines::crossing_parity(int family, Vec2i from, Vec2i step) const {
  const Vec2i w = line_dir(family);
  const long long period = 4 * periods_.det();
  // h(p) = 4 cross(p, w) - cross(4 z0, w); lines sit at h == 0 (mod period)
  long long h0 = 4 * cross(from, w) - cross(z0_quarter[family], w);
  long long h1 = h0 + 4 * cross(step, w);
  if (h0 > h1) std::swap(h0, h1);
  // count multiples of `period` in the open interval (h0, h1); endpoints are
  // never multiples by the admissibility of z0
  long long count = floor_div(h1, period) - floor_div(h0, period);
  return static_cast<int>(count & 1);
}

uint64_t ReferenceLines::crossed_edges_mask(const TorusGraph& g, int family) const {
  uint64_t mask = 0;
  for (int e = 0; e < g.num_edges(); ++e) {
    const TorusEdge& ed = g.edges()[e];
    if (crossing_parity(family, ed.from, dir_step(g.kind(), ed.dir))) mask |= 1ull << e;
  }
  return mask;
}

// ---- even subgraphs ---------------------------------------------------------

EvenSubgraphEnumerator::EvenSubgraphEnumerator(const TorusGraph& g) {
  if (g.num_edges() > 40) throw std::invalid_argument("even-subgraph budget: |E| <= 40");
  const int nv = g.num_vertices(), ne = g.num_edges();
  // spanning tree by BFS
  std::vector<int> parent_edge(nv, -1);
  std::vector<char> seen(nv, 0);
  std::vector<int> order;
  order.push_back(0);
  seen[0] = 1;
  std::vector<std::vector<int>> incident(nv);
  for (int e = 0; e < ne; ++e) {
    incident[g.edges()[e].a].push_back(e);
    incident[g.edges()[e].b].push_back(e);
  }
  std::vector<char> in_tree(ne, 0);
  for (size_t head = 0; head < order.size(); ++head) {
    int v = order[head];
    for (int e : incident[v]) {
      int u = g.edges()[e].a == v ? g.edges()[e].b : g.edges()[e].a;
      if (!seen[u]) {
        seen[u] = 1;
        parent_edge[u] = e;
        in_tree[e] = 1;
        order.push_back(u);
      }
    }
  }
  // fundamental cycle of each non-tree edge: the edge plus the tree paths to
  // the root (XOR of both endpoint paths)
  auto path_mask = [&](int v) {
    uint64_t m = 0;
    while (parent_edge[v] != -1) {
      int e = parent_edge[v];
      m ^= 1ull << e;
      v = (g.edges()[e].a == v) ? g.edges()[e].b : g.edges()[e].a;
    }
    return m;
  };
  for (int e = 0; e < ne; ++e) {
    if (in_tree[e]) continue;
    uint64_t m = 1ull << e;
    m ^= path_mask(g.edges()[e].a);
    m ^= path_mask(g.edges()[e].b);
    cycles_.push_back(m);
  }
}

void EvenSubgraphEnumerator::for_each(const std::function<void(uint64_t)>& visit) const {
  const int r = static_cast<int>(cycles_.size());
  uint64_t mask = 0;
  visit(mask);
  const uint64_t total = 1ull << r;
  for (uint64_t i = 1; i < total; ++i) {
    mask ^= cycles_[std::countr_zero(i)];
    visit(mask);
  }
}

// ---- signed sums ------------------------------------------------------------

namespace {

struct HomologyMasks {
  // phi10 detects winding along omega1, which is the crossing parity with the
  // omega2-direction line family (and vice versa). The paper's Section 3 text
  // pairs the names the other way; the product formula over the sector grids
  // forces this assignment (checked by Theorem 8 on skew tori).
  uint64_t cross1 = 0, cross2 = 0;
  HomologyMasks(const TorusGraph& g, const ReferenceLines& lines)
      : cross1(lines.crossed_edges_mask(g, 1)), cross2(lines.crossed_edges_mask(g, 0)) {}
};

template <typename Accum>
void scan_even_subgraphs(const TorusGraph& g, const ReferenceLines& lines, Accum&& accum) {
  EvenSubgraphEnumerator en(g);
  HomologyMasks hm(g, lines);
  en.for_each([&](uint64_t m) {
    const int len = std::popcount(m);
    const int phi10 = std::popcount(m & hm.cross1) & 1;
    const int phi01 = std::popcount(m & hm.cross2) & 1;
    accum(m, len, phi10, phi01);
  });
}

}  // namespace

SignedSubgraphSums signed_subgraph_sum(const TorusGraph& g, double alpha,
                                       const ReferenceLines& lines) {
  std::vector<double> pow_a(g.num_edges() + 1, 1.0);
  for (size_t k = 1; k < pow_a.size(); ++k) pow_a[k] = pow_a[k - 1] * alpha;
  SignedSubgraphSums out;
  scan_even_subgraphs(g, lines, [&](uint64_t, int len, int phi10, int phi01) {
    const double w = pow_a[len];
    out.zI += w;
    for (SectorLabel s : kAllSectors) out.at(s) += q_form_sign(s, phi10, phi01) * w;
  });
  return out;
}

SignedSubgraphSums signed_subgraph_sum(const TorusGraph& g, double alpha) {
  return signed_subgraph_sum(g, alpha, ReferenceLines(g.periods()));
}

double ExactSectorSums::value(SectorLabel s, int D) const {
  const int k = 2 * s.i + s.j;
  const double sd = std::sqrt(static_cast<double>(D));
  // a + b sqrt(D) cancels catastrophically near criticality; go through the
  // exact integer norm a^2 - D b^2 and the well-conditioned conjugate instead
  if ((a[k] > 0) != (b[k] > 0) && a[k] != 0 && b[k] != 0) {
    __int128 norm = a[k] * a[k] - D * (b[k] * b[k]);
    return static_cast<double>(norm) / (static_cast<double>(a[k]) - static_cast<double>(b[k]) * sd);
  }
  return static_cast<double>(a[k]) + static_cast<double>(b[k]) * sd;
}

ExactSectorSums signed_subgraph_sum_critical(const TorusGraph& g) {
  ExactSectorSums out;
  auto run = [&](auto alpha_crit) {
    using Q = decltype(alpha_crit);
    std::vector<Q> pow_a(g.num_edges() + 1, Q::one());
    for (size_t k = 1; k < pow_a.size(); ++k) pow_a[k] = pow_a[k - 1] * alpha_crit;
    Q acc[4] = {Q::zero(), Q::zero(), Q::zero(), Q::zero()};
    ReferenceLines lines(g.periods());
    scan_even_subgraphs(g, lines, [&](uint64_t, int len, int phi10, int phi01) {
      for (SectorLabel s : kAllSectors) {
        if (q_form_sign(s, phi10, phi01) > 0)
          acc[2 * s.i + s.j] += pow_a[len];
        else
          acc[2 * s.i + s.j] -= pow_a[len];
      }
    });
    for (int k = 0; k < 4; ++k) {
      out.a[k] = acc[k].a;
      out.b[k] = acc[k].b;
    }
  };
  if (g.kind() == LatticeKind::square)
    run(critical_alpha_sqrt2());
  else
    run(critical_alpha_sqrt3());
  return out;
}

EdgeObservables b_observable(const TorusGraph& g, double alpha, int edge) {
  std::vector<double> pow_a(g.num_edges() + 2, 1.0);
  for (size_t k = 1; k < pow_a.size(); ++k) pow_a[k] = pow_a[k - 1] * alpha;
  const uint64_t ebit = 1ull << edge;
  EdgeObservables out;
  ReferenceLines lines(g.periods());
  scan_even_subgraphs(g, lines, [&](uint64_t m, int len, int phi10, int phi01) {
    const double w = (m & ebit) ? pow_a[len - 1] : -pow_a[len + 1];
    for (SectorLabel s : kAllSectors) out.b[2 * s.i + s.j] += q_form_sign(s, phi10, phi01) * w;
  });
  return out;
}

double ht_energy_sum(const TorusGraph& g, double alpha, int edge) {
  std::vector<double> pow_a(g.num_edges() + 2, 1.0);
  for (size_t k = 1; k < pow_a.size(); ++k) pow_a[k] = pow_a[k - 1] * alpha;
  const uint64_t ebit = 1ull << edge;
  double acc = 0;
  EvenSubgraphEnumerator en(g);
  en.for_each([&](uint64_t m) {
    const int len = std::popcount(m);
    acc += (m & ebit) ? pow_a[len - 1] : -pow_a[len + 1];
  });
  return acc;
}

double tri_ht_energy_sum(const TorusGraph& g, double alpha, int edge) {
  std::vector<double> pow_a(g.num_edges() + 1, 1.0);
  for (size_t k = 1; k < pow_a.size(); ++k) pow_a[k] = pow_a[k - 1] * alpha;
  const double in_w = 1.0 / alpha - 2.0 / 3.0, out_w = alpha - 2.0 / 3.0;
  const uint64_t ebit = 1ull << edge;
  double acc = 0;
  EvenSubgraphEnumerator en(g);
  en.for_each([&](uint64_t m) {
    acc += ((m & ebit) ? in_w : out_w) * pow_a[std::popcount(m)];
  });
  return acc;
}

EdgeObservables tri_b_observable(const TorusGraph& g, double alpha, int edge) {
  std::vector<double> pow_a(g.num_edges() + 1, 1.0);
  for (size_t k = 1; k < pow_a.size(); ++k) pow_a[k] = pow_a[k - 1] * alpha;
  const double in_w = 1.0 / alpha - 2.0 / 3.0, out_w = alpha - 2.0 / 3.0;
  const uint64_t ebit = 1ull << edge;
  EdgeObservables out;
  ReferenceLines lines(g.periods());
  scan_even_subgraphs(g, lines, [&](uint64_t m, int len, int phi10, int phi01) {
    const double w = ((m & ebit) ? in_w : out_w) * pow_a[len];
    for (SectorLabel s : kAllSectors) out.b[2 * s.i + s.j] += q_form_sign(s, phi10, phi01) * w;
  });
  return out;
}

bool lemma6_pointwise_holds(const TorusGraph& g) {
  bool ok = true;
  ReferenceLines lines(g.periods());
  scan_even_subgraphs(g, lines, [&](uint64_t, int, int phi10, int phi01) {
    int s = q_form_sign(kSector10, phi10, phi01) + q_form_sign(kSector01, phi10, phi01) +
            q_form_sign(kSector11, phi10, phi01) - q_form_sign(kSector00, phi10, phi01);
    if (s != 2) ok = false;
  });
  return ok;
}

// ---- spin enumeration -------------------------------------------------------

namespace {

struct SpinTables {
  int n = 0;
  std::vector<int8_t> coupling;            // J per edge (+1 / -1)
  std::vector<std::vector<int>> incident;  // vertex -> incident edge list
  std::vector<double> weight;              // exp(beta * E), E = -|E| .. |E| step 2

  SpinTables(const TorusGraph& g, double beta, uint64_t flipped_mask) {
    n = g.num_vertices();
    if (n > kMaxEnumVertices) throw std::invalid_argument("enumeration budget exceeded");
    const int ne = g.num_edges();
    coupling.resize(ne);
    for (int e = 0; e < ne; ++e) coupling[e] = (flipped_mask >> e) & 1 ? -1 : 1;
    incident.assign(n, {});
    for (int e = 0; e < ne; ++e) {
      incident[g.edges()[e].a].push_back(e);
      incident[g.edges()[e].b].push_back(e);
    }
    weight.resize(2 * ne + 1);
    for (int E = -ne; E <= ne; ++E) weight[E + ne] = std::exp(beta * E);
  }
};

// Gray-code scan over all 2^n spin configurations, block-split for
// parallelism with a deterministic block order. Visitor sees
// (spins, bond_energy) after each update; flip reports which site changed.
template <typename Body>
void gray_scan(const TorusGraph& g, const SpinTables& t, int jobs, Body&& make_body) {
  const int n = t.n;
  const int ne = g.num_edges();
  // fixed split: high `kb` bits select the block
  const int kb = (n >= 22) ? 6 : 0;
  const int nlow = n - kb;
  const uint64_t nblocks = 1ull << kb;

  auto run_block = [&](uint64_t blk, auto& body) {
    std::vector<int8_t> s(n, 1);
    for (int i = 0; i < kb; ++i)
      if ((blk >> i) & 1) s[nlow + i] = -1;
    // bond energy of the initial state
    int E = 0;
    for (int e = 0; e < ne; ++e)
      E += t.coupling[e] * s[g.edges()[e].a] * s[g.edges()[e].b];
    body.init(s, E);
    const uint64_t total = 1ull << nlow;
    for (uint64_t i = 1; i < total; ++i) {
      const int v = std::countr_zero(i);
      int dE = 0;
      for (int e : t.incident[v]) {
        const TorusEdge& ed = g.edges()[e];
        const int other = (ed.a == v) ? ed.b : ed.a;
        // self-loops are excluded by the minimum-size rule
        dE += t.coupling[e] * s[other];
      }
      E -= 2 * s[v] * dE;
      s[v] = -s[v];
      body.step(s, E, v);
    }
  };

  using BodyT = std::decay_t<decltype(make_body())>;
  std::vector<BodyT> bodies;
  bodies.reserve(nblocks);
  for (uint64_t b = 0; b < nblocks; ++b) bodies.push_back(make_body());
  if (jobs <= 1 || nblocks == 1) {
    for (uint64_t b = 0; b < nblocks; ++b) run_block(b, bodies[b]);
  } else {
    std::atomic<uint64_t> next{0};
    auto worker = [&] {
      for (;;) {
        uint64_t b = next.fetch_add(1);
        if (b >= nblocks) return;
        // work on a thread-local copy: the shared array would false-share
        BodyT local = bodies[b];
        run_block(b, local);
        bodies[b] = std::move(local);
      }
    };
    std::vector<std::thread> pool;
    const int nt = std::min<int>(jobs, static_cast<int>(nblocks));
    pool.reserve(nt);
    for (int i = 0; i < nt; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  // deterministic reduction in block order
  for (uint64_t b = 1; b < nblocks; ++b) bodies[0].merge(bodies[b]);
  bodies[0].finish();
  make_body.result(bodies[0]);
}

struct KahanSum {
  double s = 0, c = 0;
  void add(double x) {
    double y = x - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  void merge(const KahanSum& o) { add(o.s); }
};

}  // namespace

double partition_function(const TorusGraph& g, double beta, uint64_t flipped_mask, int jobs) {
  SpinTables t(g, beta, flipped_mask);
  const int ne = g.num_edges();
  struct Body {
    const SpinTables* t;
    int ne;
    KahanSum z;
    void init(const std::vector<int8_t>&, int E) { z.add(t->weight[E + ne]); }
    void step(const std::vector<int8_t>&, int E, int) { z.add(t->weight[E + ne]); }
    void merge(const Body& o) { z.merge(o.z); }
    void finish() {}
  };
  double out = 0;
  struct Make {
    const SpinTables* t;
    int ne;
    double* out;
    Body operator()() const { return Body{t, ne, {}}; }
    void result(const Body& b) const { *out = b.z.s; }
  } mk{&t, ne, &out};
  gray_scan(g, t, jobs, mk);
  return out;
}

double energy_correlation(const TorusGraph& g, double beta, const std::vector<int>& edges,
                          int jobs) {
  for (size_t i = 0; i < edges.size(); ++i)
    for (size_t j = i + 1; j < edges.size(); ++j)
      if (edges[i] == edges[j])
        throw std::invalid_argument("energy_correlation requires distinct edges");
  if (edges.empty()) return 1.0;
  SpinTables t(g, beta, 0);
  const int ne = g.num_edges();
  const double off = g.epsilon_offset();
  struct Body {
    const TorusGraph* g;
    const SpinTables* t;
    const std::vector<int>* edges;
    int ne;
    double off;
    KahanSum z, num;
    double ins(const std::vector<int8_t>& s) const {
      double p = 1;
      for (int e : *edges) {
        const TorusEdge& ed = g->edges()[e];
        p *= s[ed.a] * s[ed.b] - off;
      }
      return p;
    }
    void init(const std::vector<int8_t>& s, int E) {
      double w = t->weight[E + ne];
      z.add(w);
      num.add(w * ins(s));
    }
    void step(const std::vector<int8_t>& s, int E, int) { init(s, E); }
    void merge(const Body& o) {
      z.merge(o.z);
      num.merge(o.num);
    }
    void finish() {}
  };
  double out = 0;
  struct Make {
    const TorusGraph* g;
    const SpinTables* t;
    const std::vector<int>* edges;
    int ne;
    double off;
    double* out;
    Body operator()() const { return Body{g, t, edges, ne, off, {}, {}}; }
    void result(const Body& b) const { *out = b.num.s / b.z.s; }
  } mk{&g, &t, &edges, ne, off, &out};
  gray_scan(g, t, jobs, mk);
  return out;
}

std::vector<double> edge_class_correlations(const TorusGraph& g, double beta, int jobs) {
  SpinTables t(g, beta, 0);
  const int ne = g.num_edges();
  const int nd = kNumDirs[g.kind() == LatticeKind::square ? 0 : 1];
  struct Body {
    const TorusGraph* g;
    const SpinTables* t;
    int ne, nd;
    std::vector<int> sdir;  // running sum of sigma sigma per direction class
    KahanSum z;
    std::vector<KahanSum> acc;
    void init(const std::vector<int8_t>& s, int E) {
      sdir.assign(nd, 0);
      for (int e = 0; e < ne; ++e) {
        const TorusEdge& ed = g->edges()[e];
        sdir[ed.dir] += s[ed.a] * s[ed.b];
      }
      acc.resize(nd);
      record(E);
    }
    void record(int E) {
      double w = t->weight[E + ne];
      z.add(w);
      for (int d = 0; d < nd; ++d) acc[d].add(sdir[d] * w);
    }
    void step(const std::vector<int8_t>& s, int E, int v) {
      // s[v] already flipped; each incident edge contributes twice its new value
      for (int e : t->incident[v]) {
        const TorusEdge& ed = g->edges()[e];
        sdir[ed.dir] += 2 * s[ed.a] * s[ed.b];
      }
      record(E);
    }
    void merge(const Body& o) {
      z.merge(o.z);
      for (int d = 0; d < nd; ++d) acc[d].merge(o.acc[d]);
    }
    void finish() {}
  };
  std::vector<double> out(nd, 0.0);
  const long long nv = g.num_vertices();
  struct Make {
    const TorusGraph* g;
    const SpinTables* t;
    int ne, nd;
    long long nv;
    std::vector<double>* out;
    Body operator()() const { return Body{g, t, ne, nd, {}, {}, {}}; }
    void result(const Body& b) const {
      for (int d = 0; d < nd; ++d) (*out)[d] = b.acc[d].s / b.z.s / static_cast<double>(nv);
    }
  } mk{&g, &t, ne, nd, nv, &out};
  gray_scan(g, t, jobs, mk);
  return out;
}

DisorderResult disorder_correlator(const TorusGraph& g, double beta, uint64_t gamma_mask,
                                   const std::vector<int>& spin_sites,
                                   const std::vector<int>& energy_edges, int jobs) {
  if (spin_sites.size() % 2 != 0) return {0.0, true};
  SpinTables t(g, beta, gamma_mask);
  SpinTables t0(g, beta, 0);  // unflipped normalization
  const int ne = g.num_edges();
  const double off = g.epsilon_offset();
  // numerator: flipped couplings; denominator: plain Z
  struct Body {
    const TorusGraph* g;
    const SpinTables *t, *t0;
    const std::vector<int>*sites, *edges;
    int ne;
    double off;
    KahanSum num, z;
    void eval(const std::vector<int8_t>& s, int) {
      int E = 0, E0 = 0;
      for (int e = 0; e < ne; ++e) {
        const TorusEdge& ed = g->edges()[e];
        int b = s[ed.a] * s[ed.b];
        E += t->coupling[e] * b;
        E0 += b;
      }
      double p = 1;
      for (int v : *sites) p *= s[v];
      for (int e : *edges) {
        const TorusEdge& ed = g->edges()[e];
        p *= s[ed.a] * s[ed.b] - off;
      }
      num.add(p * t->weight[E + ne]);
      z.add(t0->weight[E0 + ne]);
    }
    void init(const std::vector<int8_t>& s, int E) { eval(s, E); }
    void step(const std::vector<int8_t>& s, int E, int) { eval(s, E); }
    void merge(const Body& o) {
      num.merge(o.num);
      z.merge(o.z);
    }
    void finish() {}
  };
  double out = 0;
  struct Make {
    const TorusGraph* g;
    const SpinTables *t, *t0;
    const std::vector<int>*sites, *edges;
    int ne;
    double off;
    double* out;
    Body operator()() const { return Body{g, t, t0, sites, edges, ne, off, {}, {}}; }
    void result(const Body& b) const { *out = b.num.s / b.z.s; }
  } mk{&g, &t, &t0, &spin_sites, &energy_edges, ne, off, &out};
  gray_scan(g, t, jobs, mk);
  return {out, false};
}

uint64_t disorder_loop_mask(const TorusGraph& g, int p, int q, const ReferenceLines& lines) {
  uint64_t m = 0;
  if (p) m ^= lines.crossed_edges_mask(g, 0);
  if (q) m ^= lines.crossed_edges_mask(g, 1);
  return m;
}

uint64_t disorder_loop_mask(const TorusGraph& g, int p, int q) {
  ReferenceLines lines(g.periods());
  return disorder_loop_mask(g, p, q, lines);
}

double mu_pq_expectation(const TorusGraph& g, int p, int q, int jobs) {
  if (p == 0 && q == 0) return 1.0;
  const double beta = g.critical_beta();
  uint64_t mask = disorder_loop_mask(g, p, q);
  return partition_function(g, beta, mask, jobs) / partition_function(g, beta, 0, jobs);
}

double mu_sector_expectation(const TorusGraph& g, SectorLabel sector, int jobs) {
  double acc = 0;
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q) {
      int sgn = (((1 - sector.i) * p + (1 - sector.j) * q + p * q) % 2) ? -1 : 1;
      acc += sgn * mu_pq_expectation(g, p, q, jobs);
    }
  return acc / 4.0;
}

double mu_sector_energy_expectation(const TorusGraph& g, SectorLabel sector,
                                    const std::vector<int>& energy_edges,
                                    const ReferenceLines& lines, int jobs) {
  const double beta = g.critical_beta();
  double acc = 0;
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q) {
      int sgn = (((1 - sector.i) * p + (1 - sector.j) * q + p * q) % 2) ? -1 : 1;
      uint64_t mask = disorder_loop_mask(g, p, q, lines);
      acc += sgn * disorder_correlator(g, beta, mask, {}, energy_edges, jobs).value;
    }
  return acc / 4.0;
}

}  // namespace isingtorus
