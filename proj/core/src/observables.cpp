#include "isingtorus/observables.hpp"

#include <cmath>
#include <deque>
#include <map>
#include <numbers>

namespace isingtorus {

namespace {

constexpr double kPi = std::numbers::pi;

long long wrap(long long a, long long m) { return ((a % m) + m) % m; }

const Vec2i kCornerSteps[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

}  // namespace

Vec2i CornerGeometry::primal(CornerIndex c) const {
  c = norm(c);
  auto fd = [](long long v) { return (v >= 0) ? (v + 1) / 2 : -((-v) / 2); };
  return {wrap(fd(c.p), 2 * nx_), wrap(fd(c.q), 2 * ny_)};
}

Vec2i CornerGeometry::dual(CornerIndex c) const {
  c = norm(c);
  return {wrap(c.p / 2, 2 * nx_), wrap(c.q / 2, 2 * ny_)};
}

complexd dirac_spinor(const CornerGeometry& geom, CornerIndex c, int sheet) {
  Vec2i u = geom.u_dir(c);
  complexd uz(u.x / std::sqrt(2.0), u.y / std::sqrt(2.0));
  complexd eta = std::exp(complexd(0, kPi / 4)) / std::sqrt(uz);
  return (sheet & 1) ? -eta : eta;
}

bool ObservableField::is_split(CornerIndex c) const {
  c = geom_.norm(c);
  return c.p % (2 * geom_.nx()) == 0 && c.q % (2 * geom_.ny()) == 0;
}

int ObservableField::split_side(CornerIndex, Vec2i step) const {
  // a+ owns the corner edges with cross(u_a, step) < 0, u_a = (1,1):
  // the +x and -y neighbors ("left as seen from a_dual" in the paper).
  return (cross({1, 1}, step) < 0) ? +1 : -1;
}

bool ObservableField::edge_deleted(CornerIndex c, int dir) const {
  return deleted_edge_[geom_.flat(c) * 4 + dir];
}

ObservableField::ObservableField(const TorusGraph& base, std::vector<int> energy_edges, int jobs)
    : base_(&base), geom_(0, 0), energies_(std::move(energy_edges)), jobs_(jobs) {
  if (base.kind() != LatticeKind::square)
    throw std::invalid_argument("observables need a square-lattice base torus");
  const Vec2i w1 = base.periods().omega1, w2 = base.periods().omega2;
  if (w1.y != 0 || w2.x != 0 || w1.x < 3 || w2.y < 3)
    throw std::invalid_argument("observables need rectangular periods (Nx,0),(0,Ny)");
  geom_ = CornerGeometry(static_cast<int>(w1.x), static_cast<int>(w2.y));
  eta_a_ = std::exp(complexd(0, kPi / 8));
  edge_L_ = base.edge_index({0, 0}, 1);  // vertical
  edge_R_ = base.edge_index({0, 0}, 0);  // horizontal
  build();
}

void ObservableField::build() {
  const int Nx = geom_.nx(), Ny = geom_.ny();
  nodes_.assign(geom_.num_corners(), {});
  deleted_edge_.assign(geom_.num_corners() * 4, 0);

  // delete the corner edges crossing each energy edge e_m and its shifts
  auto del = [&](CornerIndex c1, CornerIndex c2) {
    // centered wrap-aware step, in {-1,0,1}^2 for adjacent corners
    Vec2i step{wrap(c2.p - c1.p + 1, geom_.pmod()) - 1, wrap(c2.q - c1.q + 1, geom_.qmod()) - 1};
    for (int d = 0; d < 4; ++d) {
      if (kCornerSteps[d] == step) deleted_edge_[geom_.flat(c1) * 4 + d] = 1;
      if (kCornerSteps[d] == -step) deleted_edge_[geom_.flat(c2) * 4 + d] = 1;
    }
  };
  for (int e : energies_) {
    const TorusEdge& ed = base_->edges()[e];
    for (int sp = 0; sp < 2; ++sp)
      for (int sq = 0; sq < 2; ++sq) {
        long long X = ed.from.x + sp * Nx, Y = ed.from.y + sq * Ny;
        if (ed.dir == 0) {  // horizontal edge: two vertical corner edges cross it
          del(geom_.norm({2 * X, 2 * Y - 1}), geom_.norm({2 * X, 2 * Y}));
          del(geom_.norm({2 * X + 1, 2 * Y - 1}), geom_.norm({2 * X + 1, 2 * Y}));
        } else {  // vertical edge: two horizontal corner edges
          del(geom_.norm({2 * X - 1, 2 * Y}), geom_.norm({2 * X, 2 * Y}));
          del(geom_.norm({2 * X - 1, 2 * Y + 1}), geom_.norm({2 * X, 2 * Y + 1}));
        }
      }
  }

  // node key: (corner, side); side 0 for generic corners
  struct Key {
    CornerIndex c;
    int side;
  };
  auto node_ref = [&](const Key& k) -> Node& {
    if (!is_split(k.c)) return nodes_[geom_.flat(k.c)];
    int p = (wrap(k.c.p, 4ll * Nx) >= 2 * Nx) ? 1 : 0;
    int q = (wrap(k.c.q, 4ll * Ny) >= 2 * Ny) ? 1 : 0;
    return k.side > 0 ? split_plus_[p][q] : split_minus_[p][q];
  };

  // BFS transport from a+ with (phase, gamma) continuation
  std::deque<Key> queue;
  Key start{{0, 0}, +1};
  node_ref(start) = {eta_a_, 0, true};
  queue.push_back(start);
  while (!queue.empty()) {
    Key cur = queue.front();
    queue.pop_front();
    const Node state = node_ref(cur);
    for (int d = 0; d < 4; ++d) {
      if (edge_deleted(cur.c, d)) continue;
      const Vec2i step = kCornerSteps[d];
      if (cur.side != 0 && split_side(cur.c, step) != cur.side) continue;
      CornerIndex nb = geom_.norm({cur.c.p + step.x, cur.c.q + step.y});
      Key nk{nb, 0};
      if (is_split(nb)) nk.side = split_side(nb, -step);
      Node& dst = node_ref(nk);
      if (dst.reached) continue;
      dst = transport(state, cur.c, nb);
      queue.push_back(nk);
    }
  }
}

ObservableField::Node ObservableField::transport(const Node& state, CornerIndex from,
                                                 CornerIndex to) const {
  Node out = state;
  out.reached = true;
  // spinor rotation: u turns by +-90 degrees, eta picks up e^{-i dtheta/2}
  const Vec2i u1 = geom_.u_dir(from), u2 = geom_.u_dir(to);
  const long long cr = cross(u1, u2);  // +-2
  out.phase *= std::polar(1.0, (cr > 0 ? -1.0 : 1.0) * kPi / 4);

  const Vec2i p1 = geom_.primal(from), p2 = geom_.primal(to);
  if (p1 == p2) {
    // rotation around the shared primal vertex: the dual mark moves, the
    // disorder path grows by the dual edge, i.e. flips its primal partner
    out.gamma ^= 1ull << base_edge_between_dual(geom_.dual(from), geom_.dual(to));
  } else {
    // rotation around the shared dual vertex: the primal mark moves along a
    // primal edge; crossing the current disorder path costs a sign
    int e = base_edge_between_primal(p1, p2);
    if (state.gamma & (1ull << e)) out.phase = -out.phase;
  }
  return out;
}

int ObservableField::base_edge_between_primal(Vec2i v1, Vec2i v2) const {
  const int Nx = geom_.nx(), Ny = geom_.ny();
  const long long dx = wrap(v2.x - v1.x, 2 * Nx), dy = wrap(v2.y - v1.y, 2 * Ny);
  Vec2i from{wrap(v1.x, Nx), wrap(v1.y, Ny)};
  if (dy == 0 && dx == 1) return base_->edge_index(from, 0);
  if (dy == 0 && dx == 2 * Nx - 1)
    return base_->edge_index({wrap(v2.x, Nx), wrap(v2.y, Ny)}, 0);
  if (dx == 0 && dy == 1) return base_->edge_index(from, 1);
  if (dx == 0 && dy == 2 * Ny - 1)
    return base_->edge_index({wrap(v2.x, Nx), wrap(v2.y, Ny)}, 1);
  throw std::logic_error("primal vertices not adjacent");
}

int ObservableField::base_edge_between_dual(Vec2i d1, Vec2i d2) const {
  const int Nx = geom_.nx(), Ny = geom_.ny();
  const long long dx = wrap(d2.x - d1.x, 2 * Nx), dy = wrap(d2.y - d1.y, 2 * Ny);
  // dual step (a,b)->(a+1,b) crosses the primal vertical edge at (a+1, b);
  // dual step (a,b)->(a,b+1) crosses the primal horizontal edge at (a, b+1)
  if (dy == 0 && dx == 1) return base_->edge_index({wrap(d1.x + 1, Nx), wrap(d1.y, Ny)}, 1);
  if (dy == 0 && dx == 2 * Nx - 1) return base_->edge_index({wrap(d2.x + 1, Nx), wrap(d2.y, Ny)}, 1);
  if (dx == 0 && dy == 1) return base_->edge_index({wrap(d1.x, Nx), wrap(d1.y + 1, Ny)}, 0);
  if (dx == 0 && dy == 2 * Ny - 1) return base_->edge_index({wrap(d2.x, Nx), wrap(d2.y + 1, Ny)}, 0);
  throw std::logic_error("dual vertices not adjacent");
}

complexd ObservableField::value_of(const Node& n, CornerIndex c) const {
  if (!n.reached) throw std::logic_error("corner not reached by transport");
  const Vec2i zp = geom_.primal(c);
  const int v = base_->vertex_index({wrap(zp.x, geom_.nx()), wrap(zp.y, geom_.ny())});
  const int a0 = base_->vertex_index({0, 0});
  DisorderResult r = disorder_correlator(*base_, base_->critical_beta(), n.gamma, {v, a0},
                                         energies_, jobs_);
  return n.phase * r.value;
}

complexd ObservableField::value(CornerIndex c) const {
  c = geom_.norm(c);
  if (is_split(c)) throw std::invalid_argument("split corner needs a +- side");
  size_t idx = geom_.flat(c);
  if (value_cache_.empty()) {
    value_cache_.assign(geom_.num_corners(), 0.0);
    value_cached_.assign(geom_.num_corners(), 0);
  }
  if (!value_cached_[idx]) {
    value_cache_[idx] = value_of(nodes_[idx], c);
    value_cached_[idx] = 1;
  }
  return value_cache_[idx];
}

complexd ObservableField::value_at_split(int p, int q, int side) const {
  const int k = side > 0 ? 0 : 1;
  if (!split_cached_[p][q][k]) {
    const Node& n = side > 0 ? split_plus_[p][q] : split_minus_[p][q];
    split_cache_[p][q][k] =
        value_of(n, geom_.norm({2ll * p * geom_.nx(), 2ll * q * geom_.ny()}));
    split_cached_[p][q][k] = 1;
  }
  return split_cache_[p][q][k];
}

complexd ObservableField::sector_value(SectorLabel s, CornerIndex c) const {
  complexd acc = 0;
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q) {
      int sgn = ((s.i * p + s.j * q) % 2) ? -1 : 1;
      acc += static_cast<double>(sgn) *
             value(geom_.norm({c.p + 2ll * p * geom_.nx(), c.q + 2ll * q * geom_.ny()}));
    }
  return acc / 4.0;
}

complexd ObservableField::sector_value_at_split(SectorLabel s, int side) const {
  complexd acc = 0;
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q) {
      int sgn = ((s.i * p + s.j * q) % 2) ? -1 : 1;
      acc += static_cast<double>(sgn) * value_at_split(p, q, side);
    }
  return acc / 4.0;
}

double ObservableField::continuation_mismatch() const {
  double worst = 0;
  for (long long q = 0; q < geom_.qmod(); ++q)
    for (long long p = 0; p < geom_.pmod(); ++p) {
      CornerIndex c{p, q};
      if (is_split(c)) continue;  // covered from the neighbor side below
      const Node& sn = nodes_[geom_.flat(c)];
      for (int d = 0; d < 4; ++d) {
        if (edge_deleted(c, d)) continue;
        CornerIndex nb = geom_.norm({p + kCornerSteps[d].x, q + kCornerSteps[d].y});
        if (is_split(nb)) continue;
        Node alt = transport(sn, c, nb);
        complexd direct = value_of(alt, nb);
        complexd stored = value(nb);
        worst = std::max(worst, std::abs(direct - stored));
      }
    }
  return worst;
}

namespace {

// a face with corners NE=(fx,fy), NW=(fx-1,fy), SE=(fx,fy-1), SW=(fx-1,fy-1)
struct FaceCorners {
  CornerIndex ne, nw, se, sw;
};

FaceCorners face_corners(const CornerGeometry& g, long long fx, long long fy) {
  return {g.norm({fx, fy}), g.norm({fx - 1, fy}), g.norm({fx, fy - 1}), g.norm({fx - 1, fy - 1})};
}

}  // namespace

std::optional<complexd> sholomorphy_residual(const ObservableField& f, long long fx, long long fy,
                                             std::optional<SectorLabel> sector) {
  const CornerGeometry& g = f.geom();
  if ((fx + fy) % 2 == 0) throw std::invalid_argument("not an edge face");
  FaceCorners fc = face_corners(g, fx, fy);
  for (const CornerIndex& c : {fc.ne, fc.nw, fc.se, fc.sw})
    if (f.is_split(c)) return std::nullopt;
  // the four sides of the face
  struct Side {
    CornerIndex c;
    int dir;
  };
  const Side sides[4] = {{fc.sw, 0}, {fc.nw, 0}, {fc.sw, 1}, {fc.se, 1}};
  for (const Side& s : sides) {
    // deletion is stored on both endpoint stubs; checking one suffices
    if (f.edge_deleted(s.c, s.dir)) return std::nullopt;
  }
  auto v = [&](CornerIndex c) {
    return sector ? f.sector_value(*sector, c) : f.value(c);
  };
  return v(fc.ne) + v(fc.sw) - v(fc.nw) - v(fc.se);
}

ResidualReport sholomorphy_residuals(const ObservableField& f,
                                     std::optional<SectorLabel> sector) {
  ResidualReport rep;
  const CornerGeometry& g = f.geom();
  for (long long fy = 0; fy < g.qmod(); ++fy)
    for (long long fx = 0; fx < g.pmod(); ++fx) {
      if ((fx + fy) % 2 == 0) continue;
      auto r = sholomorphy_residual(f, fx, fy, sector);
      if (!r) {
        ++rep.skipped;
        continue;
      }
      ++rep.checked;
      rep.max_residual = std::max(rep.max_residual, std::abs(*r));
    }
  return rep;
}

double phase_condition_violation(const ObservableField& f) {
  const CornerGeometry& g = f.geom();
  double worst = 0;
  auto check = [&](complexd val, CornerIndex c) {
    Vec2i u = g.u_dir(c);
    complexd uz(u.x / std::sqrt(2.0), u.y / std::sqrt(2.0));
    complexd eta2 = complexd(0, 1) * std::conj(uz);
    complexd r = val * val / eta2;
    worst = std::max(worst, std::abs(r.imag()));
  };
  for (long long q = 0; q < g.qmod(); ++q)
    for (long long p = 0; p < g.pmod(); ++p) {
      CornerIndex c{p, q};
      if (f.is_split(c)) continue;
      check(f.value(c), c);
    }
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q)
      for (int side : {+1, -1})
        check(f.value_at_split(p, q, side), {2ll * p * g.nx(), 2ll * q * g.ny()});
  return worst;
}

ConstancyReport constancy_check_00(const ObservableField& f) {
  const CornerGeometry& g = f.geom();
  const complexd eta_a = f.eta_a();
  ConstancyReport rep;
  // extract c from a corner where Re(conj(eta_z) i eta_a) is away from zero
  bool have_c = false;
  std::vector<std::pair<CornerIndex, complexd>> vals;
  for (long long q = 0; q < 2 * g.ny(); ++q)
    for (long long p = 0; p < 2 * g.nx(); ++p) {  // one doubled fundamental domain
      CornerIndex c{p, q};
      if (f.is_split(c)) continue;
      vals.push_back({c, f.sector_value(kSector00, c)});
    }
  for (auto& [c, v] : vals) {
    complexd eta = dirac_spinor(g, c);
    double coef = std::real(std::conj(eta) * complexd(0, 1) * eta_a);
    if (!have_c && std::abs(coef) > 0.5) {
      rep.c = std::real(v / eta) / coef;
      have_c = true;
    }
  }
  for (auto& [c, v] : vals) {
    complexd eta = dirac_spinor(g, c);
    complexd proj = eta * std::real(std::conj(eta) * complexd(0, 1) * eta_a * rep.c);
    rep.max_deviation = std::max(rep.max_deviation, std::abs(v - proj));
    Vec2i u = g.u_dir(c);
    if (u.x == 1 && u.y == 1)  // eta_z = +-eta_a sublattice
      rep.max_on_sublattice = std::max(rep.max_on_sublattice, std::abs(v));
  }
  return rep;
}

double energy_difference_discrete(const TorusGraph& base, int jobs) {
  ObservableField f(base, {}, jobs);
  const complexd eta_a = f.eta_a();
  complexd acc = 0;
  for (SectorLabel s : {kSector01, kSector10, kSector11})
    acc += f.sector_value(s, f.corner_L()) - f.sector_value(s, f.corner_R());
  complexd diff = acc / (complexd(0, 1) * std::sqrt(2.0) * eta_a);
  return diff.real();
}

}  // namespace isingtorus
