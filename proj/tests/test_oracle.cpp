#include <doctest.h>

#include <bit>
#include <cmath>
#include <map>

#include "isingtorus/oracle.hpp"

using namespace isingtorus;

TEST_CASE("torus graph construction and minimum-size rule") {
  TorusGraph g(TorusPeriods({3, 0}, {0, 3}), LatticeKind::square);
  CHECK(g.num_vertices() == 9);
  CHECK(g.num_edges() == 18);
  TorusGraph t(TorusPeriods({3, 0}, {0, 3}), LatticeKind::triangular);
  CHECK(t.num_edges() == 27);
  // every vertex has full degree (simple graph)
  std::vector<int> deg(9, 0);
  for (auto& e : t.edges()) {
    deg[e.a]++;
    deg[e.b]++;
  }
  for (int d : deg) CHECK(d == 6);
  CHECK_THROWS_AS(TorusGraph(TorusPeriods({2, 0}, {0, 2}), LatticeKind::square),
                  std::invalid_argument);
}

TEST_CASE("partition function basics") {
  TorusGraph g(TorusPeriods({3, 0}, {0, 3}), LatticeKind::square);
  SUBCASE("infinite temperature counts configurations") {
    CHECK(partition_function(g, 0.0) == doctest::Approx(512.0).epsilon(1e-14));
  }
  SUBCASE("high-temperature expansion ties Z to the even-subgraph sum") {
    for (double beta : {0.3, g.critical_beta(), 0.7}) {
      double z = partition_function(g, beta);
      double zi = signed_subgraph_sum(g, std::tanh(beta)).zI;
      double expected = std::pow(std::cosh(beta), g.num_edges()) *
                        std::pow(2.0, g.num_vertices()) * zi;
      CHECK(z == doctest::Approx(expected).epsilon(1e-12));
    }
  }
  SUBCASE("flipping the four couplings around a plaquette is a gauge move") {
    // the four edges incident to vertex (1,1): flipping them all is absorbed
    // by negating sigma at that vertex
    uint64_t mask = 0;
    mask |= 1ull << g.edge_index({1, 1}, 0);
    mask |= 1ull << g.edge_index({1, 1}, 1);
    mask |= 1ull << g.edge_index({0, 1}, 0);
    mask |= 1ull << g.edge_index({1, 0}, 1);
    double z0 = partition_function(g, 0.44);
    double zf = partition_function(g, 0.44, mask);
    CHECK(zf == doctest::Approx(z0).epsilon(1e-13));
  }
  SUBCASE("budget enforced") {
    CHECK_THROWS_AS(partition_function(TorusGraph(TorusPeriods({6, 0}, {0, 6}),
                                                  LatticeKind::square),
                                       0.3),
                    std::invalid_argument);
  }
}

TEST_CASE("even subgraph enumeration") {
  TorusGraph g(TorusPeriods({3, 0}, {0, 3}), LatticeKind::square);
  EvenSubgraphEnumerator en(g);
  CHECK(en.cycle_dim() == 10);  // |E| - |V| + 1
  size_t count = 0;
  bool empty_seen = false;
  std::vector<int> deg(g.num_vertices());
  en.for_each([&](uint64_t m) {
    ++count;
    if (m == 0) empty_seen = true;
    std::fill(deg.begin(), deg.end(), 0);
    for (int e = 0; e < g.num_edges(); ++e)
      if (m & (1ull << e)) {
        deg[g.edges()[e].a]++;
        deg[g.edges()[e].b]++;
      }
    for (int d : deg)
      if (d % 2 != 0) FAIL("odd degree in an even subgraph");
  });
  CHECK(count == 1024);
  CHECK(empty_seen);
}

TEST_CASE("homology bits and the quadratic form") {
  TorusPeriods p({3, 0}, {0, 3});
  TorusGraph g(p, LatticeKind::square);
  ReferenceLines lines(p);
  // winding parities: the omega2-direction family detects omega1-winding
  auto loop_class = [&](uint64_t mask) {
    uint64_t c1 = lines.crossed_edges_mask(g, 1);  // -> phi10
    uint64_t c2 = lines.crossed_edges_mask(g, 0);  // -> phi01
    return std::pair<int, int>{std::popcount(mask & c1) & 1, std::popcount(mask & c2) & 1};
  };
  // horizontal loop (lifts to omega1): edges (0,0)H, (1,0)H, (2,0)H
  uint64_t loop_w1 = 0;
  for (int x = 0; x < 3; ++x) loop_w1 |= 1ull << g.edge_index({x, 0}, 0);
  // vertical loop (lifts to omega2)
  uint64_t loop_w2 = 0;
  for (int y = 0; y < 3; ++y) loop_w2 |= 1ull << g.edge_index({0, y}, 1);

  auto [a1, b1] = loop_class(loop_w1);
  CHECK(a1 == 1);
  CHECK(b1 == 0);
  auto [a2, b2] = loop_class(loop_w2);
  CHECK(a2 == 0);
  CHECK(b2 == 1);

  // rows of the q_ij table on the four homology classes, as (q00,q01,q10,q11)
  auto qrow = [&](int phi10, int phi01) {
    std::array<int, 4> r{};
    int k = 0;
    for (SectorLabel s : kAllSectors) r[k++] = q_form_sign(s, phi10, phi01) == 1 ? 0 : 1;
    return r;
  };
  CHECK(qrow(0, 0) == std::array<int, 4>{0, 0, 0, 0});
  CHECK(qrow(1, 0) == std::array<int, 4>{1, 1, 0, 0});  // loop winding omega1
  CHECK(qrow(0, 1) == std::array<int, 4>{1, 0, 1, 0});  // loop winding omega2
  CHECK(qrow(1, 1) == std::array<int, 4>{1, 0, 0, 1});
}

TEST_CASE("signed sums: exact zeros and Lemma-6 structure") {
  for (TorusPeriods p : {TorusPeriods({3, 0}, {0, 3}), TorusPeriods({4, 0}, {1, 3})}) {
    TorusGraph g(p, LatticeKind::square);
    ExactSectorSums ex = signed_subgraph_sum_critical(g);
    CHECK(ex.is_exact_zero(kSector00));
    CHECK_FALSE(ex.is_exact_zero(kSector01));
    CHECK(lemma6_pointwise_holds(g));
    SignedSubgraphSums sums = signed_subgraph_sum(g, 0.3);
    double combo = -sums.at(kSector00) + sums.at(kSector01) + sums.at(kSector10) +
                   sums.at(kSector11);
    CHECK(combo == doctest::Approx(2 * sums.zI).epsilon(1e-13));
  }
  // triangular critical point
  TorusGraph t(TorusPeriods({3, 0}, {0, 3}), LatticeKind::triangular);
  CHECK(signed_subgraph_sum_critical(t).is_exact_zero(kSector00));
}

TEST_CASE("energy correlations") {
  TorusGraph g(TorusPeriods({3, 0}, {0, 3}), LatticeKind::square);
  const double beta = g.critical_beta();
  SUBCASE("empty product is one") { CHECK(energy_correlation(g, beta, {}) == 1.0); }
  SUBCASE("distinct edges required") {
    CHECK_THROWS_AS(energy_correlation(g, beta, {0, 0}), std::invalid_argument);
  }
  SUBCASE("translation invariance of pairs") {
    int e1 = g.edge_index({0, 0}, 0), e2 = g.edge_index({1, 1}, 1);
    int f1 = g.edge_index({1, 2}, 0), f2 = g.edge_index({2, 0}, 1);  // shifted by (1,2)
    CHECK(energy_correlation(g, beta, {e1, e2}) ==
          doctest::Approx(energy_correlation(g, beta, {f1, f2})).epsilon(1e-13));
  }
  SUBCASE("Lemma-7 high-temperature representation at criticality") {
    const double ac = std::sqrt(2.0) - 1.0;
    SignedSubgraphSums sums = signed_subgraph_sum(g, ac);
    for (int dir : {0, 1}) {
      int e = g.edge_index({0, 0}, dir);
      double direct = energy_correlation(g, beta, {e});
      CHECK(ht_energy_sum(g, ac, e) / (std::sqrt(2.0) * sums.zI) ==
            doctest::Approx(direct).epsilon(1e-12));
      EdgeObservables b = b_observable(g, ac, e);
      double via = (b.at(kSector01) + b.at(kSector10) + b.at(kSector11) - b.at(kSector00)) /
                   (2 * std::sqrt(2.0) * sums.zI);
      CHECK(via == doctest::Approx(direct).epsilon(1e-12));
    }
  }
  SUBCASE("triangular high-temperature representation") {
    TorusGraph t(TorusPeriods({3, 0}, {0, 3}), LatticeKind::triangular);
    const double at = 2.0 - std::sqrt(3.0);
    double zi = signed_subgraph_sum(t, at).zI;
    int e = t.edge_index({0, 0}, 2);
    double direct = energy_correlation(t, t.critical_beta(), {e});
    CHECK(tri_ht_energy_sum(t, at, e) / zi == doctest::Approx(direct).epsilon(1e-12));
    EdgeObservables b = tri_b_observable(t, at, e);
    double via = (b.at(kSector01) + b.at(kSector10) + b.at(kSector11) - b.at(kSector00)) /
                 (2 * zi);
    CHECK(via == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("disorder correlators") {
  TorusGraph g(TorusPeriods({3, 0}, {0, 3}), LatticeKind::square);
  const double beta = g.critical_beta();
  SUBCASE("no path: adjacent two-point function") {
    int x = g.vertex_index({0, 0}), y = g.vertex_index({1, 0});
    double direct = disorder_correlator(g, beta, 0, {x, y}).value;
    int e = g.edge_index({0, 0}, 0);
    CHECK(direct == doctest::Approx(1.0 / std::sqrt(2.0) +
                                    energy_correlation(g, beta, {e}))
                        .epsilon(1e-13));
  }
  SUBCASE("odd spin count flagged as exact zero") {
    DisorderResult r = disorder_correlator(g, beta, 0, {0});
    CHECK(r.odd_spin_count);
    CHECK(r.value == 0.0);
  }
  SUBCASE("contractible loop with no enclosed insertions is invisible") {
    // the four dual edges around the primal vertex (1,1): flips the four
    // incident couplings; E[mu_loop] = 1 by the gauge move
    uint64_t mask = 0;
    mask |= 1ull << g.edge_index({1, 1}, 0);
    mask |= 1ull << g.edge_index({1, 1}, 1);
    mask |= 1ull << g.edge_index({0, 1}, 0);
    mask |= 1ull << g.edge_index({1, 0}, 1);
    CHECK(disorder_correlator(g, beta, mask, {}).value == doctest::Approx(1.0).epsilon(1e-13));
    // enclosing exactly one inserted spin flips the sign: (-1)^N with N = 1
    int far1 = g.vertex_index({1, 1});
    int far2 = g.vertex_index({0, 2});
    double with_loop = disorder_correlator(g, beta, mask, {far1, far2}).value;
    double without = disorder_correlator(g, beta, 0, {far1, far2}).value;
    CHECK(with_loop == doctest::Approx(-without).epsilon(1e-12));
  }
  SUBCASE("winding loops are representative independent") {
    TorusPeriods p({3, 0}, {0, 3});
    ReferenceLines l1(p);                    // base offsets (1/2, t)
    ReferenceLines l2(p, {2, 6}, {6, 2});    // shifted representatives
    for (int pq = 1; pq < 4; ++pq) {
      uint64_t m1 = disorder_loop_mask(g, pq & 1, pq >> 1, l1);
      uint64_t m2 = disorder_loop_mask(g, pq & 1, pq >> 1, l2);
      CHECK(disorder_correlator(g, beta, m1, {}).value ==
            doctest::Approx(disorder_correlator(g, beta, m2, {}).value).epsilon(1e-13));
    }
  }
}

TEST_CASE("sector disorder expectations") {
  SUBCASE("the four sector expectations sum to one") {
    TorusGraph g(TorusPeriods({4, 0}, {0, 3}), LatticeKind::square);
    double total = 0;
    for (SectorLabel s : kAllSectors) total += mu_sector_expectation(g, s);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("square-symmetric torus has equal mixed sectors") {
    TorusGraph g(TorusPeriods({3, 0}, {0, 3}), LatticeKind::square);
    CHECK(mu_sector_expectation(g, kSector01) ==
          doctest::Approx(mu_sector_expectation(g, kSector10)).epsilon(1e-13));
  }
  SUBCASE("E mu^(00) decays with the torus size") {
    double prev = 1.0;
    for (TorusPeriods p : {TorusPeriods({3, 0}, {0, 3}), TorusPeriods({4, 0}, {0, 4}),
                           TorusPeriods({4, 0}, {0, 5})}) {
      TorusGraph g(p, LatticeKind::square);
      double m00 = std::abs(mu_sector_expectation(g, kSector00));
      CHECK(m00 < prev);
      prev = m00;
    }
  }
  SUBCASE("Lemma 16: sector expectations equal exact partition ratios") {
    TorusGraph g(TorusPeriods({4, 0}, {1, 3}), LatticeKind::square);
    ExactSectorSums ex = signed_subgraph_sum_critical(g);
    double den =
        ex.value(kSector01, 2) + ex.value(kSector10, 2) + ex.value(kSector11, 2);
    for (SectorLabel s : kAllSectors)
      CHECK(mu_sector_expectation(g, s) ==
            doctest::Approx(ex.value(s, 2) / den).epsilon(1e-12));
  }
}

TEST_CASE("exact quadratic-integer arithmetic") {
  Z_sqrt2 ac = critical_alpha_sqrt2();
  Z_sqrt2 sq = ac * ac;
  CHECK(sq.a == 3);
  CHECK(sq.b == -2);  // (sqrt2 - 1)^2 = 3 - 2 sqrt2
  CHECK(std::abs(sq.to_double() - std::pow(std::sqrt(2.0) - 1, 2)) < 1e-15);
  Z_sqrt3 at = critical_alpha_sqrt3();
  Z_sqrt3 cube = at * at * at;
  CHECK(cube.a == 26);
  CHECK(cube.b == -15);  // (2 - sqrt3)^3 = 26 - 15 sqrt3
}

TEST_CASE("deterministic parallel enumeration") {
  TorusGraph g(TorusPeriods({5, 0}, {0, 5}), LatticeKind::square);
  double z1 = partition_function(g, 0.41, 0, 1);
  double z2 = partition_function(g, 0.41, 0, 2);
  CHECK(z1 == z2);  // bitwise: fixed block split and reduction order
  auto c1 = edge_class_correlations(g, g.critical_beta(), 1);
  auto c2 = edge_class_correlations(g, g.critical_beta(), 2);
  CHECK(c1[0] == c2[0]);
  CHECK(c1[1] == c2[1]);
}
