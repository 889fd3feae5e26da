#include "isingtorus/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "isingtorus/observables.hpp"
#include "isingtorus/spectral.hpp"

#include <json.hpp>

namespace isingtorus {

namespace {

constexpr double kPi = std::numbers::pi;

double rel_err(double value, double reference) {
  return std::abs(value - reference) / std::abs(reference);
}

std::string torus_name(const TorusPeriods& p) {
  std::ostringstream os;
  os << "(" << p.omega1.x << "," << p.omega1.y << ")x(" << p.omega2.x << "," << p.omega2.y << ")";
  return os.str();
}

ReportRow make_row(std::string quantity, const TorusPeriods& p, double alpha, double value,
                   double limit = std::nan("")) {
  ReportRow r;
  r.quantity = std::move(quantity);
  r.n = p.num_vertices();
  r.omega1 = p.omega1;
  r.omega2 = p.omega2;
  r.alpha = alpha;
  r.value = value;
  r.limit = limit;
  if (!std::isnan(limit)) {
    r.abs_err = std::abs(value - limit);
    r.rel_err = r.abs_err / std::abs(limit);
  }
  return r;
}

}  // namespace

// ---- Report ---------------------------------------------------------------------

bool Report::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

void Report::add_check(const std::string& name, double measured, double tolerance,
                       const std::string& detail) {
  checks.push_back({name, measured <= tolerance, measured, tolerance, detail});
}

void Report::add_flag(const std::string& name, bool ok, const std::string& detail) {
  checks.push_back({name, ok, std::nan(""), std::nan(""), detail});
}

void Report::merge(const Report& other) {
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
  checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

void Report::write_csv(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << "quantity,N,omega1x,omega1y,omega2x,omega2y,alpha,value,limit,abs_err,rel_err\n";
  char buf[64];
  auto num = [&](double v) -> std::string {
    if (std::isnan(v)) return "";
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  };
  for (const ReportRow& r : rows) {
    os << r.quantity << "," << r.n << "," << r.omega1.x << "," << r.omega1.y << "," << r.omega2.x
       << "," << r.omega2.y << "," << num(r.alpha) << "," << num(r.value) << "," << num(r.limit)
       << "," << num(r.abs_err) << "," << num(r.rel_err) << "\n";
  }
}

void Report::write_json(const std::string& path) const {
  nlohmann::json j;
  j["rows"] = nlohmann::json::array();
  for (const ReportRow& r : rows) {
    nlohmann::json row;
    row["quantity"] = r.quantity;
    row["N"] = r.n;
    row["omega1"] = {r.omega1.x, r.omega1.y};
    row["omega2"] = {r.omega2.x, r.omega2.y};
    if (!std::isnan(r.alpha)) row["alpha"] = r.alpha;
    row["value"] = r.value;
    if (!std::isnan(r.limit)) {
      row["limit"] = r.limit;
      row["abs_err"] = r.abs_err;
      row["rel_err"] = r.rel_err;
    }
    j["rows"].push_back(row);
  }
  j["checks"] = nlohmann::json::array();
  for (const CheckResult& c : checks) {
    nlohmann::json chk;
    chk["name"] = c.name;
    chk["passed"] = c.passed;
    if (!std::isnan(c.measured)) chk["measured"] = c.measured;
    if (!std::isnan(c.tolerance)) chk["tolerance"] = c.tolerance;
    if (!c.detail.empty()) chk["detail"] = c.detail;
    j["checks"].push_back(chk);
  }
  j["all_passed"] = all_passed();
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << j.dump(2) << "\n";
}

void Report::print(std::ostream& os) const {
  for (const CheckResult& c : checks) {
    os << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!std::isnan(c.measured)) os << "  measured=" << c.measured << " tol=" << c.tolerance;
    if (!c.detail.empty()) os << "  [" << c.detail << "]";
    os << "\n";
  }
}

// ---- config ---------------------------------------------------------------------

Config parse_config(std::istream& in) {
  Config cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    std::string eq;
    ls >> eq;
    if (eq != "=")
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    auto fail = [&](const std::string& msg) {
      throw ConfigError("line " + std::to_string(lineno) + ", key '" + key + "': " + msg);
    };
    if (key == "lattice") {
      std::string v;
      ls >> v;
      if (v == "square")
        cfg.lattice = LatticeKind::square;
      else if (v == "triangular")
        cfg.lattice = LatticeKind::triangular;
      else
        fail("expected square|triangular");
    } else if (key == "torus") {
      std::array<long long, 4> t{};
      if (!(ls >> t[0] >> t[1] >> t[2] >> t[3])) fail("expected 4 integers");
      cfg.tori.push_back(t);
    } else if (key == "tau") {
      double re, im;
      if (!(ls >> re >> im)) fail("expected 're im'");
      cfg.tau = {re, im};
    } else if (key == "sizes") {
      long long n;
      while (ls >> n) cfg.sizes.push_back(n);
      if (cfg.sizes.empty()) fail("expected at least one size");
    } else if (key == "alpha") {
      if (!(ls >> cfg.alpha)) fail("expected a number");
      if (!(cfg.alpha > 0 && cfg.alpha < 1)) fail("alpha must lie in (0,1)");
    } else if (key == "suite") {
      std::string v;
      ls >> v;
      cfg.suites.push_back(v);
    } else if (key == "out") {
      ls >> cfg.out;
    } else if (key == "jobs") {
      if (!(ls >> cfg.jobs) || cfg.jobs < 1) fail("expected a positive integer");
    } else {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

Config parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_config(in);
}

// ---- default tori -----------------------------------------------------------------

std::vector<TorusPeriods> default_square_tori() {
  return {TorusPeriods({3, 0}, {0, 3}), TorusPeriods({4, 0}, {0, 3}),
          TorusPeriods({4, 0}, {1, 3}), TorusPeriods({3, 1}, {-1, 4})};
}

std::vector<TorusPeriods> default_triangular_tori() {
  return {TorusPeriods({3, 0}, {0, 3})};
}

// ---- suites -----------------------------------------------------------------------

Report verify_theorem1(const std::vector<TorusPeriods>& tori, int jobs) {
  Report rep;
  for (const TorusPeriods& p : tori) {
    TorusGraph g(p, LatticeKind::square);
    std::vector<double> corr = edge_class_correlations(g, g.critical_beta(), jobs);
    double brute = corr[0] + corr[1] - 2.0 * g.epsilon_offset();
    double spectral = energy_sum_exact(p);
    rep.rows.push_back(make_row("energy_sum", p, std::sqrt(2.0) - 1.0, spectral, brute));
    rep.add_check("theorem1 " + torus_name(p), rel_err(spectral, brute), 1e-10);
  }
  return rep;
}

Report verify_theorem8(const std::vector<TorusPeriods>& tori) {
  Report rep;
  const double ac = std::sqrt(2.0) - 1.0;
  for (const TorusPeriods& p : tori) {
    TorusGraph g(p, LatticeKind::square);
    for (double a : {0.2, ac, 0.6}) {
      const bool crit = (a == ac);
      CouplingParameter alpha = crit ? CouplingParameter::critical_square() : CouplingParameter(a);
      SignedSubgraphSums sums = signed_subgraph_sum(g, a);
      ExactSectorSums exact;
      if (crit) exact = signed_subgraph_sum_critical(g);
      for (SectorLabel s : kAllSectors) {
        double spectral = signed_partition_function(alpha, p, s);
        double oracle = crit ? exact.value(s, 2) : sums.at(s);
        std::ostringstream name;
        name << "theorem8 " << torus_name(p) << " a=" << a << " sector " << s.i << s.j;
        if (crit && s == kSector00) {
          rep.add_flag(name.str() + " exactly zero",
                       exact.is_exact_zero(s) && det_kw(alpha, p, s).is_zero(),
                       "both sides exactly zero at alpha_c");
        } else {
          rep.add_check(name.str(), rel_err(spectral, oracle), 1e-10);
        }
        rep.rows.push_back(make_row("Z_" + std::to_string(s.i) + std::to_string(s.j), p, a,
                                    spectral, oracle));
      }
    }
  }
  return rep;
}

Report verify_lemma6(const std::vector<TorusPeriods>& tori) {
  Report rep;
  const double a = 0.3;
  for (const TorusPeriods& p : tori) {
    TorusGraph g(p, LatticeKind::square);
    rep.add_flag("lemma6 pointwise " + torus_name(p), lemma6_pointwise_holds(g),
                 "exact integer identity over all even subgraphs");
    SignedSubgraphSums sums = signed_subgraph_sum(g, a);
    CouplingParameter alpha(a);
    double spectral = 0;
    for (SectorLabel s : kAllSectors)
      spectral += (s == kSector00 ? -1.0 : 1.0) * signed_partition_function(alpha, p, s);
    rep.add_check("lemma6 2Z^I " + torus_name(p), rel_err(spectral, 2 * sums.zI), 1e-10);
    rep.rows.push_back(make_row("two_zI", p, a, spectral, 2 * sums.zI));
  }
  return rep;
}

Report verify_lemma7(const std::vector<TorusPeriods>& tori, int jobs) {
  Report rep;
  const double ac = std::sqrt(2.0) - 1.0;
  for (const TorusPeriods& p : tori) {
    TorusGraph g(p, LatticeKind::square);
    SignedSubgraphSums sums = signed_subgraph_sum(g, ac);
    for (int dir = 0; dir < 2; ++dir) {
      int edge = g.edge_index({0, 0}, dir);
      double direct = energy_correlation(g, g.critical_beta(), {edge}, jobs);
      double ht = ht_energy_sum(g, ac, edge) / (std::sqrt(2.0) * sums.zI);
      EdgeObservables b = b_observable(g, ac, edge);
      double via_sectors = (b.at(kSector01) + b.at(kSector10) + b.at(kSector11) -
                            b.at(kSector00)) /
                           (2 * std::sqrt(2.0) * sums.zI);
      std::string nm = std::string("lemma7 ") + (dir == 0 ? "H " : "V ") + torus_name(p);
      rep.add_check(nm, rel_err(ht, direct), 1e-12);
      rep.add_check(nm + " via sectors", rel_err(via_sectors, direct), 1e-12);
      rep.rows.push_back(make_row(dir == 0 ? "eps_H" : "eps_V", p, ac, ht, direct));
    }
  }
  return rep;
}

Report verify_lemma16(const std::vector<TorusPeriods>& tori, int jobs) {
  Report rep;
  for (const TorusPeriods& p : tori) {
    TorusGraph g(p, LatticeKind::square);
    ExactSectorSums exact = signed_subgraph_sum_critical(g);
    double denom = exact.value(kSector01, 2) + exact.value(kSector10, 2) + exact.value(kSector11, 2);
    double total = 0;
    for (SectorLabel s : kAllSectors) {
      double spins = mu_sector_expectation(g, s, jobs);
      double subgraphs = exact.value(s, 2) / denom;
      total += spins;
      std::ostringstream name;
      name << "lemma16 mu^" << s.i << s.j << " " << torus_name(p);
      rep.add_check(name.str(), std::abs(spins - subgraphs), 1e-12);
      rep.rows.push_back(make_row("mu_" + std::to_string(s.i) + std::to_string(s.j), p,
                                  std::sqrt(2.0) - 1.0, spins, subgraphs));
    }
    rep.add_check("lemma16 sum to one " + torus_name(p), std::abs(total - 1.0), 1e-13);
  }
  return rep;
}

Report verify_observables(const std::vector<TorusPeriods>& bases, int jobs) {
  Report rep;
  for (const TorusPeriods& p : bases) {
    TorusGraph g(p, LatticeKind::square);
    const double beta = g.critical_beta();
    ObservableField f(g, {}, jobs);
    const complexd eta_a = f.eta_a();
    const std::string nm = " " + torus_name(p);
    const double scale = 1.0;

    rep.add_check("observables continuation" + nm, f.continuation_mismatch(), 1e-12 * scale);

    // Lemma 14 special values (k = 0)
    rep.add_check("F(a,a+) = eta_a" + nm, std::abs(f.value_at_split(0, 0, +1) - eta_a), 1e-13);
    rep.add_check("F(a,a-) = -eta_a" + nm, std::abs(f.value_at_split(0, 0, -1) + eta_a), 1e-13);
    double worst = 0;
    for (int sp = 0; sp < 2; ++sp)
      for (int sq = 0; sq < 2; ++sq) {
        if (sp == 0 && sq == 0) continue;
        double mu = mu_pq_expectation(g, sp, sq, jobs);
        worst = std::max(worst, std::abs(f.value_at_split(sp, sq, +1) + eta_a * mu));
        worst = std::max(worst, std::abs(f.value_at_split(sp, sq, -1) - eta_a * mu));
      }
    rep.add_check("F(a,a^{pm}+shift) = -+eta_a E[mu_pq]" + nm, worst, 1e-13);

    const complexd i_sqrt2_eta = complexd(0, 1) * std::sqrt(2.0) * eta_a;
    double eL = energy_correlation(g, beta, {f.edge_L()}, jobs);
    double eR = energy_correlation(g, beta, {f.edge_R()}, jobs);
    rep.add_check("F(a,a_L) = -i sqrt2 eta_a E[eps_V]" + nm,
                  std::abs(f.value(f.corner_L()) + i_sqrt2_eta * eL), 1e-13);
    rep.add_check("F(a,a_R) = -i sqrt2 eta_a E[eps_H]" + nm,
                  std::abs(f.value(f.corner_R()) + i_sqrt2_eta * eR), 1e-13);

    // shifted near values F(a, a_L + p w1 + q w2) = +i sqrt2 eta_a E[mu_pq eps_L];
    // the loops run between rows/columns 1 and 2 so they do not separate the
    // endpoints of the origin edges carrying the energy insertion
    ReferenceLines off_lines(p, {2, 6}, {6, 2});
    double worst_near2 = 0;
    for (int sp = 0; sp < 2; ++sp)
      for (int sq = 0; sq < 2; ++sq) {
        if (sp == 0 && sq == 0) continue;
        uint64_t mask = disorder_loop_mask(g, sp, sq, off_lines);
        double mueL = disorder_correlator(g, beta, mask, {}, {f.edge_L()}, jobs).value;
        CornerIndex cL = f.corner_L();
        complexd v = f.value(f.geom().norm(
            {cL.p + 2ll * sp * f.geom().nx(), cL.q + 2ll * sq * f.geom().ny()}));
        worst_near2 = std::max(worst_near2, std::abs(v - i_sqrt2_eta * mueL));
      }
    rep.add_check("F(a,a_L+shift) = +i sqrt2 eta_a E[mu_pq eps_V]" + nm, worst_near2, 1e-13);

    // phase condition and s-holomorphicity of F and every F^(ij)
    rep.add_check("phase condition" + nm, phase_condition_violation(f), 1e-12);
    ResidualReport raw = sholomorphy_residuals(f);
    rep.add_check("s-holomorphic (raw)" + nm, raw.max_residual, 1e-12);
    for (SectorLabel s : kAllSectors) {
      ResidualReport rr = sholomorphy_residuals(f, s);
      std::ostringstream name;
      name << "s-holomorphic F^" << s.i << s.j << nm;
      rep.add_check(name.str(), rr.max_residual, 1e-12);
    }

    // sector special values F^(ij)(a, a+) = eta_a E[mu^(ij)]
    double worst_sector = 0;
    for (SectorLabel s : kAllSectors) {
      double mu = mu_sector_expectation(g, s, jobs);
      worst_sector =
          std::max(worst_sector, std::abs(f.sector_value_at_split(s, +1) - eta_a * mu));
    }
    rep.add_check("F^(ij)(a,a+) = eta_a E[mu^(ij)]" + nm, worst_sector, 1e-13);

    // antisymmetry of the sector fields at sample corners
    double worst_anti = 0;
    for (SectorLabel s : kAllSectors) {
      for (CornerIndex c : {CornerIndex{1, 0}, CornerIndex{2, 3}, CornerIndex{5, 2}}) {
        complexd base = f.sector_value(s, c);
        for (int sp = 0; sp < 2; ++sp)
          for (int sq = 0; sq < 2; ++sq) {
            complexd shifted = f.sector_value(
                s, f.geom().norm({c.p + 2ll * sp * f.geom().nx(), c.q + 2ll * sq * f.geom().ny()}));
            double sgn = ((s.i * sp + s.j * sq) % 2) ? -1.0 : 1.0;
            worst_anti = std::max(worst_anti, std::abs(shifted - sgn * base));
          }
      }
    }
    rep.add_check("sector antisymmetry" + nm, worst_anti, 1e-13);

    // F^(00) constancy, vanishing sublattice, and the L/R equality
    ConstancyReport cc = constancy_check_00(f);
    rep.add_check("F^(00) projection constancy" + nm, cc.max_deviation, 1e-12);
    rep.add_check("F^(00) vanishing sublattice" + nm, cc.max_on_sublattice, 1e-12);
    rep.add_check("F^(00)(a,a_L) = F^(00)(a,a_R)" + nm,
                  std::abs(f.sector_value(kSector00, f.corner_L()) -
                           f.sector_value(kSector00, f.corner_R())),
                  1e-13);
    double mu00L = mu_sector_energy_expectation(g, kSector00, {f.edge_L()}, off_lines, jobs);
    double mu00R = mu_sector_energy_expectation(g, kSector00, {f.edge_R()}, off_lines, jobs);
    rep.add_check("E[mu^00 eps_V] = E[mu^00 eps_H]" + nm, std::abs(mu00L - mu00R), 1e-13);
    // the constant relates to the L-value: F^00(a, a_L) = -i sqrt2 eta_a E[mu^00 eps_L]
    rep.add_check("F^(00)(a,a_L) matches E[mu^00 eps_V]" + nm,
                  std::abs(f.sector_value(kSector00, f.corner_L()) + i_sqrt2_eta * mu00L), 1e-13);

    // energy difference from the sector fields equals the direct difference
    std::vector<double> corr = edge_class_correlations(g, beta, jobs);
    double direct = corr[0] - corr[1];
    double assembled = energy_difference_discrete(g, jobs);
    rep.add_check("energy difference" + nm, std::abs(assembled - direct), 1e-12);
    rep.rows.push_back(make_row("energy_difference", p, std::sqrt(2.0) - 1.0, assembled, direct));

    // one k = 1 field: initial values carry E[eps_e1]
    int e1 = g.edge_index({1, 1}, 0);
    ObservableField f1(g, {e1}, jobs);
    double ee1 = energy_correlation(g, beta, {e1}, jobs);
    rep.add_check("k=1 F(a,a+) = eta_a E[eps_e1]" + nm,
                  std::abs(f1.value_at_split(0, 0, +1) - eta_a * ee1), 1e-13);
    ResidualReport r1 = sholomorphy_residuals(f1);
    rep.add_check("k=1 s-holomorphic away from e_1" + nm, r1.max_residual, 1e-12);
  }
  return rep;
}

Report verify_theorem13(const std::vector<TorusPeriods>& tori, int jobs) {
  Report rep;
  const double at = 2.0 - std::sqrt(3.0);
  for (const TorusPeriods& p : tori) {
    TorusGraph g(p, LatticeKind::triangular);
    std::vector<double> corr = edge_class_correlations(g, g.critical_beta(), jobs);
    double brute = corr[0] + corr[1] + corr[2] - 3.0 * g.epsilon_offset();
    double spectral = tri_energy_sum_exact(p);
    rep.rows.push_back(make_row("tri_energy_sum", p, at, spectral, brute));
    rep.add_check("theorem13 " + torus_name(p), rel_err(spectral, brute), 1e-10);

    ExactSectorSums exact = signed_subgraph_sum_critical(g);
    rep.add_flag("triangular Z^(00)(alpha_tri) exactly zero " + torus_name(p),
                 exact.is_exact_zero(kSector00));
  }
  // derivative identities of the triangular symbol, pointwise in q
  CouplingParameter atc = CouplingParameter::critical_triangular();
  rep.add_flag("v_tri(alpha_tri, 0) exactly zero",
               tri_symbol_v(atc, MomentumPoint{0, 0, 1}) == 0.0);
  std::mt19937_64 rng(20250810);
  std::uniform_int_distribution<long long> dist(1, 96);
  const double h = 1e-5;
  const double c_deriv = 2.0 + 1.0 / std::sqrt(3.0);
  double worst = 0;
  auto richardson = [&](auto&& fn, double x) {
    double d1 = (fn(x + h) - fn(x - h)) / (2 * h);
    double d2 = (fn(x + h / 2) - fn(x - h / 2)) / h;
    return (4 * d2 - d1) / 3;
  };
  for (int trial = 0; trial < 24; ++trial) {
    MomentumPoint q{dist(rng), dist(rng), 97};
    auto vtri = [&](double a) { return tri_symbol_v(CouplingParameter(a), q); };
    double lhs = richardson(vtri, at);
    double rhs = c_deriv * tri_symbol_v(atc, q);
    worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(rhs)));
  }
  rep.add_check("tri derivative identity pointwise", worst, 1e-8);
  {
    MomentumPoint q0{0, 0, 1};
    auto vtri0 = [&](double a) { return tri_symbol_v(CouplingParameter(a), q0); };
    double d2 = (vtri0(at + h) - 2 * vtri0(at) + vtri0(at - h)) / (h * h);
    double d2h = (vtri0(at + h / 2) - 2 * vtri0(at) + vtri0(at - h / 2)) / (h * h / 4);
    double second = (4 * d2h - d2) / 3;
    rep.add_check("tri second derivative at q=0", std::abs(second - 144.0 * at) / (144.0 * at),
                  1e-7);
  }
  return rep;
}

Report run_verify(const Config& cfg) {
  std::vector<TorusPeriods> sq, tri;
  for (const auto& t : cfg.tori) {
    TorusPeriods p({t[0], t[1]}, {t[2], t[3]});
    (cfg.lattice == LatticeKind::triangular ? tri : sq).push_back(p);
  }
  if (sq.empty() && cfg.lattice == LatticeKind::square) sq = default_square_tori();
  if (tri.empty()) tri = default_triangular_tori();

  auto wants = [&](const std::string& s) {
    return cfg.suites.empty() ||
           std::find(cfg.suites.begin(), cfg.suites.end(), s) != cfg.suites.end();
  };
  Report rep;
  if (wants("theorem1")) rep.merge(verify_theorem1(sq, cfg.jobs));
  if (wants("theorem8")) rep.merge(verify_theorem8(sq));
  if (wants("lemma6")) rep.merge(verify_lemma6(sq));
  if (wants("lemma7")) rep.merge(verify_lemma7(sq, cfg.jobs));
  if (wants("lemma16")) rep.merge(verify_lemma16(sq, cfg.jobs));
  if (wants("observables")) {
    std::vector<TorusPeriods> bases = {TorusPeriods({3, 0}, {0, 3}), TorusPeriods({4, 0}, {0, 3})};
    rep.merge(verify_observables(bases, cfg.jobs));
  }
  if (wants("theorem13")) rep.merge(verify_theorem13(tri, cfg.jobs));
  return rep;
}

// ---- sweeps -----------------------------------------------------------------------

TorusPeriods periods_for_tau(complexd tau, long long n) {
  return TorusPeriods({n, 0},
                      {std::llround(n * tau.real()), std::llround(n * tau.imag())});
}

Report run_sweep(const Config& cfg) {
  Report rep;
  std::vector<long long> sizes = cfg.sizes.empty()
                                     ? std::vector<long long>{64, 128, 256, 512}
                                     : cfg.sizes;
  for (long long n : sizes)
    if (n > 4096) throw std::invalid_argument("sweep size beyond 4096 not supported");
  ModularParameter tau(cfg.tau);
  SectorWeights w = sector_weights(tau);
  const double limit_sum = energy_sum_limit(tau, tau.tau.imag());
  std::vector<double> sum_err, ratio_err;
  for (long long n : sizes) {
    TorusPeriods p = periods_for_tau(cfg.tau, n);
    double esum = static_cast<double>(n) * energy_sum_exact(p);
    rep.rows.push_back(make_row("N_energy_sum", p, std::sqrt(2.0) - 1.0, esum, limit_sum));
    sum_err.push_back(rel_err(esum, limit_sum));
    SectorRatios r = critical_sector_ratios(p);
    double e01 = std::abs(r.r01 - w.normalized(kSector01));
    double e10 = std::abs(r.r10 - w.normalized(kSector10));
    double e11 = std::abs(r.r11 - w.normalized(kSector11));
    rep.rows.push_back(make_row("sector_ratio_01", p, std::sqrt(2.0) - 1.0, r.r01,
                                w.normalized(kSector01)));
    rep.rows.push_back(make_row("sector_ratio_10", p, std::sqrt(2.0) - 1.0, r.r10,
                                w.normalized(kSector10)));
    rep.rows.push_back(make_row("sector_ratio_11", p, std::sqrt(2.0) - 1.0, r.r11,
                                w.normalized(kSector11)));
    ratio_err.push_back(std::max({e01, e10, e11}));
    rep.rows.push_back(make_row("logdet_lap00", p, std::sqrt(2.0) - 1.0,
                                det_laplacian(p, kSector00, true).log_mag));
  }
  // convergence checks over the configured ladder
  bool monotone = true;
  for (size_t i = 1; i < ratio_err.size(); ++i)
    if (sizes[i - 1] >= 128 && ratio_err[i] >= ratio_err[i - 1]) monotone = false;
  rep.add_flag("sector ratios converge monotonically beyond N=128", monotone);
  rep.add_check("sector ratios at largest N", ratio_err.back(), 1e-3);
  bool sum_decreasing = true;
  for (size_t i = 1; i < sum_err.size(); ++i)
    if (sum_err[i] >= sum_err[i - 1]) sum_decreasing = false;
  rep.add_flag("N*energy_sum error decreasing", sum_decreasing);
  rep.add_check("N*energy_sum at largest N", sum_err.back(), 1e-2);
  return rep;
}

// ---- fit of the lattice constant C ---------------------------------------------------

namespace {

struct FitData {
  double C = 0, intercept = 0;
};

FitData fit_C(complexd tau, const std::vector<long long>& sizes, Report& rep) {
  ModularParameter mp(tau);
  const double eta4 = std::pow(std::abs(dedekind_eta(mp)), 4.0);
  const double imtau = tau.imag();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double area = imtau;  // omega1 = 1
  for (long long n : sizes) {
    TorusPeriods p = periods_for_tau(tau, n);
    double logdet = det_laplacian(p, kSector00, true).log_mag;
    // log det* = C |T^delta| + log(delta^{-2} Im(tau) |T| |eta|^4) + o(1)
    double y = logdet - std::log(static_cast<double>(n) * n * imtau * area * eta4);
    double x = static_cast<double>(p.num_vertices());
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    rep.rows.push_back(make_row("fitC_detrended_input", p, std::nan(""), y));
  }
  const double m = static_cast<double>(sizes.size());
  double C = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  double b = (sy - C * sx) / m;
  return {C, b};
}

}  // namespace

FitConstantResult run_fit_constant(const Config& cfg) {
  FitConstantResult out{};
  std::vector<long long> sizes =
      cfg.sizes.empty() ? std::vector<long long>{32, 64, 128, 256} : cfg.sizes;
  if (sizes.size() < 4) throw std::invalid_argument("fit-c needs at least 4 sizes");
  const complexd taus[2] = {cfg.tau, {cfg.tau.real(), 2 * cfg.tau.imag()}};
  for (int t = 0; t < 2; ++t) {
    FitData fd = fit_C(taus[t], sizes, out.report);
    out.c_per_tau[t] = fd.C;
    std::ostringstream nm;
    nm << "fitted C at tau=(" << taus[t].real() << "," << taus[t].imag() << ")";
    ReportRow row;
    row.quantity = nm.str();
    row.n = sizes.back();
    row.value = fd.C;
    out.report.rows.push_back(row);
  }
  out.report.add_check("C agrees across tau", std::abs(out.c_per_tau[0] - out.c_per_tau[1]),
                       1e-4);

  // de-trended determinant vs Kronecker at the largest size, first tau
  {
    ModularParameter mp(taus[0]);
    const double eta4 = std::pow(std::abs(dedekind_eta(mp)), 4.0);
    const double imtau = taus[0].imag();
    long long n = sizes.back();
    TorusPeriods p = periods_for_tau(taus[0], n);
    double logdet = det_laplacian(p, kSector00, true).log_mag;
    double detrended =
        std::exp(logdet - out.c_per_tau[0] * static_cast<double>(p.num_vertices()) -
                 std::log(static_cast<double>(n) * n));
    double target = imtau * imtau * eta4;
    out.detrended_rel_err = rel_err(detrended, target);
    out.report.add_check("de-trended det* matches Im(tau)|T||eta|^4", out.detrended_rel_err,
                         1e-2);
    out.report.rows.push_back(make_row("detrended_det", p, std::nan(""), detrended, target));
  }

  // doubling consistency: det Lap^10(w1,w2) * det* Lap^00(w1,w2) = det* Lap^00(2w1,w2)
  {
    TorusPeriods p = periods_for_tau(taus[0], 8);
    TorusPeriods p2({2 * p.omega1.x, 2 * p.omega1.y}, p.omega2);
    double lhs = det_laplacian(p, kSector10, false).log_mag +
                 det_laplacian(p, kSector00, true).log_mag;
    double rhs = det_laplacian(p2, kSector00, true).log_mag;
    out.doubling_identity_err = std::abs(lhs - rhs);
    out.report.add_check("doubling identity det^10 = det*00(2w1)/det*00(w1)",
                         out.doubling_identity_err, 1e-9);
  }
  return out;
}

// ---- limits suite ---------------------------------------------------------------------

namespace {

complexd gauss_det(std::vector<complexd> a, int n) {
  complexd det = 1.0;
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(a[i * n + k]) > std::abs(a[p * n + k])) p = i;
    if (std::abs(a[p * n + k]) == 0.0) return 0.0;
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(a[p * n + j], a[k * n + j]);
      det = -det;
    }
    det *= a[k * n + k];
    for (int i = k + 1; i < n; ++i) {
      complexd f = a[i * n + k] / a[k * n + k];
      for (int j = k; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
    }
  }
  return det;
}

complexd skew_det(const SkewMatrix& m) {
  const int n = m.size();
  std::vector<complexd> a(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[i * n + j] = m.at(i, j);
  return gauss_det(std::move(a), n);
}

}  // namespace

Report run_limits(const Config& cfg) {
  Report rep;
  (void)cfg;
  // stress tensor symmetries
  {
    PeriodPair p(complexd(1.0, 0.2), complexd(0.3, 1.4));
    PeriodPair pr(complexd(-0.2, 1.0), complexd(-1.4, 0.3));  // (i w1, i w2)
    rep.add_check("H(i w1, i w2) = -H(w1, w2)",
                  std::abs(stress_tensor_H(pr) + stress_tensor_H(p)), 1e-12);
    PeriodPair sq(complexd(1.0, 0.0), complexd(0.0, 1.0));
    rep.add_check("H = 0 on the square torus", std::abs(stress_tensor_H(sq)), 1e-12);
  }
  // modular invariance of the energy-sum limit at fixed area
  for (complexd tau : {complexd(0, 1), complexd(0, 2), complexd(0.5, 1)}) {
    double base = energy_sum_limit(ModularParameter(tau), 1.0);
    double inv = energy_sum_limit(ModularParameter(-1.0 / tau), 1.0);
    double shift = energy_sum_limit(ModularParameter(tau + 1.0), 1.0);
    std::ostringstream nm;
    nm << "modular invariance at tau=(" << tau.real() << "," << tau.imag() << ")";
    rep.add_check(nm.str() + " S", std::abs(base - inv) / base, 1e-12);
    rep.add_check(nm.str() + " T", std::abs(base - shift) / base, 1e-12);
  }
  // Pfaffian contracts
  {
    SkewMatrix m2(2);
    m2.set_upper(0, 1, complexd(0.7, -0.3));
    rep.add_check("Pf 2x2", std::abs(pfaffian(m2) - complexd(0.7, -0.3)), 1e-15);
    SkewMatrix m4(4);
    complexd a12(0.3, 1.1), a13(-0.4, 0.2), a14(0.9, -0.5), a23(1.2, 0.4), a24(-0.1, 0.8),
        a34(0.6, -0.7);
    m4.set_upper(0, 1, a12);
    m4.set_upper(0, 2, a13);
    m4.set_upper(0, 3, a14);
    m4.set_upper(1, 2, a23);
    m4.set_upper(1, 3, a24);
    m4.set_upper(2, 3, a34);
    rep.add_check("Pf 4x4 textbook",
                  std::abs(pfaffian(m4) - (a12 * a34 - a13 * a24 + a14 * a23)), 1e-14);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1, 1);
    SkewMatrix m8(8);
    for (int i = 0; i < 8; ++i)
      for (int j = i + 1; j < 8; ++j) m8.set_upper(i, j, complexd(u(rng), u(rng)));
    complexd pf = pfaffian(m8);
    rep.add_check("Pf^2 = det (8x8)", std::abs(pf * pf - skew_det(m8)) / std::abs(skew_det(m8)),
                  1e-10);
  }
  // multipoint consistency and properties
  {
    PeriodPair p(complexd(1, 0), complexd(0, 1));
    ModularParameter tau = p.tau();
    double k1 = multipoint_limit({complexd(0.31, 0.42)}, p);
    double cor4 = energy_one_point_limit(tau, 1.0);
    rep.add_check("k=1 multipoint equals pi * Corollary-4 limit", std::abs(k1 - kPi * cor4),
                  1e-12);
    double k2 = multipoint_limit({complexd(0.1, 0.12), complexd(0.62, 0.55)}, p);
    double k2s = multipoint_limit({complexd(0.62, 0.55), complexd(0.1, 0.12)}, p);
    rep.add_flag("k=2 positive at separated points", k2 > 0);
    rep.add_check("k=2 symmetric under swap", std::abs(k2 - k2s), 1e-12);
    double k3 = multipoint_limit(
        {complexd(0.11, 0.17), complexd(0.52, 0.43), complexd(0.29, 0.71)}, p);
    rep.add_flag("k=3 finite real value", std::isfinite(k3));
    // Pf^2 = det on the assembled odd-k matrix is implied by the pfaffian
    // contract checks above; record the k=3 value for the report
    ReportRow row;
    row.quantity = "multipoint_k3";
    row.n = 0;
    row.value = k3;
    rep.rows.push_back(row);
  }
  // residue and periodicity validation of the continuum observables
  {
    PeriodPair p(complexd(1, 0), complexd(0.1, 1.2));
    complexd eta_a = std::polar(1.0, kPi / 8);
    complexd a(0.21, 0.33);
    for (SectorLabel s : {kSector10, kSector01, kSector11, kSector00}) {
      std::vector<complexd> energies = {complexd(0.61, 0.72)};
      if (s == kSector00 && energies.size() % 2 == 0) energies.push_back(complexd(0.35, 0.9));
      ResidueReport rr = residue_validator(s, a, energies, p, eta_a);
      std::ostringstream nm;
      nm << "residues sector " << s.i << s.j;
      rep.add_check(nm.str() + " at e_m", rr.max_em_error, 1e-8);
      rep.add_check(nm.str() + " at a", rr.residue_a_error, 1e-8);
      rep.add_check(nm.str() + " constant term", rr.constant_a_error, 1e-8);
      rep.add_check(nm.str() + " sum", rr.residue_sum, 1e-8);
      rep.add_check(nm.str() + " periodicity",
                    periodicity_violation(s, a, energies, p, eta_a), 1e-10);
    }
    // f^(00) with k = 0 is constant in z
    complexd f1 = f_continuum(kSector00, a, complexd(0.5, 0.61), {}, p, eta_a);
    complexd f2 = f_continuum(kSector00, a, complexd(0.82, 0.15), {}, p, eta_a);
    rep.add_check("f^(00) constant in z (k=0)", std::abs(f1 - f2), 1e-12);
    // Laurent data: numeric derivative of the regularized kernel matches the
    // theta-combination (pi^2/6 w1^2) {...}
    for (SectorLabel s : {kSector01, kSector10, kSector11}) {
      JacobiKind kind = s == kSector01 ? JacobiKind::cs
                        : s == kSector10 ? JacobiKind::ns
                                         : JacobiKind::ds;
      auto reg = [&](complexd z) { return jacobi_cnd(kind, z, p) - 1.0 / z; };
      // derivative of the regularized kernel at 0 by the Cauchy formula
      // (finite differences are wrecked by the 1/z cancellation here)
      const double r = 0.3;
      complexd d = 0;
      const int nn = 64;
      for (int jj = 0; jj < nn; ++jj) {
        complexd zj = std::polar(r, 2 * kPi * jj / nn);
        d += reg(zj) / zj;
      }
      d /= double(nn);
      complexd expected = sector_kernel_derivative(s, p);
      std::ostringstream nm;
      nm << "Laurent derivative sector " << s.i << s.j;
      rep.add_check(nm.str(), std::abs(d - expected) / std::abs(expected), 1e-8);
    }
  }
  return rep;
}

// ---- difference study -------------------------------------------------------------------

Report run_diff_study(const Config& cfg) {
  Report rep;
  std::vector<std::array<long long, 4>> tori = cfg.tori;
  if (tori.empty())
    tori = {{3, 0, 0, 3}, {3, 0, 0, 4}, {3, 0, 0, 6}, {4, 0, 0, 6}, {3, 1, -2, 6}, {4, 0, 0, 8}};
  struct Entry {
    TorusPeriods p;
    double ratio;
    double d, pred;
  };
  std::vector<Entry> entries;
  for (const auto& t : tori) {
    TorusPeriods p({t[0], t[1]}, {t[2], t[3]});
    if (p.num_vertices() > kMaxEnumVertices)
      throw std::invalid_argument("diff-study torus beyond the enumeration budget");
    TorusGraph g(p, LatticeKind::square);
    std::vector<double> corr = edge_class_correlations(g, g.critical_beta(), cfg.jobs);
    double d = corr[0] - corr[1];  // E eps_H - E eps_V
    PeriodPair pp(complexd(double(p.omega1.x), double(p.omega1.y)),
                  complexd(double(p.omega2.x), double(p.omega2.y)));
    double pred = energy_difference_prediction(pp, 1.0);
    ReportRow row = make_row("energy_difference", p, std::sqrt(2.0) - 1.0, d, pred);
    rep.rows.push_back(row);
    double ratio = (pred != 0.0) ? d / pred : std::nan("");
    entries.push_back({p, ratio, d, pred});
    if (p.omega1.y == 0 && p.omega2.x == 0 && p.omega1.x == p.omega2.y)
      rep.add_check("square torus difference vanishes " + torus_name(p), std::abs(d), 1e-13);
  }
  // sign agreement at the 4:3 and 2:1 aspect ratios
  for (const Entry& e : entries) {
    if (e.p.omega1.y != 0 || e.p.omega2.x != 0) continue;
    long long nx = e.p.omega1.x, ny = e.p.omega2.y;
    if (3 * ny == 4 * nx || ny == 2 * nx) {
      std::ostringstream nm;
      nm << "sign match " << torus_name(e.p);
      rep.add_flag(nm.str(), (e.d > 0) == (e.pred > 0) && e.d != 0);
    }
  }
  // first-order Richardson in 1/N over the rectangular 2:1 family
  std::vector<std::pair<long long, double>> fam;
  for (const Entry& e : entries)
    if (e.p.omega1.y == 0 && e.p.omega2.x == 0 && e.p.omega2.y == 2 * e.p.omega1.x)
      fam.push_back({e.p.omega1.x, e.ratio});
  if (fam.size() >= 2) {
    std::sort(fam.begin(), fam.end());
    auto [n1, r1] = fam[fam.size() - 2];
    auto [n2, r2] = fam[fam.size() - 1];
    double extrap = (double(n2) * r2 - double(n1) * r1) / double(n2 - n1);
    ReportRow row;
    row.quantity = "richardson_ratio_2to1";
    row.n = n2;
    row.value = extrap;
    row.limit = 1.0;
    row.abs_err = std::abs(extrap - 1.0);
    row.rel_err = row.abs_err;
    rep.rows.push_back(row);
    rep.add_check("extrapolated ratio within 25%", std::abs(extrap - 1.0), 0.25);
  }
  return rep;
}

}  // namespace isingtorus
