#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "isingtorus/continuum.hpp"
#include "isingtorus/geometry.hpp"
#include "isingtorus/oracle.hpp"

namespace isingtorus {

// ---- reports -------------------------------------------------------------------

struct ReportRow {
  std::string quantity;
  long long n = 0;  // characteristic linear size (or vertex count for skew tori)
  Vec2i omega1, omega2;
  double alpha = std::nan("");
  double value = std::nan("");
  double limit = std::nan("");
  double abs_err = std::nan("");
  double rel_err = std::nan("");
};

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = std::nan("");   // the quantity compared against the tolerance
  double tolerance = std::nan("");
  std::string detail;
};

struct Report {
  std::vector<ReportRow> rows;
  std::vector<CheckResult> checks;

  bool all_passed() const;
  void add_check(const std::string& name, double measured, double tolerance,
                 const std::string& detail = "");
  // a check that must be exactly true (no tolerance semantics)
  void add_flag(const std::string& name, bool ok, const std::string& detail = "");
  void merge(const Report& other);

  // fixed schema: quantity,N,omega1x,omega1y,omega2x,omega2y,alpha,value,limit,abs_err,rel_err
  void write_csv(const std::string& path) const;
  void write_json(const std::string& path) const;
  void print(std::ostream& os) const;
};

// ---- configuration ----------------------------------------------------------------

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  LatticeKind lattice = LatticeKind::square;
  std::vector<std::array<long long, 4>> tori;  // omega1x omega1y omega2x omega2y
  complexd tau{0.0, 1.0};
  std::vector<long long> sizes;
  double alpha = std::nan("");
  std::vector<std::string> suites;
  std::string out;
  int jobs = 1;
};

// Structured text: one `key = value` per line, '#' comments. Unknown keys are
// errors (diagnosed with their line number), not warnings.
Config parse_config(std::istream& in);
Config parse_config_file(const std::string& path);

// ---- verification suites ------------------------------------------------------------

std::vector<TorusPeriods> default_square_tori();    // 3x3, 4x3, (4,0)x(1,3), (3,1)x(-1,4)
std::vector<TorusPeriods> default_triangular_tori();  // 3x3

Report verify_theorem1(const std::vector<TorusPeriods>& tori, int jobs);
Report verify_theorem8(const std::vector<TorusPeriods>& tori);
Report verify_lemma6(const std::vector<TorusPeriods>& tori);
Report verify_lemma7(const std::vector<TorusPeriods>& tori, int jobs);
Report verify_lemma16(const std::vector<TorusPeriods>& tori, int jobs);
Report verify_observables(const std::vector<TorusPeriods>& bases, int jobs);
Report verify_theorem13(const std::vector<TorusPeriods>& tori, int jobs);

// run the named suite ("theorem1", "theorem8", "lemma6", "lemma7", "lemma16",
// "observables", "theorem13"), or all of them for an empty list
Report run_verify(const Config& cfg);

// ---- sweeps and fits ------------------------------------------------------------------

// Integer periods realizing tau at linear size N: omega1 = (N, 0),
// omega2 = round(N tau).
TorusPeriods periods_for_tau(complexd tau, long long n);

// Per N: N * energy_sum_exact vs the continuum limit, sector ratios vs the
// limiting weights, and log det* Lap^00.
Report run_sweep(const Config& cfg);

struct FitConstantResult {
  double c_per_tau[2];      // fitted C at each tau
  double detrended_rel_err;  // vs Im(tau)|T||eta|^4 at the largest size, first tau
  double doubling_identity_err;
  Report report;
};
FitConstantResult run_fit_constant(const Config& cfg);

// continuum property suites (H symmetries, modular invariance, Pfaffians,
// multipoint consistency, residues, periodicity)
Report run_limits(const Config& cfg);

// discrete energy difference vs the stress-tensor prediction, with sign
// checks and a first-order Richardson extrapolation over the 2:1 family
Report run_diff_study(const Config& cfg);

}  // namespace isingtorus
