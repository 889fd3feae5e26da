// Command-line driver: exact-identity verification, continuum-limit sweeps,
// lattice-constant fits, continuum property suites, and the energy-difference
// study. Exit codes: 0 all pass, 1 any check failed, 2 usage/config error.

#include <iostream>

#include <CLI11.hpp>

#include "isingtorus/harness.hpp"

using namespace isingtorus;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out;
  std::vector<std::string> suites;
  int jobs = 0;  // 0 = take from config
};

Config load_config(const CommonOpts& o) {
  Config cfg;
  if (!o.config_path.empty()) cfg = parse_config_file(o.config_path);
  if (!o.suites.empty()) cfg.suites = o.suites;
  if (!o.out.empty()) cfg.out = o.out;
  if (o.jobs > 0) cfg.jobs = o.jobs;
  return cfg;
}

int finish(const Report& rep, const Config& cfg) {
  rep.print(std::cout);
  if (!cfg.out.empty()) {
    rep.write_csv(cfg.out);
    std::string json = cfg.out;
    auto dot = json.rfind('.');
    json = (dot == std::string::npos ? json : json.substr(0, dot)) + ".json";
    rep.write_json(json);
    std::cout << "wrote " << cfg.out << " and " << json << "\n";
  }
  return rep.all_passed() ? 0 : 1;
}

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "configuration file (key = value lines)");
  cmd->add_option("--suite", o.suites, "restrict to the named suites");
  cmd->add_option("--out", o.out, "CSV output path (a .json summary is written alongside)");
  cmd->add_option("--jobs", o.jobs, "worker threads for enumeration/sweeps");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact and asymptotic energy observables of the critical Ising model on tori"};
  app.require_subcommand(1);

  CommonOpts overify, osweep, olimits, ofit, odiff;
  CLI::App* verify = app.add_subcommand("verify", "run the exact-identity suites");
  add_common(verify, overify);
  CLI::App* sweep = app.add_subcommand("sweep", "mesh-size sweep toward the continuum limits");
  add_common(sweep, osweep);
  CLI::App* limits = app.add_subcommand("limits", "continuum formula property suites");
  add_common(limits, olimits);
  CLI::App* fitc = app.add_subcommand("fit-c", "fit the lattice constant in the det* asymptotics");
  add_common(fitc, ofit);
  CLI::App* diff = app.add_subcommand("diff-study", "energy difference vs the stress-tensor term");
  add_common(diff, odiff);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (verify->parsed()) {
      Config cfg = load_config(overify);
      return finish(run_verify(cfg), cfg);
    }
    if (sweep->parsed()) {
      Config cfg = load_config(osweep);
      return finish(run_sweep(cfg), cfg);
    }
    if (limits->parsed()) {
      Config cfg = load_config(olimits);
      return finish(run_limits(cfg), cfg);
    }
    if (fitc->parsed()) {
      Config cfg = load_config(ofit);
      FitConstantResult r = run_fit_constant(cfg);
      return finish(r.report, cfg);
    }
    if (diff->parsed()) {
      Config cfg = load_config(odiff);
      return finish(run_diff_study(cfg), cfg);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
