#include "pflow/cli.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "pflow/config.hpp"
#include "pflow/coupling.hpp"
#include "pflow/errors.hpp"
#include "pflow/initial.hpp"
#include "pflow/timeseries.hpp"
#include "pflow/zero_dim.hpp"

namespace pflow {
namespace {

struct Options {
  std::string config;
  std::string out = "pflow_out";
  std::string series;
  int threads = 0;
  std::optional<std::uint64_t> seed;
};

RunConfig configured(const Options& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (o.seed) cfg.initial.seed = *o.seed;
  check_config(cfg);
  return cfg;
}

int cmd_run(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = configured(o);
  try {
    const RunSummary s = run(cfg, o.out);
    out << s.report << '\n';
    if (!s.invariants_ok) {
      err << "invariant tolerances exceeded; see " << o.out << "/report.json\n";
      return exit_invariant;
    }
    return exit_ok;
  } catch (const InvariantBreach& e) {
    err << "run aborted: " << e.what() << '\n';
    return exit_invariant;
  }
}

int cmd_validate(const Options& o, std::ostream& out) {
  const RunConfig cfg = configured(o);
  const auto report = validate_coefficients(make_default_coefficients(cfg.coefficients));
  out << format_report(report);
  return report.all_pass() ? exit_ok : exit_invariant;
}

int cmd_zero_dim(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = configured(o);
  const double r0 = cfg.coefficients.r0;
  const double r_inf = cfg.grid.r_inf > 0.0 ? cfg.grid.r_inf : select_r_inf(cfg.initial, r0, cfg.theta1_star);
  const ChainGrid chain(r0, r_inf, cfg.grid.nr, cfg.grid.r_stretch);
  const ZeroDimModel model(chain, cfg.tau_const, make_default_coefficients(cfg.coefficients));

  ZeroDimState s{initial_psi_profile(chain, cfg.initial), cfg.initial.phi_level, 0.0};

  std::vector<ZeroDimSample> traj;
  try {
    traj = model.integrate(s, cfg.time.t_final, cfg.time.zero_dim_dt, cfg.output.series_every, cfg.time.cfl_r);
  } catch (const CflViolation& e) {
    err << e.what() << '\n';
    return exit_invariant;
  }

  std::filesystem::create_directories(o.out);
  const auto path = std::filesystem::path(o.out) / "zero_dim.csv";
  std::ofstream csv(path);
  csv.precision(17);
  csv << "t,phi,m0,m1,mass\n";
  for (const auto& p : traj) csv << p.t << ',' << p.phi << ',' << p.m0 << ',' << p.m1 << ',' << p.mass << '\n';

  const double mass0 = traj.front().mass;
  double drift = 0.0;
  for (const auto& p : traj) drift = std::max(drift, std::abs(p.mass - mass0) / mass0);
  const double psi_min = *std::min_element(s.psi.begin(), s.psi.end());
  out << "zero-dim: t=" << s.t << " phi=" << s.phi << " mass drift=" << drift << " min psi=" << psi_min
      << " -> " << path.string() << '\n';
  if (drift > cfg.tolerances.tol_mass || psi_min < -cfg.tolerances.tol_pos || s.phi < -cfg.tolerances.tol_pos) {
    err << "zero-dim invariant tolerances exceeded\n";
    return exit_invariant;
  }
  return exit_ok;
}

int cmd_check(const Options& o, std::ostream& out) {
  const RunConfig cfg = configured(o);
  const auto rows = read_timeseries(o.series);
  const auto violations = check_invariants(rows, cfg.tolerances);
  if (violations.empty()) {
    out << "all invariants hold over " << rows.size() << " rows\n";
    return exit_ok;
  }
  for (const auto& v : violations)
    out << "FAIL " << v.invariant << ": first at step " << v.first_step << ", " << v.count
        << " rows, worst " << v.worst << '\n';
  return exit_invariant;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coupled polymer / monomer / fluid solver", "pflow"};
  app.require_subcommand(1);
  Options o;

  const auto common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config, "configuration file (defaults when omitted)")->check(CLI::ExistingFile);
    sub->add_option("--threads", o.threads, "OpenMP thread count (0 keeps the runtime default)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", o.seed, "seed for randomized initial data, overrides the config");
  };
  auto* run_cmd = app.add_subcommand("run", "integrate the coupled model");
  common(run_cmd);
  run_cmd->add_option("--out", o.out, "output directory");
  auto* validate_cmd = app.add_subcommand("validate", "check the coefficient family against (A1)-(A6)");
  common(validate_cmd);
  auto* zero_cmd = app.add_subcommand("zero-dim", "integrate the spatially homogeneous model");
  common(zero_cmd);
  zero_cmd->add_option("--out", o.out, "output directory");
  auto* check_cmd = app.add_subcommand("check-invariants", "replay a time series against the tolerances");
  common(check_cmd);
  check_cmd->add_option("series", o.series, "timeseries.csv to check")->required()->check(CLI::ExistingFile);
  auto* dump_cmd = app.add_subcommand("dump-defaults", "print the default configuration");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return exit_usage;
  }

  if (o.threads > 0) omp_set_num_threads(o.threads);
  try {
    if (*run_cmd) return cmd_run(o, out, err);
    if (*validate_cmd) return cmd_validate(o, out);
    if (*zero_cmd) return cmd_zero_dim(o, out, err);
    if (*check_cmd) return cmd_check(o, out);
    if (*dump_cmd) {
      out << dump_config(RunConfig{});
      return exit_ok;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_usage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_invariant;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  }
  err << app.help();
  return exit_usage;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace pflow
