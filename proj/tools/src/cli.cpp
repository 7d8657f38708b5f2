#include "samp_cli/cli.hpp"

#include <cmath>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "samp/errors.hpp"
#include "samp/experiment.hpp"
#include "samp/report_io.hpp"

namespace samp::cli {

namespace {

struct RunOptions {
  std::string solver = "samp-sub";
  std::string ensemble = "row-orth";
  std::string alpha = "1/3";
  long k = 1023;
  std::string prior = "bg";
  double rho = 0.1;
  std::optional<double> snr_db;
  std::optional<double> sigma_w2;
  int trials = 100;
  int iters = 100;
  double tol = 1e-6;
  double damping = 1.0;
  bool damp_sites = false;
  std::string schedule = "parallel";
  std::uint64_t seed = 1;
  int threads = 0;
  double ci_level = 0.95;
  std::string out;
  std::string plot;
};

ExperimentConfig to_config(const RunOptions& o) {
  ExperimentConfig c;
  c.solver = parse_solver_id(o.solver);
  c.ensemble = parse_ensemble(o.ensemble);
  c.alpha = parse_rational(o.alpha);
  c.K = o.k;
  if (o.prior == "bg") {
    c.prior = PriorSpec::bernoulli_gaussian(o.rho);
  } else if (o.prior == "gaussian") {
    c.prior = PriorSpec::gaussian_unit();
  } else {
    throw InvalidArgument("unknown prior '" + o.prior + "' (expected bg or gaussian)");
  }
  if (o.snr_db) {
    c.sigma_w2 = db_to_linear(*o.snr_db);
  } else if (o.sigma_w2) {
    c.sigma_w2 = *o.sigma_w2;
  } else {
    c.sigma_w2 = db_to_linear(-20.0);
  }
  c.solver_config.max_iters = o.iters;
  c.solver_config.tol = o.tol;
  c.solver_config.damping = o.damping;
  c.solver_config.damp_site_precisions = o.damp_sites;
  if (o.schedule == "parallel") {
    c.solver_config.schedule = UpdateSchedule::Parallel;
  } else if (o.schedule == "sequential") {
    c.solver_config.schedule = UpdateSchedule::Sequential;
  } else {
    throw InvalidArgument("unknown schedule '" + o.schedule + "'");
  }
  c.trials = o.trials;
  c.seed = o.seed;
  c.threads = o.threads;
  c.ci_level = o.ci_level;
  c.validate();
  c.solver_config.validate();
  return c;
}

int execute(const RunOptions& o, std::ostream& out, std::ostream& err) {
  ExperimentConfig config;
  try {
    config = to_config(o);
  } catch (const InvalidArgument& e) {
    err << "samp: invalid configuration: " << e.what() << "\n";
    return kExitConfig;
  }
  ExperimentReport report;
  try {
    report = run_experiment(config);
  } catch (const AllTrialsDiverged& e) {
    err << "samp: " << e.what() << "\n";
    return kExitAllDiverged;
  }
  const std::filesystem::path csv = o.out;
  if (csv.has_parent_path()) std::filesystem::create_directories(csv.parent_path());
  export_csv(report, csv);
  write_manifest(std::span(&report, 1), csv);
  if (!o.plot.empty()) {
    const std::filesystem::path svg = o.plot;
    if (svg.has_parent_path()) std::filesystem::create_directories(svg.parent_path());
    export_plot(std::span(&report, 1), svg);
  }
  int converged = 0;
  for (const auto& r : report.records) converged += r.reason == Termination::Converged;
  out << report.label() << ": final nmsee " << report.nmsee_db.back() << " dB, converged "
      << converged << "/" << report.trials << ", diverged " << report.diverged << "\n";
  out << "wrote " << csv.string() << " and " << manifest_path_for(csv).string();
  if (!o.plot.empty()) out << " and " << o.plot;
  out << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Monte Carlo runner for S-AMP, AMP, EP and ADATAP on compressed sensing instances",
               "samp"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);

  RunOptions o;
  auto* run = app.add_subcommand("run", "run trials and write the nmsee curve");
  run->add_option("--solver", o.solver, "amp | samp-opt | samp-sub | samp-finite | ep | adatap")
      ->check(CLI::IsMember({"amp", "samp-opt", "samp-sub", "samp-finite", "ep", "adatap"}));
  run->add_option("--ensemble", o.ensemble, "iid | row-orth")
      ->check(CLI::IsMember({"iid", "row-orth"}));
  run->add_option("--alpha", o.alpha, "measurement ratio N/K, e.g. 1/3");
  run->add_option("--k", o.k, "number of unknowns K")->check(CLI::PositiveNumber);
  run->add_option("--prior", o.prior, "bg | gaussian")->check(CLI::IsMember({"bg", "gaussian"}));
  run->add_option("--rho", o.rho, "Bernoulli-Gaussian sparsity");
  auto* snr = run->add_option("--snr-db", o.snr_db, "noise variance in dB (default -20)");
  auto* s2 = run->add_option("--sigma-w2", o.sigma_w2, "noise variance")->check(CLI::PositiveNumber);
  snr->excludes(s2);
  run->add_option("--trials", o.trials, "number of trials")->check(CLI::PositiveNumber);
  run->add_option("--iters", o.iters, "iteration budget per trial")->check(CLI::PositiveNumber);
  run->add_option("--tol", o.tol, "relative change stopping threshold");
  run->add_option("--damping", o.damping, "damping epsilon in (0, 1]");
  run->add_flag("--damp-sites", o.damp_sites, "damp site precisions with the same epsilon");
  run->add_option("--schedule", o.schedule, "parallel | sequential (EP / ADATAP)")
      ->check(CLI::IsMember({"parallel", "sequential"}));
  run->add_option("--seed", o.seed, "master seed");
  run->add_option("--threads", o.threads, "worker threads, 0 = hardware concurrency")
      ->check(CLI::NonNegativeNumber);
  run->add_option("--ci-level", o.ci_level, "confidence level of the interval");
  run->add_option("--out", o.out, "CSV output path")->required();
  run->add_option("--plot", o.plot, "optional SVG output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostream& stream = e.get_exit_code() == 0 ? out : err;
    const int code = app.exit(e, stream, stream);
    return code == 0 ? kExitOk : kExitConfig;
  }
  try {
    return execute(o, out, err);
  } catch (const Error& e) {
    err << "samp: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "samp: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace samp::cli
