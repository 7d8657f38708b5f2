#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "samp/denoiser.hpp"
#include "samp/model.hpp"
#include "samp/solvers.hpp"
#include "samp/spectral.hpp"

namespace samp {

std::string_view version();

enum class SolverId { Amp, SampOptimal, SampSuboptimal, SampFinite, Ep, Adatap };

std::string_view to_string(SolverId id);
// amp | samp-opt | samp-sub | samp-finite | ep | adatap
SolverId parse_solver_id(std::string_view text);
// iid | row-orth
EnsembleKind parse_ensemble(std::string_view text);

struct Rational {
  std::int64_t num = 1;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;
};

// Accepts "p/q", integers and finite decimals ("0.5" -> 1/2); the result is
// reduced and strictly positive.
Rational parse_rational(std::string_view text);

double db_to_linear(double db);

struct ExperimentConfig {
  EnsembleKind ensemble = EnsembleKind::RowOrthogonal;
  Rational alpha{1, 3};
  Index K = 1024;
  PriorSpec prior = PriorSpec::bernoulli_gaussian(0.1);
  double sigma_w2 = 1e-2;
  SolverId solver = SolverId::SampSuboptimal;
  SolverConfig solver_config{};
  int trials = 100;
  std::uint64_t seed = 1;
  // Worker threads; 0 picks std::thread::hardware_concurrency().
  int threads = 0;
  double ci_level = 0.95;

  // N = alpha K; throws InvalidArgument unless integral.
  Index rows() const;
  void validate() const;
};

struct TrialRecord {
  int trial = 0;
  std::uint64_t seed = 0;
  std::vector<double> squared_error;  // ||mu^t - x||^2 for t = 0..iterations
  double signal_energy = 0.0;         // ||x||^2
  Termination reason = Termination::MaxIters;
  int iterations = 0;
  std::string message;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<double> nmsee_db;
  std::vector<double> ci_low_db;
  std::vector<double> ci_high_db;
  int trials = 0;
  int diverged = 0;
  int excluded = 0;  // zero-signal trials without a defined nmsee
  std::vector<TrialRecord> records;
  std::string version;

  std::string label() const;
};

// ||mu - x||^2 / ||x||^2; nullopt when x = 0.
std::optional<double> nmsee(const Vector& mu, const Vector& x_true);

inline constexpr double kDbFloor = -120.0;
// 10 log10(value), floored at kDbFloor (also for zero and negative input).
double to_db(double linear);

// Student-t interval for the mean of `values`.  level == 0 gives the
// degenerate interval at the mean.
std::pair<double, double> confidence_interval(std::span<const double> values, double level);

// Runs the solver selected by `id` on one instance.
Trajectory run_solver(SolverId id, const SystemInstance& instance, const Denoiser& denoiser,
                      const SpectralModel& spectral, const SolverConfig& config);

SpectralModel spectral_model_for(EnsembleKind kind, double alpha);

TrialRecord run_trial(const ExperimentConfig& config, int trial);

// Trials run concurrently; aggregation is an ordered reduction by trial
// index, so the report does not depend on scheduling.  Throws Error when
// every trial diverged.
ExperimentReport run_experiment(const ExperimentConfig& config);

// Builds the per-iteration curves from trial records (exposed for tests).
void aggregate(ExperimentReport& report);

}  // namespace samp
