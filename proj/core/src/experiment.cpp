#include "samp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>
#include <tuple>

#include <boost/math/distributions/students_t.hpp>

#include "samp/errors.hpp"
#include "samp/rng.hpp"

#ifndef SAMP_VERSION
#define SAMP_VERSION "0.0.0"
#endif

namespace samp {

std::string_view version() { return SAMP_VERSION; }

std::string_view to_string(SolverId id) {
  switch (id) {
    case SolverId::Amp: return "amp";
    case SolverId::SampOptimal: return "samp-opt";
    case SolverId::SampSuboptimal: return "samp-sub";
    case SolverId::SampFinite: return "samp-finite";
    case SolverId::Ep: return "ep";
    case SolverId::Adatap: return "adatap";
  }
  return "unknown";
}

SolverId parse_solver_id(std::string_view text) {
  for (SolverId id : {SolverId::Amp, SolverId::SampOptimal, SolverId::SampSuboptimal,
                      SolverId::SampFinite, SolverId::Ep, SolverId::Adatap}) {
    if (text == to_string(id)) return id;
  }
  throw InvalidArgument("unknown solver '" + std::string(text) +
                        "' (expected amp, samp-opt, samp-sub, samp-finite, ep or adatap)");
}

EnsembleKind parse_ensemble(std::string_view text) {
  if (text == "iid") return EnsembleKind::IidGaussian;
  if (text == "row-orth") return EnsembleKind::RowOrthogonal;
  throw InvalidArgument("unknown ensemble '" + std::string(text) + "' (expected iid or row-orth)");
}

std::string Rational::str() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

namespace {

std::int64_t parse_int(std::string_view text, std::string_view whole) {
  std::int64_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw InvalidArgument("not a rational number: '" + std::string(whole) + "'");
  }
  return value;
}

Rational reduced(std::int64_t num, std::int64_t den, std::string_view whole) {
  if (den <= 0 || num <= 0) {
    throw InvalidArgument("rational must be strictly positive: '" + std::string(whole) + "'");
  }
  const std::int64_t g = std::gcd(num, den);
  return {num / g, den / g};
}

}  // namespace

Rational parse_rational(std::string_view text) {
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    return reduced(parse_int(text.substr(0, slash), text), parse_int(text.substr(slash + 1), text),
                   text);
  }
  if (const auto dot = text.find('.'); dot != std::string_view::npos) {
    const std::string_view frac = text.substr(dot + 1);
    if (frac.size() > 15) throw InvalidArgument("too many decimals in '" + std::string(text) + "'");
    const std::int64_t whole = dot == 0 ? 0 : parse_int(text.substr(0, dot), text);
    const std::int64_t f = frac.empty() ? 0 : parse_int(frac, text);
    if (f < 0) throw InvalidArgument("not a rational number: '" + std::string(text) + "'");
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    return reduced(whole * scale + f, scale, text);
  }
  return reduced(parse_int(text, text), 1, text);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

Index ExperimentConfig::rows() const {
  if (alpha.den <= 0 || alpha.num <= 0) throw InvalidArgument("alpha must be positive");
  if ((static_cast<std::int64_t>(K) * alpha.num) % alpha.den != 0) {
    throw InvalidArgument("alpha * K must be an integer (alpha = " + alpha.str() +
                          ", K = " + std::to_string(K) + ")");
  }
  return static_cast<Index>(static_cast<std::int64_t>(K) * alpha.num / alpha.den);
}

void ExperimentConfig::validate() const {
  if (K < 1) throw InvalidArgument("K must be positive");
  if (trials < 1) throw InvalidArgument("trials must be at least 1");
  if (!(sigma_w2 > 0.0) || !std::isfinite(sigma_w2)) {
    throw InvalidArgument("sigma_w2 must be positive and finite");
  }
  if (threads < 0) throw InvalidArgument("threads must be nonnegative");
  if (!(ci_level >= 0.0 && ci_level < 1.0)) throw InvalidArgument("ci level must lie in [0, 1)");
  prior.validate();
  solver_config.validate();
  EnsembleSpec{ensemble, rows(), K}.validate();
}

std::string ExperimentReport::label() const {
  return std::string(to_string(config.solver)) + " " + std::string(to_string(config.ensemble)) +
         " a=" + config.alpha.str();
}

std::optional<double> nmsee(const Vector& mu, const Vector& x_true) {
  if (mu.size() != x_true.size()) throw InvalidArgument("nmsee: length mismatch");
  const double energy = x_true.squaredNorm();
  if (!(energy > 0.0)) return std::nullopt;
  return (mu - x_true).squaredNorm() / energy;
}

double to_db(double linear) {
  if (!(linear > 0.0)) return kDbFloor;
  return std::max(kDbFloor, 10.0 * std::log10(linear));
}

std::pair<double, double> confidence_interval(std::span<const double> values, double level) {
  if (values.size() < 2) throw InvalidArgument("confidence interval needs at least two values");
  if (!(level >= 0.0 && level < 1.0)) throw InvalidArgument("confidence level must lie in [0, 1)");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (level == 0.0) return {mean, mean};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  const boost::math::students_t dist(n - 1.0);
  const double q = boost::math::quantile(dist, 0.5 + 0.5 * level);
  const double half = q * sd / std::sqrt(n);
  return {mean - half, mean + half};
}

SpectralModel spectral_model_for(EnsembleKind kind, double alpha) {
  return kind == EnsembleKind::IidGaussian ? SpectralModel::iid_gaussian(alpha)
                                           : SpectralModel::row_orthogonal(alpha);
}

Trajectory run_solver(SolverId id, const SystemInstance& instance, const Denoiser& denoiser,
                      const SpectralModel& spectral, const SolverConfig& config) {
  switch (id) {
    case SolverId::Amp: return run_amp(instance, denoiser, config);
    case SolverId::SampOptimal:
      return run_samp(instance, denoiser, spectral, config, LambdaMode::Optimal);
    case SolverId::SampSuboptimal:
      return run_samp(instance, denoiser, spectral, config, LambdaMode::Suboptimal);
    case SolverId::SampFinite: return run_samp_finite(instance, denoiser, config);
    case SolverId::Ep: return run_ep(instance, denoiser, config);
    case SolverId::Adatap: return run_adatap(instance, denoiser, config);
  }
  throw InvalidArgument("unknown solver id");
}

TrialRecord run_trial(const ExperimentConfig& config, int trial) {
  TrialRecord record;
  record.trial = trial;
  record.seed = derive_seed(config.seed, Stream::Trial, static_cast<std::uint64_t>(trial));
  const EnsembleSpec ensemble{config.ensemble, config.rows(), config.K};
  const SystemInstance instance =
      generate_instance(ensemble, config.prior, config.sigma_w2, record.seed);
  const Denoiser denoiser(config.prior);
  const SpectralModel spectral = spectral_model_for(config.ensemble, instance.alpha);
  const Trajectory trajectory =
      run_solver(config.solver, instance, denoiser, spectral, config.solver_config);

  record.signal_energy = instance.x_true.squaredNorm();
  record.squared_error.reserve(trajectory.snapshots.size());
  for (const auto& snap : trajectory.snapshots) {
    record.squared_error.push_back((snap.mu - instance.x_true).squaredNorm());
  }
  record.reason = trajectory.reason;
  record.iterations = trajectory.iterations();
  record.message = trajectory.message;
  return record;
}

void aggregate(ExperimentReport& report) {
  const std::size_t length = static_cast<std::size_t>(report.config.solver_config.max_iters) + 1;
  std::vector<const TrialRecord*> used;
  report.diverged = 0;
  report.excluded = 0;
  for (const auto& r : report.records) {
    if (r.reason == Termination::Diverged) {
      ++report.diverged;
    } else if (!(r.signal_energy > 0.0) || r.squared_error.empty()) {
      ++report.excluded;
    } else {
      used.push_back(&r);
    }
  }
  report.trials = static_cast<int>(report.records.size());
  report.nmsee_db.clear();
  report.ci_low_db.clear();
  report.ci_high_db.clear();
  if (used.empty()) return;

  double energy = 0.0;
  for (const auto* r : used) energy += r->signal_energy;
  const double mean_energy = energy / static_cast<double>(used.size());
  std::vector<double> linearized(used.size());

  for (std::size_t t = 0; t < length; ++t) {
    // Early-terminated trials hold their final estimate.
    double err = 0.0;
    for (const auto* r : used) err += r->squared_error[std::min(t, r->squared_error.size() - 1)];
    const double ratio = err / energy;
    double low = ratio;
    double high = ratio;
    if (used.size() >= 2) {
      // Delta-method linearization of the ratio of sums; the values average
      // exactly to `ratio`.
      for (std::size_t i = 0; i < used.size(); ++i) {
        const auto* r = used[i];
        const double e = r->squared_error[std::min(t, r->squared_error.size() - 1)];
        linearized[i] = ratio + (e - ratio * r->signal_energy) / mean_energy;
      }
      std::tie(low, high) = confidence_interval(linearized, report.config.ci_level);
      low = std::min(low, ratio);
      high = std::max(high, ratio);
    }
    report.nmsee_db.push_back(to_db(ratio));
    report.ci_low_db.push_back(to_db(low));
    report.ci_high_db.push_back(to_db(high));
  }
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentReport report;
  report.config = config;
  report.version = std::string(version());
  report.records.resize(static_cast<std::size_t>(config.trials));

  int workers = config.threads > 0 ? config.threads
                                   : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, config.trials);

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int i = next++; i < config.trials; i = next++) {
      try {
        report.records[static_cast<std::size_t>(i)] = run_trial(config, i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = config.trials;
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  aggregate(report);
  if (report.diverged == report.trials) {
    throw AllTrialsDiverged("all " + std::to_string(report.trials) + " trials diverged");
  }
  return report;
}

}  // namespace samp
