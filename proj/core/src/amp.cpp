#include <cmath>
#include <stdexcept>
#include <string>

#include "samp/errors.hpp"
#include "samp/solvers.hpp"
#include "site_common.hpp"

namespace samp {

std::string_view to_string(Termination reason) {
  switch (reason) {
    case Termination::MaxIters: return "max-iters";
    case Termination::Converged: return "converged";
    case Termination::Diverged: return "diverged";
  }
  return "unknown";
}

void SolverConfig::validate() const {
  if (max_iters < 1) throw InvalidArgument("max_iters must be positive");
  if (!(tol > 0.0)) throw InvalidArgument("tol must be positive");
  if (!(damping > 0.0 && damping <= 1.0)) throw InvalidArgument("damping must lie in (0, 1]");
  if (!(inner_tol > 0.0)) throw InvalidArgument("inner_tol must be positive");
  if (inner_max < 1) throw InvalidArgument("inner_max must be positive");
}

namespace {

using detail::relative_change;

bool diverged(const Vector& mu) { return detail::exploded(mu); }

void check_instance(const SystemInstance& instance) {
  if (instance.A.rows() != instance.y.size() || instance.A.cols() < 1 || instance.A.rows() < 1) {
    throw InvalidArgument("inconsistent instance dimensions");
  }
}

void finish(Trajectory& trajectory, const Vector& mu) {
  IterationSnapshot last;
  last.mu = mu;
  trajectory.snapshots.push_back(std::move(last));
  trajectory.final_state.mu = mu;
  trajectory.final_state.iteration = trajectory.iterations();
}

}  // namespace

Trajectory run_amp(const SystemInstance& instance, const Denoiser& denoiser,
                   const SolverConfig& config) {
  config.validate();
  check_instance(instance);
  const Index K = instance.cols();
  const double alpha = instance.alpha;
  const double sigma_w2 = instance.sigma_w2;

  Trajectory trajectory;
  Vector mu = Vector::Zero(K);
  Vector z_prev = Vector::Zero(instance.rows());
  Vector eta(K), eta_prime(K);
  double eta_prime_mean_prev = 0.0;
  double lambda = 0.0;

  for (int t = 0; t < config.max_iters; ++t) {
    const double memory = eta_prime_mean_prev / alpha;
    Vector z = instance.y - instance.A * mu + memory * z_prev;
    const Vector kappa = instance.A.transpose() * z + mu;
    lambda = (t == 0) ? 1.0 / (sigma_w2 + denoiser.prior().second_moment() / alpha)
                      : 1.0 / (sigma_w2 + eta_prime_mean_prev / (alpha * lambda));
    denoiser.apply(kappa, lambda, eta, eta_prime);
    const double eta_prime_mean = eta_prime.mean();

    IterationSnapshot snap;
    snap.mu = mu;
    snap.z = z;
    snap.lambda = lambda;
    snap.eta_prime_mean = eta_prime_mean;
    snap.memory = snap.memory_min = snap.memory_max = memory;
    snap.change = relative_change(eta, mu);
    trajectory.snapshots.push_back(std::move(snap));
    trajectory.final_state.z = z;
    trajectory.final_state.lambda_scalar = lambda;

    if (diverged(eta)) {
      trajectory.reason = Termination::Diverged;
      trajectory.message = "non-finite or exploding estimate at iteration " + std::to_string(t);
      break;
    }
    const double change = trajectory.snapshots.back().change;
    mu = eta;
    z_prev = std::move(z);
    eta_prime_mean_prev = eta_prime_mean;
    if (change < config.tol) {
      trajectory.reason = Termination::Converged;
      break;
    }
  }
  finish(trajectory, mu);
  trajectory.final_state.lambda_vec =
      Vector::Constant(K, trajectory.final_state.lambda_scalar);
  return trajectory;
}

Trajectory run_samp(const SystemInstance& instance, const Denoiser& denoiser,
                    const SpectralModel& spectral, const SolverConfig& config, LambdaMode mode) {
  config.validate();
  check_instance(instance);
  if (std::abs(spectral.alpha() - instance.alpha) > 1e-12 * instance.alpha) {
    throw InvalidArgument("spectral model alpha " + std::to_string(spectral.alpha()) +
                          " does not match instance alpha " + std::to_string(instance.alpha));
  }
  const Index K = instance.cols();
  const double sigma_w2 = instance.sigma_w2;

  Trajectory trajectory;
  Vector mu = Vector::Zero(K);
  Vector z_prev = Vector::Zero(instance.rows());
  Vector eta(K), eta_prime(K);
  double memory = 0.0;
  double lambda = initial_lambda(denoiser.prior().second_moment(), spectral, sigma_w2);
  double eta_prime_mean_prev = 0.0;

  for (int t = 0; t < config.max_iters; ++t) {
    Vector z = instance.y - instance.A * mu + memory * z_prev;
    const Vector kappa = instance.A.transpose() * z + mu;

    double next_memory = 0.0;
    try {
      if (mode == LambdaMode::Optimal) {
        lambda = solve_lambda_optimal(kappa, denoiser, spectral, sigma_w2, config.inner_tol,
                                      config.inner_max, lambda);
      } else if (t > 0) {
        lambda = solve_lambda_suboptimal(lambda, eta_prime_mean_prev, spectral, sigma_w2);
      }
    } catch (const DomainError& e) {
      trajectory.reason = Termination::Diverged;
      trajectory.message = std::string("precision update left the S-transform domain: ") + e.what();
      break;
    }
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
      trajectory.reason = Termination::Diverged;
      trajectory.message = "nonpositive precision at iteration " + std::to_string(t);
      break;
    }
    denoiser.apply(kappa, lambda, eta, eta_prime);
    const double eta_prime_mean = eta_prime.mean();

    try {
      const double s = spectral.s_transform(-eta_prime_mean);
      next_memory = onsager_coefficient(s);
      if (config.debug_checks) {
        if (spectral.kind() == SpectrumKind::IidGaussian &&
            std::abs(next_memory - eta_prime_mean / spectral.alpha()) >
                1e-12 * std::max(1.0, std::abs(next_memory))) {
          throw std::logic_error("Onsager coefficient differs from <eta'>/alpha at iteration " +
                                 std::to_string(t));
        }
        if (mode == LambdaMode::Optimal &&
            std::abs(sigma_w2 * lambda * s - 1.0) > 10.0 * config.inner_tol) {
          throw std::logic_error("sigma_w2 lambda S(-<eta'>) != 1 at iteration " +
                                 std::to_string(t));
        }
      }
    } catch (const DomainError& e) {
      trajectory.reason = Termination::Diverged;
      trajectory.message = std::string("Onsager term left the S-transform domain: ") + e.what();
      break;
    }

    IterationSnapshot snap;
    snap.mu = mu;
    snap.z = z;
    snap.lambda = lambda;
    snap.eta_prime_mean = eta_prime_mean;
    snap.memory = snap.memory_min = snap.memory_max = memory;
    snap.change = relative_change(eta, mu);
    trajectory.snapshots.push_back(std::move(snap));
    trajectory.final_state.z = z;
    trajectory.final_state.lambda_scalar = lambda;

    if (diverged(eta)) {
      trajectory.reason = Termination::Diverged;
      trajectory.message = "non-finite or exploding estimate at iteration " + std::to_string(t);
      break;
    }
    const double change = trajectory.snapshots.back().change;
    mu = eta;
    z_prev = std::move(z);
    memory = next_memory;
    eta_prime_mean_prev = eta_prime_mean;
    if (change < config.tol) {
      trajectory.reason = Termination::Converged;
      break;
    }
  }
  finish(trajectory, mu);
  trajectory.final_state.lambda_vec =
      Vector::Constant(K, trajectory.final_state.lambda_scalar);
  return trajectory;
}

}  // namespace samp
