#include <algorithm>
#include <cmath>
#include <string>

#include "samp/errors.hpp"
#include "samp/solvers.hpp"
#include "site_common.hpp"

namespace samp {

Trajectory run_samp_finite(const SystemInstance& instance, const Denoiser& denoiser,
                           const SolverConfig& config, std::span<const double> forced_lambda) {
  config.validate();
  if (instance.A.rows() != instance.y.size()) throw InvalidArgument("inconsistent instance");
  const Index N = instance.rows();
  const Index K = instance.cols();
  const double sigma_w2 = instance.sigma_w2;
  const bool forced = !forced_lambda.empty();

  Auxiliaries aux;
  if (!forced) aux = compute_auxiliaries(instance);
  Vector lambda_bar = Vector::Constant(K, 1.0 / denoiser.prior().second_moment());
  Vector mu = Vector::Zero(K);
  Vector lambda_prev = Vector::Zero(K);
  Matrix Z(N, K);
  Vector eta(K), eta_prime(K), lambda_bar_next(K);
  Trajectory trajectory;
  long clamped = 0;

  for (int t = 0; t < config.max_iters; ++t) {
    Vector lambda;
    if (forced) {
      const auto idx = std::min<std::size_t>(static_cast<std::size_t>(t), forced_lambda.size() - 1);
      lambda = Vector::Constant(K, forced_lambda[idx]);
    } else {
      auto sigma = detail::invert_precision(aux.J, lambda_bar);
      if (!sigma) {
        trajectory.reason = Termination::Diverged;
        trajectory.message = "J + diag(lambda_bar) lost positive definiteness at iteration " +
                             std::to_string(t);
        break;
      }
      trajectory.final_state.sigma_diag = sigma->diagonal();
      lambda = sigma->diagonal().cwiseInverse() - lambda_bar;
    }
    if (!lambda.allFinite() || !(lambda.minCoeff() > 0.0)) {
      trajectory.reason = Termination::Diverged;
      trajectory.message = "nonpositive cavity precision at iteration " + std::to_string(t);
      break;
    }

    const Vector residual = instance.y - instance.A * mu;
    Vector memory = Vector::Zero(K);
    if (t == 0) {
      Z = residual.replicate(1, K);
    } else {
      memory = (1.0 - sigma_w2 * lambda_prev.array()).matrix();
      for (Index k = 0; k < K; ++k) Z.col(k) = residual + memory(k) * Z.col(k);
    }
    const Vector kappa = instance.A.cwiseProduct(Z).colwise().sum().transpose() + mu;
    denoiser.apply(kappa, lambda, eta, eta_prime);
    for (Index k = 0; k < K; ++k) {
      clamped += detail::site_precision(lambda(k), eta_prime(k), lambda_bar_next(k));
    }

    IterationSnapshot snap;
    snap.mu = mu;
    snap.lambda = lambda.mean();
    snap.eta_prime_mean = eta_prime.mean();
    snap.memory = memory.mean();
    snap.memory_min = memory.minCoeff();
    snap.memory_max = memory.maxCoeff();
    snap.change = std::max(detail::relative_change(eta, mu),
                           detail::site_change(lambda_bar_next, lambda_bar, lambda));
    trajectory.snapshots.push_back(std::move(snap));
    trajectory.final_state.lambda_vec = lambda;
    trajectory.final_state.lambda_bar = lambda_bar;

    if (detail::exploded(eta)) {
      trajectory.reason = Termination::Diverged;
      trajectory.message = "non-finite or exploding estimate at iteration " + std::to_string(t);
      break;
    }
    const double change = trajectory.snapshots.back().change;
    mu = eta;
    if (config.damp_site_precisions) {
      lambda_bar += config.damping * (lambda_bar_next - lambda_bar);
    } else {
      lambda_bar = lambda_bar_next;
    }
    lambda_prev = lambda;
    if (change < config.tol) {
      trajectory.reason = Termination::Converged;
      break;
    }
  }

  IterationSnapshot last;
  last.mu = mu;
  trajectory.snapshots.push_back(std::move(last));
  trajectory.final_state.mu = mu;
  trajectory.final_state.iteration = trajectory.iterations();
  if (clamped > 0) {
    if (!trajectory.message.empty()) trajectory.message += "; ";
    trajectory.message += "site precision clamped " + std::to_string(clamped) + " times";
  }
  return trajectory;
}

}  // namespace samp
