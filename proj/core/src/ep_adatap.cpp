#include <cmath>
#include <string>

#include "samp/errors.hpp"
#include "samp/solvers.hpp"
#include "site_common.hpp"

namespace samp {

namespace {

enum class Scheme { Ep, Adatap };

struct SiteRun {
  const SystemInstance& instance;
  const Denoiser& denoiser;
  const SolverConfig& config;
  Scheme scheme;

  Auxiliaries aux;
  Vector mu, lambda_bar, gamma_bar;
  Matrix sigma;
  Trajectory trajectory;
  long clamped = 0;

  SiteRun(const SystemInstance& inst, const Denoiser& den, const SolverConfig& cfg, Scheme s)
      : instance(inst), denoiser(den), config(cfg), scheme(s), aux(compute_auxiliaries(inst)) {
    const Index K = inst.cols();
    // Prior-matched Gaussian sites; the mean starts at the matching posterior
    // mean Sigma^0 theta so that the cavity formula is consistent at t = 0.
    lambda_bar = Vector::Constant(K, 1.0 / den.prior().second_moment());
    gamma_bar = Vector::Zero(K);
    auto s0 = detail::invert_precision(aux.J, lambda_bar);
    if (!s0) throw SingularMatrix("J + diag(lambda_bar^0) is not positive definite");
    sigma = std::move(*s0);
    mu = sigma * (aux.theta + gamma_bar);
  }

  void diverge(std::string message) {
    trajectory.reason = Termination::Diverged;
    trajectory.message = std::move(message);
  }

  // Returns false when the run terminated.
  bool parallel_step(int t) {
    const double eps = config.damping;
    const Vector sigma_diag = sigma.diagonal();
    const Vector lambda = sigma_diag.cwiseInverse() - lambda_bar;
    if (!lambda.allFinite() || !(lambda.minCoeff() > 0.0)) {
      diverge("nonpositive cavity precision at iteration " + std::to_string(t));
      return false;
    }
    const Vector gradient = aux.theta - aux.J * mu;
    const Vector kappa = gradient.cwiseQuotient(lambda) + mu;
    Vector eta(mu.size()), eta_prime(mu.size());
    denoiser.apply(kappa, lambda, eta, eta_prime);

    Vector lambda_bar_new(mu.size());
    for (Index k = 0; k < mu.size(); ++k) {
      clamped += detail::site_precision(lambda(k), eta_prime(k), lambda_bar_new(k));
    }
    Vector proposal;
    if (scheme == Scheme::Ep) {
      gamma_bar = (lambda + lambda_bar_new).cwiseProduct(eta) - lambda.cwiseProduct(kappa);
      proposal = sigma * (aux.theta + gamma_bar);
    } else {
      proposal = eta;
    }
    const double change = std::max(detail::relative_change(proposal, mu),
                                   detail::site_change(lambda_bar_new, lambda_bar, lambda));
    Vector mu_next = mu + eps * (proposal - mu);

    IterationSnapshot snap;
    snap.mu = mu;
    snap.lambda = lambda.mean();
    snap.eta_prime_mean = eta_prime.mean();
    snap.change = change;
    trajectory.snapshots.push_back(std::move(snap));
    trajectory.final_state.lambda_vec = lambda;
    trajectory.final_state.sigma_diag = sigma_diag;

    if (detail::exploded(mu_next)) {
      diverge("non-finite or exploding estimate at iteration " + std::to_string(t));
      return false;
    }
    mu = std::move(mu_next);
    if (config.damp_site_precisions) {
      lambda_bar += eps * (lambda_bar_new - lambda_bar);
    } else {
      lambda_bar = lambda_bar_new;
    }
    if (change < config.tol) {
      trajectory.reason = Termination::Converged;
      return false;
    }
    auto next = detail::invert_precision(aux.J, lambda_bar);
    if (!next) {
      diverge("J + diag(lambda_bar) lost positive definiteness at iteration " + std::to_string(t));
      return false;
    }
    sigma = std::move(*next);
    return true;
  }

  bool sequential_step(int t) {
    const double eps = config.damping;
    const double sigma_w2 = instance.sigma_w2;
    const Index K = mu.size();
    const Vector mu_start = mu;
    Vector residual = instance.y - instance.A * mu;
    Vector lambda(K), eta_prime(K), site_proposal(K);
    const Vector lambda_bar_start = lambda_bar;

    for (Index k = 0; k < K; ++k) {
      const double lk = 1.0 / sigma(k, k) - lambda_bar(k);
      if (!std::isfinite(lk) || !(lk > 0.0)) {
        diverge("nonpositive cavity precision at iteration " + std::to_string(t) + ", site " +
                std::to_string(k));
        return false;
      }
      lambda(k) = lk;
      const double kappa = instance.A.col(k).dot(residual) / (sigma_w2 * lk) + mu(k);
      const DenoiserOutput out = denoiser(kappa, lk);
      eta_prime(k) = out.eta_prime;
      double site = 0.0;
      clamped += detail::site_precision(lk, out.eta_prime, site);
      site_proposal(k) = site;
      if (scheme == Scheme::Ep) gamma_bar(k) = (lk + site) * out.eta - lk * kappa;
      if (config.damp_site_precisions) site = lambda_bar(k) + eps * (site - lambda_bar(k));
      const double delta = site - lambda_bar(k);
      try {
        sigma_rank_one_update_inplace(sigma, k, delta);
      } catch (const SingularMatrix&) {
        diverge("singular site update at iteration " + std::to_string(t));
        return false;
      }
      lambda_bar(k) = site;

      if (scheme == Scheme::Ep) {
        mu += eps * (sigma * (aux.theta + gamma_bar) - mu);
        residual = instance.y - instance.A * mu;
      } else {
        const double step = eps * (out.eta - mu(k));
        mu(k) += step;
        residual -= step * instance.A.col(k);
      }
    }
    const double change =
        std::max((mu - mu_start).norm() / (eps * std::max(mu_start.norm(), 1e-12)),
                 detail::site_change(site_proposal, lambda_bar_start, lambda));

    IterationSnapshot snap;
    snap.mu = mu_start;
    snap.lambda = lambda.mean();
    snap.eta_prime_mean = eta_prime.mean();
    snap.change = change;
    trajectory.snapshots.push_back(std::move(snap));

    if (detail::exploded(mu)) {
      diverge("non-finite or exploding estimate at iteration " + std::to_string(t));
      return false;
    }
    // Refresh Sigma once per sweep so rank-one round-off does not accumulate.
    auto fresh = detail::invert_precision(aux.J, lambda_bar);
    if (!fresh) {
      diverge("J + diag(lambda_bar) lost positive definiteness at iteration " + std::to_string(t));
      return false;
    }
    sigma = std::move(*fresh);
    trajectory.final_state.sigma_diag = sigma.diagonal();
    trajectory.final_state.lambda_vec = sigma.diagonal().cwiseInverse() - lambda_bar;
    if (change < config.tol) {
      trajectory.reason = Termination::Converged;
      return false;
    }
    return true;
  }

  Trajectory run() {
    for (int t = 0; t < config.max_iters; ++t) {
      const bool more = config.schedule == UpdateSchedule::Parallel ? parallel_step(t)
                                                                    : sequential_step(t);
      if (!more) break;
    }
    IterationSnapshot last;
    last.mu = mu;
    trajectory.snapshots.push_back(std::move(last));
    trajectory.final_state.mu = mu;
    trajectory.final_state.lambda_bar = lambda_bar;
    trajectory.final_state.gamma_bar = gamma_bar;
    trajectory.final_state.iteration = trajectory.iterations();
    if (clamped > 0) {
      if (!trajectory.message.empty()) trajectory.message += "; ";
      trajectory.message += "site precision clamped " + std::to_string(clamped) + " times";
    }
    return std::move(trajectory);
  }
};

Trajectory run_site_scheme(const SystemInstance& instance, const Denoiser& denoiser,
                           const SolverConfig& config, Scheme scheme) {
  config.validate();
  if (instance.A.rows() != instance.y.size()) throw InvalidArgument("inconsistent instance");
  SiteRun run(instance, denoiser, config, scheme);
  return run.run();
}

}  // namespace

Trajectory run_ep(const SystemInstance& instance, const Denoiser& denoiser,
                  const SolverConfig& config) {
  return run_site_scheme(instance, denoiser, config, Scheme::Ep);
}

Trajectory run_adatap(const SystemInstance& instance, const Denoiser& denoiser,
                      const SolverConfig& config) {
  return run_site_scheme(instance, denoiser, config, Scheme::Adatap);
}

}  // namespace samp
