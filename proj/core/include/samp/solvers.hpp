#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "samp/denoiser.hpp"
#include "samp/model.hpp"
#include "samp/spectral.hpp"

namespace samp {

enum class Termination { MaxIters, Converged, Diverged };

std::string_view to_string(Termination reason);

enum class UpdateSchedule { Parallel, Sequential };

enum class LambdaMode { Optimal, Suboptimal };

struct SolverConfig {
  int max_iters = 200;
  // Relative change ||mu_new - mu|| / max(||mu||, 1e-12) of the undamped
  // update; equals the plain iterate change when damping == 1.  Schemes with
  // site precisions also require the per-site change of lambda_bar, relative to
  // abs(lambda_bar) + lambda, to fall below tol.
  double tol = 1e-6;
  // epsilon in mu <- (1 - eps) mu + eps mu_new (EP / ADATAP).  1 = undamped.
  double damping = 1.0;
  // Apply the same epsilon to the site precisions lambda_bar.
  bool damp_site_precisions = false;
  double inner_tol = 1e-10;
  int inner_max = 200;
  UpdateSchedule schedule = UpdateSchedule::Parallel;
  // Per-iteration consistency assertions (Onsager identity for iid spectra,
  // sigma_w2 lambda S = 1 in optimal mode).  Throws std::logic_error.
  bool debug_checks = false;

  void validate() const;
};

struct SolverState {
  Vector mu;
  Vector z;                 // S-AMP family residual
  double lambda_scalar = 0.0;
  Vector lambda_vec;        // per-component cavity precisions
  Vector lambda_bar;        // site precisions
  Vector gamma_bar;         // site natural means (EP)
  Vector sigma_diag;        // diag (J + diag lambda_bar)^{-1}
  int iteration = 0;
};

// snapshots[t].mu is mu^t.  The other fields describe iteration t (the step
// producing mu^{t+1}) and are left at zero on the terminal snapshot.
struct IterationSnapshot {
  Vector mu;
  Vector z;
  double lambda = 0.0;          // lambda^t, or the mean of lambda_k^t
  double eta_prime_mean = 0.0;  // <eta'(kappa^t; lambda^t)>
  double memory = 0.0;          // coefficient of z^{t-1} in z^t (mean over k)
  double memory_min = 0.0;
  double memory_max = 0.0;
  double change = 0.0;
};

struct Trajectory {
  std::vector<IterationSnapshot> snapshots;
  Termination reason = Termination::MaxIters;
  std::string message;
  SolverState final_state;

  int iterations() const { return static_cast<int>(snapshots.size()) - 1; }
  const Vector& estimate() const { return final_state.mu; }
};

// Classical AMP with Bayes-optimal denoiser and the iid precision schedule.
Trajectory run_amp(const SystemInstance& instance, const Denoiser& denoiser,
                   const SolverConfig& config);

// Scalar S-AMP with the Onsager coefficient 1 - 1/S(-<eta'>).
Trajectory run_samp(const SystemInstance& instance, const Denoiser& denoiser,
                    const SpectralModel& spectral, const SolverConfig& config, LambdaMode mode);

// lambda solving lambda = 1 / (sigma_w2 S(-<eta'(kappa; lambda)>)).
double solve_lambda_optimal(const Vector& kappa, const Denoiser& denoiser,
                            const SpectralModel& spectral, double sigma_w2, double inner_tol,
                            int inner_max, double lambda_init);

// lambda_s solving lambda_s = 1 / (sigma_w2 S(-(lambda_s / lambda_prev) <eta'_prev>)).
double solve_lambda_suboptimal(double lambda_prev, double eta_prime_mean_prev,
                               const SpectralModel& spectral, double sigma_w2);

// lambda^0: the sub-optimal identity with the prior variance m2 in place of
// <eta'> / lambda.  For iid this is 1 / (sigma_w2 + m2 / alpha).
double initial_lambda(double prior_second_moment, const SpectralModel& spectral,
                      double sigma_w2);

Trajectory run_ep(const SystemInstance& instance, const Denoiser& denoiser,
                  const SolverConfig& config);

Trajectory run_adatap(const SystemInstance& instance, const Denoiser& denoiser,
                      const SolverConfig& config);

// Per-component S-AMP with residuals z_{n,k}.  When `forced_lambda` is
// non-empty, lambda_k^t = forced_lambda[min(t, size-1)] for every k instead
// of the time-indexed site update.
Trajectory run_samp_finite(const SystemInstance& instance, const Denoiser& denoiser,
                           const SolverConfig& config,
                           std::span<const double> forced_lambda = {});

struct StationarityReport {
  double mu_identity = 0.0;
  double lambda_identity = 0.0;
  double covariance_identity = 0.0;

  double max() const;
};

// Residuals of the stationary-point identities
//   mu_k = eta(kappa_k; lambda_k),
//   kappa_k = (A^T (y - A mu))_k / (lambda_k sigma_w2) + mu_k,
//   lambda_k = 1 / Sigma_kk - lambda_bar_k,  lambda_bar_k = lambda_k / eta'_k - lambda_k,
//   Sigma_kk = [(J + diag lambda_bar)^{-1}]_kk.
// Without sigma_diag only the mean identity is evaluated.
StationarityReport stationarity_breakdown(const SystemInstance& instance,
                                          const Denoiser& denoiser, const Vector& mu,
                                          const Vector& lambda_vec,
                                          const std::optional<Vector>& sigma_diag);

double stationarity_residual(const SystemInstance& instance, const Denoiser& denoiser,
                             const Vector& mu, const Vector& lambda_vec,
                             const std::optional<Vector>& sigma_diag);

// Sherman-Morrison update of Sigma = (J + diag lambda_bar)^{-1} after
// lambda_bar_k += delta.  O(K^2).
void sigma_rank_one_update_inplace(Matrix& sigma, Index k, double delta);
Matrix sigma_rank_one_update(Matrix sigma, Index k, double delta);

// Limits on the site precisions lambda_bar.
inline constexpr double kSitePrecisionClamp = 1e12;
// ||mu|| above which a run is declared diverged.
inline constexpr double kDivergenceNorm = 1e8;

}  // namespace samp
