#pragma once

#include <functional>
#include <vector>

#include "samp/model.hpp"

namespace samp {

// Moments of the tilted belief p(x) N(x | kappa, 1/lambda) / Z.
//   eta        posterior mean
//   eta_prime  d eta / d kappa = lambda * posterior variance
//   log_partition  log Z(kappa, lambda)
struct DenoiserOutput {
  double eta = 0.0;
  double eta_prime = 0.0;
  double log_partition = 0.0;
};

DenoiserOutput denoise_gaussian(double kappa, double lambda);

// Spike-and-slab prior (1 - rho) delta(x) + rho N(x | 0, 1).  Mixture
// responsibilities are formed in log space.
DenoiserOutput denoise_bernoulli_gaussian(double kappa, double lambda, double rho);

struct PointMass {
  double location = 0.0;
  double weight = 0.0;
};

// A prior given as an (unnormalized-free) continuous density plus atoms.
struct QuadraturePrior {
  std::function<double(double)> density;
  std::vector<PointMass> atoms;
};

QuadraturePrior quadrature_prior(const PriorSpec& prior);

// Reference evaluation of the tilted moments by adaptive Gauss-Kronrod
// quadrature over [kappa - 12/sqrt(lambda) - 12, kappa + 12/sqrt(lambda) + 12];
// atoms are added in closed form.  Throws QuadratureError when the requested
// 1e-12 relative accuracy is not reached.
DenoiserOutput denoise_quadrature(const QuadraturePrior& prior, double kappa, double lambda);

class Denoiser {
 public:
  explicit Denoiser(PriorSpec prior);

  const PriorSpec& prior() const { return prior_; }

  DenoiserOutput operator()(double kappa, double lambda) const;

  // Componentwise evaluation with a shared precision.
  void apply(const Vector& kappa, double lambda, Vector& eta, Vector& eta_prime) const;
  // Componentwise evaluation with per-component precisions.
  void apply(const Vector& kappa, const Vector& lambda, Vector& eta, Vector& eta_prime) const;

  // <eta'(kappa; lambda)> over the components.
  double mean_eta_prime(const Vector& kappa, double lambda) const;

 private:
  PriorSpec prior_;
};

// |(eta(kappa + h) - eta(kappa - h)) / 2h - eta'(kappa)|
double eta_prime_fd_check(const Denoiser& denoiser, double kappa, double lambda, double h);

}  // namespace samp
