#include <algorithm>
#include <cmath>
#include <string>

#include "samp/errors.hpp"
#include "samp/solvers.hpp"
#include "site_common.hpp"

namespace samp {

double StationarityReport::max() const {
  return std::max({mu_identity, lambda_identity, covariance_identity});
}

StationarityReport stationarity_breakdown(const SystemInstance& instance,
                                          const Denoiser& denoiser, const Vector& mu,
                                          const Vector& lambda_vec,
                                          const std::optional<Vector>& sigma_diag) {
  const Index K = instance.cols();
  if (mu.size() != K || lambda_vec.size() != K) {
    throw InvalidArgument("stationarity: mu and lambda must have length K");
  }
  if (!(lambda_vec.minCoeff() > 0.0)) throw InvalidArgument("stationarity: lambda must be positive");
  if (sigma_diag && sigma_diag->size() != K) {
    throw InvalidArgument("stationarity: Sigma diagonal must have length K");
  }

  const Vector gradient =
      instance.A.transpose() * (instance.y - instance.A * mu) / instance.sigma_w2;
  const Vector kappa = gradient.cwiseQuotient(lambda_vec) + mu;
  Vector eta(K), eta_prime(K);
  denoiser.apply(kappa, lambda_vec, eta, eta_prime);

  StationarityReport report;
  const double scale = std::max({mu.cwiseAbs().maxCoeff(), eta.cwiseAbs().maxCoeff(), 1e-12});
  report.mu_identity = (mu - eta).cwiseAbs().maxCoeff() / scale;
  if (!sigma_diag) return report;

  Vector lambda_bar(K);
  for (Index k = 0; k < K; ++k) {
    detail::site_precision(lambda_vec(k), eta_prime(k), lambda_bar(k));
    const double inv = 1.0 / (*sigma_diag)(k);
    const double r = std::abs(lambda_vec(k) + lambda_bar(k) - inv) /
                     (std::abs(lambda_vec(k)) + std::abs(lambda_bar(k)) + std::abs(inv));
    report.lambda_identity = std::max(report.lambda_identity, r);
  }

  const Matrix J = instance.A.transpose() * instance.A / instance.sigma_w2;
  auto sigma = detail::invert_precision(J, lambda_bar);
  if (!sigma) throw SingularMatrix("stationarity: J + diag(lambda_bar) is not positive definite");
  for (Index k = 0; k < K; ++k) {
    const double a = (*sigma)(k, k);
    const double b = (*sigma_diag)(k);
    report.covariance_identity =
        std::max(report.covariance_identity, std::abs(a - b) / (std::abs(a) + std::abs(b)));
  }
  return report;
}

double stationarity_residual(const SystemInstance& instance, const Denoiser& denoiser,
                             const Vector& mu, const Vector& lambda_vec,
                             const std::optional<Vector>& sigma_diag) {
  return stationarity_breakdown(instance, denoiser, mu, lambda_vec, sigma_diag).max();
}

void sigma_rank_one_update_inplace(Matrix& sigma, Index k, double delta) {
  if (sigma.rows() != sigma.cols() || k < 0 || k >= sigma.rows()) {
    throw InvalidArgument("rank-one update: bad matrix shape or index");
  }
  if (delta == 0.0) return;
  const double denom = 1.0 + delta * sigma(k, k);
  if (denom == 0.0 || !std::isfinite(denom)) {
    throw SingularMatrix("rank-one update makes J + diag(lambda_bar) singular at index " +
                         std::to_string(k));
  }
  const Vector column = sigma.col(k);
  sigma.noalias() -= (delta / denom) * column * column.transpose();
}

Matrix sigma_rank_one_update(Matrix sigma, Index k, double delta) {
  sigma_rank_one_update_inplace(sigma, k, delta);
  return sigma;
}

}  // namespace samp
