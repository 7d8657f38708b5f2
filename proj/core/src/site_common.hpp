#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include <Eigen/Cholesky>

#include "samp/model.hpp"
#include "samp/solvers.hpp"

namespace samp::detail {

// (J + diag lambda_bar)^{-1}, or nullopt when the matrix is not positive definite.
inline std::optional<Matrix> invert_precision(const Matrix& J, const Vector& lambda_bar) {
  Matrix P = J;
  P.diagonal() += lambda_bar;
  Eigen::LLT<Matrix> llt(P);
  if (llt.info() != Eigen::Success) return std::nullopt;
  Matrix sigma = llt.solve(Matrix::Identity(J.rows(), J.cols()));
  if (!sigma.allFinite() || !(sigma.diagonal().minCoeff() > 0.0)) return std::nullopt;
  return sigma;
}

// lambda_bar = lambda / eta' - lambda, clamped to +-kSitePrecisionClamp.
// Returns true when the clamp was active.
inline bool site_precision(double lambda, double eta_prime, double& lambda_bar) {
  double value = eta_prime > 0.0 ? lambda / eta_prime - lambda : kSitePrecisionClamp;
  const bool clamped = !(std::abs(value) < kSitePrecisionClamp);
  if (clamped) value = value < 0.0 ? -kSitePrecisionClamp : kSitePrecisionClamp;
  lambda_bar = value;
  return clamped;
}

inline double relative_change(const Vector& next, const Vector& current) {
  return (next - current).norm() / std::max(current.norm(), 1e-12);
}

// max_k |next_k - current_k| / (|next_k| + |current_k| + lambda_k): the change
// of the site precisions on the scale of the lambda identity.
inline double site_change(const Vector& next, const Vector& current, const Vector& lambda) {
  double worst = 0.0;
  for (Index k = 0; k < next.size(); ++k) {
    const double scale = std::abs(next(k)) + std::abs(current(k)) + std::abs(lambda(k));
    if (scale > 0.0) worst = std::max(worst, std::abs(next(k) - current(k)) / scale);
  }
  return worst;
}

inline bool exploded(const Vector& mu) {
  return !mu.allFinite() || mu.norm() > kDivergenceNorm;
}

}  // namespace samp::detail
