#include "samp/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "samp/errors.hpp"
#include "samp/rng.hpp"

namespace samp {

std::string_view to_string(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::IidGaussian:
      return "iid";
    case EnsembleKind::RowOrthogonal:
      return "row-orth";
  }
  return "unknown";
}

void EnsembleSpec::validate() const {
  if (rows < 1 || cols < 1) {
    throw InvalidArgument("ensemble dimensions must be positive, got N=" +
                          std::to_string(rows) + " K=" + std::to_string(cols));
  }
  if (kind == EnsembleKind::RowOrthogonal && rows > cols) {
    throw InvalidArgument("row-orthogonal ensemble requires N <= K, got N=" +
                          std::to_string(rows) + " K=" + std::to_string(cols));
  }
}

PriorSpec PriorSpec::bernoulli_gaussian(double rho) {
  PriorSpec p{PriorKind::BernoulliGaussian, rho};
  p.validate();
  return p;
}

void PriorSpec::validate() const {
  if (kind == PriorKind::GaussianUnit) {
    if (rho != 1.0) throw InvalidArgument("gaussian-unit prior has rho fixed to 1");
    return;
  }
  if (!(rho > 0.0 && rho <= 1.0)) {
    throw InvalidArgument("bernoulli-gaussian activity rho must lie in (0, 1], got " +
                          std::to_string(rho));
  }
}

namespace {

Matrix standard_normal(Index rows, Index cols, std::uint64_t seed) {
  Engine eng = make_engine(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix G(rows, cols);
  // Column-major fill order is part of the reproducibility contract.
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) G(i, j) = nd(eng);
  return G;
}

}  // namespace

Matrix sample_iid_gaussian(Index rows, Index cols, std::uint64_t seed) {
  EnsembleSpec{EnsembleKind::IidGaussian, rows, cols}.validate();
  return standard_normal(rows, cols, seed) / std::sqrt(static_cast<double>(rows));
}

Matrix sample_row_orthogonal(Index rows, Index cols, std::uint64_t seed) {
  EnsembleSpec{EnsembleKind::RowOrthogonal, rows, cols}.validate();
  // First N columns of the K x K Gaussian matrix determine the first N
  // columns of its Q factor.
  Matrix G = standard_normal(cols, rows, seed);
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ() * Matrix::Identity(cols, rows);
  const auto R = qr.matrixQR();
  for (Index j = 0; j < rows; ++j) {
    if (R(j, j) < 0.0) Q.col(j) *= -1.0;
  }
  const double alpha = static_cast<double>(rows) / static_cast<double>(cols);
  return Q.transpose() / std::sqrt(alpha);
}

Matrix sample_matrix(const EnsembleSpec& ensemble, std::uint64_t seed) {
  switch (ensemble.kind) {
    case EnsembleKind::IidGaussian:
      return sample_iid_gaussian(ensemble.rows, ensemble.cols, seed);
    case EnsembleKind::RowOrthogonal:
      return sample_row_orthogonal(ensemble.rows, ensemble.cols, seed);
  }
  throw InvalidArgument("unknown ensemble kind");
}

Vector sample_signal(const PriorSpec& prior, Index cols, std::uint64_t seed) {
  prior.validate();
  if (cols < 1) throw InvalidArgument("signal length must be positive");
  Engine eng = make_engine(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  Vector x(cols);
  for (Index k = 0; k < cols; ++k) {
    // Both draws are consumed for every entry so the stream position does not
    // depend on the outcome.
    const double u = ud(eng);
    const double g = nd(eng);
    x(k) = (prior.kind == PriorKind::GaussianUnit || u < prior.rho) ? g : 0.0;
  }
  return x;
}

SystemInstance make_instance(Matrix A, Vector x_true, Vector noise, double sigma_w2) {
  if (!(sigma_w2 > 0.0)) throw InvalidArgument("sigma_w2 must be positive");
  if (A.cols() != x_true.size() || A.rows() != noise.size()) {
    throw InvalidArgument("instance parts have incompatible dimensions");
  }
  SystemInstance inst;
  inst.y = A * x_true + noise;
  inst.alpha = static_cast<double>(A.rows()) / static_cast<double>(A.cols());
  inst.A = std::move(A);
  inst.x_true = std::move(x_true);
  inst.noise = std::move(noise);
  inst.sigma_w2 = sigma_w2;
  return inst;
}

SystemInstance generate_instance(const EnsembleSpec& ensemble, const PriorSpec& prior,
                                 double sigma_w2, std::uint64_t seed) {
  ensemble.validate();
  prior.validate();
  if (!(sigma_w2 > 0.0) || !std::isfinite(sigma_w2)) {
    throw InvalidArgument("sigma_w2 must be positive and finite");
  }
  Matrix A = sample_matrix(ensemble, derive_seed(seed, Stream::Matrix));
  Vector x = sample_signal(prior, ensemble.cols, derive_seed(seed, Stream::Signal));
  Vector w = standard_normal(ensemble.rows, 1, derive_seed(seed, Stream::Noise)).col(0) *
             std::sqrt(sigma_w2);
  return make_instance(std::move(A), std::move(x), std::move(w), sigma_w2);
}

Auxiliaries compute_auxiliaries(const SystemInstance& instance) {
  Auxiliaries aux;
  aux.J.noalias() = instance.A.transpose() * instance.A;
  aux.J /= instance.sigma_w2;
  // Exact symmetry regardless of the product kernel's accumulation order.
  aux.J = 0.5 * (aux.J + aux.J.transpose()).eval();
  aux.theta.noalias() = instance.A.transpose() * instance.y;
  aux.theta /= instance.sigma_w2;
  return aux;
}

Vector gram_eigenvalues(const Matrix& A) {
  const Index n = A.rows();
  const Index k = A.cols();
  Vector out = Vector::Zero(k);
  if (n >= k) {
    Matrix G = A.transpose() * A;
    Eigen::SelfAdjointEigenSolver<Matrix> es(G, Eigen::EigenvaluesOnly);
    out = es.eigenvalues();
  } else {
    Matrix G = A * A.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> es(G, Eigen::EigenvaluesOnly);
    out.tail(n) = es.eigenvalues();
  }
  // The Gram matrix is PSD; round-off negatives are clamped.
  out = out.cwiseMax(0.0);
  std::sort(out.data(), out.data() + out.size());
  return out;
}

}  // namespace samp
