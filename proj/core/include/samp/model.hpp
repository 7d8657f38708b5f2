#pragma once

#include <cstdint>
#include <string_view>

#include <Eigen/Dense>

namespace samp {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class EnsembleKind { IidGaussian, RowOrthogonal };

std::string_view to_string(EnsembleKind kind);

// Shape of the measurement matrix: N rows (measurements), K columns (unknowns).
struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::IidGaussian;
  Index rows = 0;
  Index cols = 0;

  double alpha() const { return static_cast<double>(rows) / static_cast<double>(cols); }
  // Throws InvalidArgument; row-orthogonal needs N <= K.
  void validate() const;
};

enum class PriorKind { GaussianUnit, BernoulliGaussian };

// Component prior p(x) = (1 - rho) delta(x) + rho N(x | 0, 1).  The unit
// Gaussian prior is the rho = 1 member of the family.
struct PriorSpec {
  PriorKind kind = PriorKind::GaussianUnit;
  double rho = 1.0;

  static PriorSpec gaussian_unit() { return {PriorKind::GaussianUnit, 1.0}; }
  static PriorSpec bernoulli_gaussian(double rho);

  double second_moment() const { return rho; }
  void validate() const;
};

// One realization of y = A x + w.
struct SystemInstance {
  Matrix A;
  Vector x_true;
  Vector noise;
  Vector y;
  double sigma_w2 = 1.0;
  double alpha = 1.0;

  Index rows() const { return A.rows(); }
  Index cols() const { return A.cols(); }
};

// J = A^T A / sigma_w2 and theta = A^T y / sigma_w2.
struct Auxiliaries {
  Matrix J;
  Vector theta;
};

// Entries iid Normal(0, 1/N).
Matrix sample_iid_gaussian(Index rows, Index cols, std::uint64_t seed);

// A = alpha^{-1/2} P O with O Haar on O(K) and P keeping the first N rows, so
// A A^T = I / alpha.  The Haar factor comes from a sign-corrected QR of a
// standard Gaussian matrix; only the N columns of Q that end up in A are
// formed (O^T is Haar as well, so rows of O^T are columns of Q).
Matrix sample_row_orthogonal(Index rows, Index cols, std::uint64_t seed);

Matrix sample_matrix(const EnsembleSpec& ensemble, std::uint64_t seed);

Vector sample_signal(const PriorSpec& prior, Index cols, std::uint64_t seed);

// Draws A, x and w ~ Normal(0, sigma_w2 I) from independent substreams of
// `seed` and assembles y.
SystemInstance generate_instance(const EnsembleSpec& ensemble, const PriorSpec& prior,
                                 double sigma_w2, std::uint64_t seed);

// Assemble an instance from explicit parts (y = A x + w).
SystemInstance make_instance(Matrix A, Vector x_true, Vector noise, double sigma_w2);

Auxiliaries compute_auxiliaries(const SystemInstance& instance);

// Eigenvalues of A^T A in ascending order.  Computed from the smaller of the
// two Gram matrices and padded with the exact zeros of the rank deficit.
Vector gram_eigenvalues(const Matrix& A);

}  // namespace samp
