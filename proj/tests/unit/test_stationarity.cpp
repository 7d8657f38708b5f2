#include <gtest/gtest.h>

#include <cmath>

#include "samp/errors.hpp"
#include "samp/rng.hpp"
#include "samp/solvers.hpp"

using namespace samp;

namespace {

// Gaussian prior: the site precision is 1 for every cavity, so the fixed
// point is the exact posterior and every identity holds in closed form.
struct GaussianFixedPoint {
  SystemInstance inst;
  Vector mu, lambda, sigma_diag;
};

GaussianFixedPoint gaussian_fixed_point() {
  Matrix A(2, 2);
  A << 0.9, -0.4, 0.3, 1.2;
  Vector x(2), w(2);
  x << 0.5, -1.0;
  w << 0.03, -0.01;
  GaussianFixedPoint fp{make_instance(A, x, w, 0.2), {}, {}, {}};
  const auto aux = compute_auxiliaries(fp.inst);
  const Matrix sigma = (aux.J + Matrix::Identity(2, 2)).inverse();
  fp.mu = sigma * aux.theta;
  fp.sigma_diag = sigma.diagonal();
  fp.lambda = fp.sigma_diag.cwiseInverse().array() - 1.0;
  return fp;
}

Matrix spd(Index K, std::uint64_t seed) {
  const Matrix G = sample_iid_gaussian(K, K, seed);
  return G.transpose() * G;
}

}  // namespace

TEST(Stationarity, HandBuiltFixedPoint) {
  const auto fp = gaussian_fixed_point();
  const Denoiser d(PriorSpec::gaussian_unit());
  const auto r = stationarity_breakdown(fp.inst, d, fp.mu, fp.lambda, fp.sigma_diag);
  EXPECT_LT(r.mu_identity, 1e-12);
  EXPECT_LT(r.lambda_identity, 1e-12);
  EXPECT_LT(r.covariance_identity, 1e-12);
  EXPECT_EQ(r.max(), std::max({r.mu_identity, r.lambda_identity, r.covariance_identity}));
  EXPECT_LT(stationarity_residual(fp.inst, d, fp.mu, fp.lambda, std::nullopt), 1e-12);
}

TEST(Stationarity, PerturbedMeanIsDetected) {
  const auto fp = gaussian_fixed_point();
  const Denoiser d(PriorSpec::gaussian_unit());
  Vector mu = fp.mu;
  mu(0) += 1e-3;
  EXPECT_GE(stationarity_residual(fp.inst, d, mu, fp.lambda, fp.sigma_diag), 1e-4);
}

TEST(Stationarity, PerturbedPrecisionIsDetected) {
  const auto fp = gaussian_fixed_point();
  const Denoiser d(PriorSpec::gaussian_unit());
  Vector lambda = fp.lambda;
  lambda(1) *= 1.01;
  EXPECT_GE(stationarity_breakdown(fp.inst, d, fp.mu, lambda, fp.sigma_diag).lambda_identity, 1e-4);
  Vector sigma_diag = fp.sigma_diag;
  sigma_diag(0) *= 1.01;
  EXPECT_GE(stationarity_breakdown(fp.inst, d, fp.mu, fp.lambda, sigma_diag).covariance_identity,
            1e-4);
}

TEST(Stationarity, Validation) {
  const auto fp = gaussian_fixed_point();
  const Denoiser d(PriorSpec::gaussian_unit());
  EXPECT_THROW(stationarity_residual(fp.inst, d, Vector::Zero(3), fp.lambda, std::nullopt),
               InvalidArgument);
  EXPECT_THROW(stationarity_residual(fp.inst, d, fp.mu, -fp.lambda, std::nullopt), InvalidArgument);
  EXPECT_THROW(stationarity_residual(fp.inst, d, fp.mu, fp.lambda, Vector::Ones(5)),
               InvalidArgument);
}

TEST(ShermanMorrison, ZeroDeltaIsIdentity) {
  const Matrix P = spd(8, 1) + Matrix::Identity(8, 8);
  const Matrix sigma = P.inverse();
  EXPECT_EQ(sigma_rank_one_update(sigma, 3, 0.0), sigma);
}

TEST(ShermanMorrison, MatchesFreshInverse) {
  const Index K = 16;
  Matrix P = spd(K, 2) + Matrix::Identity(K, K);
  const Matrix updated = sigma_rank_one_update(P.inverse(), 5, 0.7);
  P(5, 5) += 0.7;
  const Matrix fresh = P.inverse();
  EXPECT_LT((updated - fresh).cwiseAbs().maxCoeff() / fresh.cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ShermanMorrison, SequentialUpdatesStayAccurate) {
  const Index K = 64;
  Matrix P = spd(K, 3) / static_cast<double>(K) + Matrix::Identity(K, K);
  Matrix sigma = P.inverse();
  auto engine = make_engine(7);
  std::uniform_real_distribution<double> uniform(-0.25, 0.75);
  for (Index k = 0; k < K; ++k) {
    const double delta = uniform(engine);
    sigma_rank_one_update_inplace(sigma, k, delta);
    P(k, k) += delta;
  }
  const Matrix fresh = P.inverse();
  EXPECT_LT((sigma - fresh).cwiseAbs().maxCoeff() / fresh.cwiseAbs().maxCoeff(), 1e-8);
}

TEST(ShermanMorrison, SingularUpdateThrows) {
  Matrix sigma = Matrix::Identity(3, 3);
  EXPECT_THROW(sigma_rank_one_update_inplace(sigma, 1, -1.0), SingularMatrix);
  EXPECT_THROW(sigma_rank_one_update_inplace(sigma, 3, 1.0), InvalidArgument);
}
