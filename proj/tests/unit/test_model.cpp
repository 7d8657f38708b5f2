#include <gtest/gtest.h>

#include <cmath>

#include "samp/errors.hpp"
#include "samp/model.hpp"
#include "samp/rng.hpp"

using namespace samp;

TEST(Rng, DeriveSeedIsPureAndStreamSeparated) {
  EXPECT_EQ(derive_seed(42, Stream::Matrix, 3), derive_seed(42, Stream::Matrix, 3));
  EXPECT_NE(derive_seed(42, Stream::Matrix, 3), derive_seed(42, Stream::Signal, 3));
  EXPECT_NE(derive_seed(42, Stream::Trial, 3), derive_seed(42, Stream::Trial, 4));
  EXPECT_NE(derive_seed(42, Stream::Trial, 0), derive_seed(43, Stream::Trial, 0));
}

TEST(SampleIid, DeterministicForSameSeed) {
  const Matrix a = sample_iid_gaussian(2, 2, 99);
  const Matrix b = sample_iid_gaussian(2, 2, 99);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, sample_iid_gaussian(2, 2, 100));
}

TEST(SampleIid, EntryMeanWithinCltBand) {
  // |mean| < 3 sqrt(var / (N K)) with var = 1/N, over 100 seeds.
  const Index N = 1000, K = 1000;
  const double bound = 3.0 * std::sqrt(1.0 / N / (static_cast<double>(N) * K));
  int outside = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    if (std::abs(sample_iid_gaussian(N, K, s).mean()) >= bound) ++outside;
  }
  // 3 sigma: P(outside) ~ 0.0027 per seed.
  EXPECT_LE(outside, 3);
}

TEST(SampleIid, SecondMomentMatchesOneOverN) {
  const Matrix A = sample_iid_gaussian(400, 800, 5);
  const double m2 = A.array().square().mean();
  EXPECT_NEAR(m2, 1.0 / 400.0, 0.05 / 400.0);
}

TEST(SampleIid, RejectsBadDimensions) {
  EXPECT_THROW(sample_iid_gaussian(0, 3, 1), InvalidArgument);
}

class RowOrthogonal : public ::testing::TestWithParam<std::pair<Index, Index>> {};

TEST_P(RowOrthogonal, GramIdentity) {
  const auto [N, K] = GetParam();
  const double alpha = static_cast<double>(N) / static_cast<double>(K);
  const Matrix A = sample_row_orthogonal(N, K, 17);
  const Matrix G = A * A.transpose() - Matrix::Identity(N, N) / alpha;
  EXPECT_LT(G.cwiseAbs().maxCoeff(), 1e-12);
}

TEST_P(RowOrthogonal, SpectrumIsTwoAtoms) {
  const auto [N, K] = GetParam();
  const double alpha = static_cast<double>(N) / static_cast<double>(K);
  const Vector ev = gram_eigenvalues(sample_row_orthogonal(N, K, 23));
  ASSERT_EQ(ev.size(), K);
  for (Index i = 0; i < K - N; ++i) EXPECT_NEAR(ev(i), 0.0, 1e-10);
  for (Index i = K - N; i < K; ++i) EXPECT_NEAR(ev(i), 1.0 / alpha, 1e-10);
}

INSTANTIATE_TEST_SUITE_P(Shapes, RowOrthogonal,
                         ::testing::Values(std::pair<Index, Index>{8, 8},
                                           std::pair<Index, Index>{20, 60},
                                           std::pair<Index, Index>{64, 128},
                                           std::pair<Index, Index>{1, 5}));

TEST(SampleRowOrthogonal, SquareIsOrthogonal) {
  const Matrix A = sample_row_orthogonal(32, 32, 4);
  EXPECT_LT((A.transpose() * A - Matrix::Identity(32, 32)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SampleRowOrthogonal, RejectsWideAlpha) {
  EXPECT_THROW(sample_row_orthogonal(6, 5, 1), InvalidArgument);
  EXPECT_THROW(sample_matrix({EnsembleKind::RowOrthogonal, 6, 5}, 1), InvalidArgument);
}

TEST(SampleRowOrthogonal, Deterministic) {
  EXPECT_EQ(sample_row_orthogonal(5, 9, 8), sample_row_orthogonal(5, 9, 8));
}

TEST(SampleRowOrthogonal, HaarFirstMomentsOfEntries) {
  // Entries of a Haar column have mean 0 and variance 1/K; scaled by
  // alpha^{-1/2} the entries of A have variance 1/N.
  const Index N = 50, K = 100;
  double sum = 0.0, sq = 0.0;
  const int reps = 40;
  for (int s = 0; s < reps; ++s) {
    const Matrix A = sample_row_orthogonal(N, K, 1000 + s);
    sum += A.sum();
    sq += A.squaredNorm();
  }
  const double count = static_cast<double>(reps) * N * K;
  EXPECT_NEAR(sum / count, 0.0, 4.0 * std::sqrt(1.0 / N / count));
  EXPECT_NEAR(sq / count, 1.0 / N, 1e-12);  // exact: trace(A A^T) = N / alpha
}

TEST(SampleSignal, ActivityFraction) {
  const Vector x = sample_signal(PriorSpec::bernoulli_gaussian(0.1), 100000, 3);
  const double frac = static_cast<double>((x.array() != 0.0).count()) / x.size();
  EXPECT_NEAR(frac, 0.1, 0.01);
}

TEST(SampleSignal, DenseForRhoOne) {
  const Vector x = sample_signal(PriorSpec::gaussian_unit(), 1000, 3);
  EXPECT_EQ((x.array() == 0.0).count(), 0);
  EXPECT_EQ(x, sample_signal(PriorSpec::gaussian_unit(), 1000, 3));
}

TEST(PriorSpec, Validation) {
  EXPECT_THROW(PriorSpec::bernoulli_gaussian(0.0), InvalidArgument);
  EXPECT_THROW(PriorSpec::bernoulli_gaussian(1.5), InvalidArgument);
  EXPECT_DOUBLE_EQ(PriorSpec::bernoulli_gaussian(0.3).second_moment(), 0.3);
  PriorSpec bad{PriorKind::GaussianUnit, 0.5};
  EXPECT_THROW(bad.validate(), InvalidArgument);
}

TEST(GenerateInstance, ResidualIdentity) {
  const auto inst =
      generate_instance({EnsembleKind::IidGaussian, 40, 80}, PriorSpec::bernoulli_gaussian(0.2),
                        1e-2, 11);
  const Vector r = inst.y - inst.A * inst.x_true - inst.noise;
  EXPECT_LT(r.norm(), 1e-12 * inst.y.norm());
  EXPECT_DOUBLE_EQ(inst.alpha, 0.5);
  EXPECT_EQ(inst.rows(), 40);
}

TEST(GenerateInstance, TinyNoiseGivesExactObservations) {
  const auto inst =
      generate_instance({EnsembleKind::RowOrthogonal, 30, 60}, PriorSpec::gaussian_unit(), 1e-30, 2);
  const Vector clean = inst.A * inst.x_true;
  EXPECT_LT((inst.y - clean).norm(), 1e-12 * clean.norm());
}

TEST(GenerateInstance, NoiseVarianceMatches) {
  const auto inst =
      generate_instance({EnsembleKind::IidGaussian, 20000, 20}, PriorSpec::gaussian_unit(), 0.25, 9);
  EXPECT_NEAR(inst.noise.squaredNorm() / inst.noise.size(), 0.25, 0.25 * 0.05);
}

TEST(GenerateInstance, Deterministic) {
  const EnsembleSpec e{EnsembleKind::RowOrthogonal, 10, 20};
  const auto a = generate_instance(e, PriorSpec::bernoulli_gaussian(0.5), 0.1, 77);
  const auto b = generate_instance(e, PriorSpec::bernoulli_gaussian(0.5), 0.1, 77);
  EXPECT_EQ(a.A, b.A);
  EXPECT_EQ(a.y, b.y);
}

TEST(GenerateInstance, Validation) {
  EXPECT_THROW(generate_instance({EnsembleKind::IidGaussian, 4, 4}, PriorSpec::gaussian_unit(), 0.0, 1),
               InvalidArgument);
  EXPECT_THROW(generate_instance({EnsembleKind::RowOrthogonal, 5, 4}, PriorSpec::gaussian_unit(), 1.0, 1),
               InvalidArgument);
}

TEST(Auxiliaries, IdentityMatrix) {
  const Vector x = Vector::LinSpaced(4, -1.0, 2.0);
  const auto inst = make_instance(Matrix::Identity(4, 4), x, Vector::Zero(4), 1.0);
  const Auxiliaries aux = compute_auxiliaries(inst);
  EXPECT_EQ(aux.J, Matrix::Identity(4, 4));
  EXPECT_EQ(aux.theta, inst.y);
}

TEST(Auxiliaries, SquareRowOrthogonal) {
  const auto inst =
      generate_instance({EnsembleKind::RowOrthogonal, 16, 16}, PriorSpec::gaussian_unit(), 0.5, 3);
  const Auxiliaries aux = compute_auxiliaries(inst);
  EXPECT_LT((aux.J - Matrix::Identity(16, 16) / 0.5).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Auxiliaries, SymmetricPositiveSemidefinite) {
  const auto inst =
      generate_instance({EnsembleKind::IidGaussian, 30, 50}, PriorSpec::gaussian_unit(), 0.1, 3);
  const Auxiliaries aux = compute_auxiliaries(inst);
  EXPECT_LT((aux.J - aux.J.transpose()).cwiseAbs().maxCoeff(), 1e-14);
  Eigen::SelfAdjointEigenSolver<Matrix> es(aux.J);
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10 * aux.J.norm());
  const Vector theta = inst.A.transpose() * inst.y / inst.sigma_w2;
  EXPECT_LT((aux.theta - theta).norm(), 1e-12 * theta.norm());
}

TEST(MakeInstance, RejectsShapeMismatch) {
  EXPECT_THROW(make_instance(Matrix::Identity(3, 3), Vector::Zero(2), Vector::Zero(3), 1.0),
               InvalidArgument);
}
