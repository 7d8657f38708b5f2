#include <gtest/gtest.h>

#include <cmath>

#include "samp/errors.hpp"
#include "samp/solvers.hpp"

using namespace samp;

namespace {

double suboptimal_identity_residual(double lam, double lam_prev, double e, const SpectralModel& s,
                                    double s2) {
  return std::abs(lam * s2 * s.s_transform(-(lam / lam_prev) * e) - 1.0);
}

}  // namespace

TEST(SolveLambdaSuboptimal, RowOrthogonalClosedFormGrid) {
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double lam_prev = std::pow(10.0, -2.0 + 4.0 * i / 9.0);
    for (int j = 0; j < 10; ++j) {
      const double e = 0.01 + 0.98 * j / 9.0;
      for (double a : {0.1, 1.0 / 3.0, 0.5, 0.8, 1.0}) {
        for (double s2 : {1e-3, 1e-2, 1.0}) {
          const auto s = SpectralModel::row_orthogonal(a);
          const double lam = solve_lambda_suboptimal(lam_prev, e, s, s2);
          ASSERT_GT(lam, 0.0);
          const double r = suboptimal_identity_residual(lam, lam_prev, e, s, s2);
          worst = std::max(worst, r);
          EXPECT_LT(r, 1e-10) << lam_prev << " " << e << " " << a << " " << s2;
        }
      }
    }
  }
  RecordProperty("max_residual", std::to_string(worst));
}

TEST(SolveLambdaSuboptimal, RowOrthogonalSquareIsInverseNoise) {
  const auto s = SpectralModel::row_orthogonal(1.0);
  for (double e : {0.05, 0.4, 0.9}) {
    for (double lp : {0.1, 1.0, 50.0}) EXPECT_DOUBLE_EQ(solve_lambda_suboptimal(lp, e, s, 0.01), 100.0);
  }
}

TEST(SolveLambdaSuboptimal, IidClosedForm) {
  const auto s = SpectralModel::iid_gaussian(0.5);
  const double lam = solve_lambda_suboptimal(3.0, 0.6, s, 0.01);
  EXPECT_DOUBLE_EQ(lam, 1.0 / (0.01 + 0.6 / (0.5 * 3.0)));
  EXPECT_LT(suboptimal_identity_residual(lam, 3.0, 0.6, s, 0.01), 1e-13);
}

TEST(SolveLambdaSuboptimal, GenericSpectrumUsesRootSolve) {
  // A user-supplied copy of the row-orthogonal S must reproduce the closed form.
  const double a = 1.0 / 3.0;
  const auto user =
      SpectralModel::user_supplied(a, [a](double w) { return s_row_orthogonal(w, a); }, -a);
  const auto ro = SpectralModel::row_orthogonal(a);
  for (double e : {0.05, 0.2, 0.6}) {
    for (double lp : {1.0, 20.0, 80.0}) {
      EXPECT_NEAR(solve_lambda_suboptimal(lp, e, user, 0.01), solve_lambda_suboptimal(lp, e, ro, 0.01),
                  1e-9 * solve_lambda_suboptimal(lp, e, ro, 0.01));
    }
  }
}

TEST(SolveLambdaSuboptimal, ZeroDerivativeGivesInverseNoise) {
  EXPECT_DOUBLE_EQ(solve_lambda_suboptimal(2.0, 0.0, SpectralModel::row_orthogonal(0.5), 0.02), 50.0);
  EXPECT_DOUBLE_EQ(solve_lambda_suboptimal(2.0, 0.0, SpectralModel::iid_gaussian(0.5), 0.02), 50.0);
}

TEST(SolveLambdaSuboptimal, Validation) {
  const auto s = SpectralModel::iid_gaussian(0.5);
  EXPECT_THROW(solve_lambda_suboptimal(0.0, 0.2, s, 0.01), InvalidArgument);
  EXPECT_THROW(solve_lambda_suboptimal(1.0, -0.2, s, 0.01), InvalidArgument);
  EXPECT_THROW(solve_lambda_suboptimal(1.0, 0.2, s, 0.0), InvalidArgument);
}

TEST(InitialLambda, IidReduction) {
  EXPECT_DOUBLE_EQ(initial_lambda(0.1, SpectralModel::iid_gaussian(1.0 / 3.0), 0.01),
                   1.0 / (0.01 + 0.1 * 3.0));
  // Row-orthogonal: lambda solves lambda = 1/(sigma_w2 S(-lambda m2)).
  const auto ro = SpectralModel::row_orthogonal(1.0 / 3.0);
  const double lam = initial_lambda(0.1, ro, 0.01);
  EXPECT_LT(std::abs(lam * 0.01 * ro.s_transform(-lam * 0.1) - 1.0), 1e-12);
}

TEST(SolveLambdaOptimal, GaussianPriorRowOrthogonal) {
  // <eta'> = lambda/(1+lambda) independent of kappa; the root is 1/tau - 1.
  const Denoiser d(PriorSpec::gaussian_unit());
  const Vector kappa = Vector::LinSpaced(16, -2.0, 2.0);
  const auto s = SpectralModel::row_orthogonal(0.5);
  const double lam = solve_lambda_optimal(kappa, d, s, 0.01, 1e-10, 200, 1.0);
  EXPECT_NEAR(lam, 1.0 / s.tau(0.01) - 1.0, 1e-9);
  EXPECT_NEAR(lam, 0.5 / 0.505, 1e-9);
}

TEST(SolveLambdaOptimal, GaussianPriorIid) {
  const Denoiser d(PriorSpec::gaussian_unit());
  const Vector kappa = Vector::Constant(4, 0.3);
  for (double a : {1.0 / 3.0, 0.5, 2.0}) {
    const auto s = SpectralModel::iid_gaussian(a);
    const double lam = solve_lambda_optimal(kappa, d, s, 0.01, 1e-10, 200, 5.0);
    EXPECT_NEAR(lam, 1.0 / s.tau(0.01) - 1.0, 1e-9 * lam) << "alpha=" << a;
  }
}

TEST(SolveLambdaOptimal, IidMatchesSelfConsistentClosedForm) {
  // At the root, lambda = 1/(sigma_w2 + v/alpha) with v = <eta'>/lambda.
  const Denoiser d(PriorSpec::bernoulli_gaussian(0.1));
  const Vector kappa = Vector::LinSpaced(200, -3.0, 3.0);
  const auto s = SpectralModel::iid_gaussian(1.0 / 3.0);
  const double lam = solve_lambda_optimal(kappa, d, s, 0.01, 1e-10, 200, 1.0);
  const double v = d.mean_eta_prime(kappa, lam) / lam;
  EXPECT_NEAR(lam, 1.0 / (0.01 + v * 3.0), 1e-9 * lam);
  EXPECT_LT(std::abs(lam * 0.01 * s.s_transform(-d.mean_eta_prime(kappa, lam)) - 1.0), 1e-10);
}

TEST(SolveLambdaOptimal, DegenerateDerivativeGivesInverseNoise) {
  // Huge |kappa| with a very sparse prior and a weak tilt: <eta'> -> 0.
  const Denoiser d(PriorSpec::bernoulli_gaussian(1e-3));
  const Vector kappa = Vector::Constant(8, 0.0);
  const auto s = SpectralModel::row_orthogonal(0.5);
  const double lam = solve_lambda_optimal(kappa, d, s, 1e4, 1e-10, 200, 1e-4);
  EXPECT_NEAR(lam, 1e-4, 1e-7);
}

TEST(SolveLambdaOptimal, IndependentOfStartingPoint) {
  const Denoiser d(PriorSpec::bernoulli_gaussian(0.1));
  const Vector kappa = Vector::LinSpaced(64, -2.0, 2.0);
  const auto s = SpectralModel::row_orthogonal(1.0 / 3.0);
  const double a = solve_lambda_optimal(kappa, d, s, 0.01, 1e-12, 200, 1e-6);
  const double b = solve_lambda_optimal(kappa, d, s, 0.01, 1e-12, 200, 1e6);
  EXPECT_NEAR(a, b, 1e-9 * a);
}

TEST(SolveLambdaOptimal, NoRootRaises) {
  // S > 0 everywhere but lambda sigma_w2 S never reaches 1.
  const Denoiser d(PriorSpec::gaussian_unit());
  const auto s = SpectralModel::user_supplied(0.5, [](double) { return 1e-320; });
  EXPECT_THROW(solve_lambda_optimal(Vector::Zero(3), d, s, 0.01, 1e-10, 200, 1.0), RootNotFound);
}

TEST(SolveLambdaOptimal, Validation) {
  const Denoiser d(PriorSpec::gaussian_unit());
  const auto s = SpectralModel::iid_gaussian(0.5);
  Vector bad = Vector::Zero(2);
  bad(0) = std::nan("");
  EXPECT_THROW(solve_lambda_optimal(bad, d, s, 0.01, 1e-10, 200, 1.0), InvalidArgument);
  EXPECT_THROW(solve_lambda_optimal(Vector::Zero(2), d, s, 0.01, 1e-10, 200, 0.0), InvalidArgument);
}
