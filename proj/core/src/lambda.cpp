#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "samp/errors.hpp"
#include "samp/solvers.hpp"

namespace samp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// h(lambda) = lambda sigma_w2 S(-omega(lambda)) - 1.  Leaving the branch of
// S through zero, or a nonpositive S, means lambda has overshot the admissible
// region and is reported as +inf so the bisection moves left.
struct PrecisionIdentity {
  const SpectralModel& spectral;
  double sigma_w2;
  std::function<double(double)> omega;

  double operator()(double lambda) const {
    const double w = -omega(lambda);
    if (!(w > spectral.branch_lower_bound())) return kInf;
    double s;
    try {
      s = spectral.s_transform(w);
    } catch (const DomainError&) {
      return kInf;
    }
    if (!std::isfinite(s) || s <= 0.0) return kInf;
    return lambda * sigma_w2 * s - 1.0;
  }
};

double solve_precision_identity(const PrecisionIdentity& h, double tol, int max_evals,
                                double lambda_init) {
  int evals = 0;
  auto eval = [&](double lambda) {
    if (++evals > max_evals) {
      std::ostringstream msg;
      msg << "precision identity: no root within " << max_evals << " evaluations (last lambda "
          << lambda << ")";
      throw RootNotFound(msg.str());
    }
    return h(lambda);
  };

  double lo = 1e-8;
  double hi = 1e8;
  double h_lo = kInf;
  double h_hi = kInf;
  bool have_lo = false;
  bool have_hi = false;

  // Damped fixed point lambda <- sqrt(lambda / (sigma_w2 S)), abandoned as
  // soon as it stops contracting.
  if (std::isfinite(lambda_init) && lambda_init > 0.0) {
    double lambda = lambda_init;
    double hv = eval(lambda);
    for (int i = 0; i < 20 && std::isfinite(hv); ++i) {
      if (std::abs(hv) < tol) return lambda;
      if (hv < 0.0 && (!have_lo || lambda > lo)) { lo = lambda; h_lo = hv; have_lo = true; }
      if (hv > 0.0 && (!have_hi || lambda < hi)) { hi = lambda; h_hi = hv; have_hi = true; }
      const double next = lambda * std::sqrt(1.0 / (1.0 + hv));
      if (!(next > 1e-300 && next < 1e300)) break;
      const double h_next = eval(next);
      if (!std::isfinite(h_next) || std::abs(h_next) >= std::abs(hv)) {
        if (std::isfinite(h_next)) {
          if (h_next < 0.0 && (!have_lo || next > lo)) { lo = next; h_lo = h_next; have_lo = true; }
          if (h_next > 0.0 && (!have_hi || next < hi)) { hi = next; h_hi = h_next; have_hi = true; }
        } else if (!have_hi || next < hi) {
          hi = next; h_hi = kInf; have_hi = true;
        }
        break;
      }
      lambda = next;
      hv = h_next;
    }
    if (have_lo && have_hi && lo > hi) have_lo = have_hi = false;
  }

  // Geometric bracket expansion.
  if (!have_lo) {
    if (have_hi && hi < lo) lo = hi / 10.0;
    h_lo = eval(lo);
    while (!(h_lo < 0.0)) {
      if (std::isfinite(h_lo) && std::abs(h_lo) < tol) return lo;
      if (lo < 1e-300) throw RootNotFound("precision identity: no sign change below lambda = 1e-300");
      hi = lo; h_hi = h_lo; have_hi = true;
      lo /= 10.0;
      h_lo = eval(lo);
    }
  }
  if (!have_hi) {
    if (hi <= lo) hi = lo * 10.0;
    h_hi = eval(hi);
    while (!(h_hi > 0.0)) {
      if (std::abs(h_hi) < tol) return hi;
      if (hi > 1e300) throw RootNotFound("precision identity: no sign change above lambda = 1e300");
      lo = hi; h_lo = h_hi;
      hi *= 10.0;
      h_hi = eval(hi);
    }
  }

  // Bisection in log lambda.
  for (;;) {
    const double mid = std::sqrt(lo * hi);
    if (!(mid > lo && mid < hi) || hi / lo - 1.0 < 8.0 * std::numeric_limits<double>::epsilon()) {
      // Collapsed bracket: accept the finite endpoint closest to the root.
      if (std::isfinite(h_hi) && std::abs(h_hi) < std::abs(h_lo)) return hi;
      if (std::abs(h_lo) < std::sqrt(tol)) return lo;
      throw RootNotFound("precision identity: bracket collapsed onto a discontinuity at lambda = " +
                         std::to_string(lo));
    }
    const double h_mid = eval(mid);
    if (std::isfinite(h_mid) && std::abs(h_mid) < tol) return mid;
    if (h_mid < 0.0) {
      lo = mid; h_lo = h_mid;
    } else {
      hi = mid; h_hi = h_mid;
    }
  }
}

void require_sigma(double sigma_w2) {
  if (!(sigma_w2 > 0.0) || !std::isfinite(sigma_w2)) {
    throw InvalidArgument("sigma_w2 must be positive and finite");
  }
}

}  // namespace

double solve_lambda_optimal(const Vector& kappa, const Denoiser& denoiser,
                            const SpectralModel& spectral, double sigma_w2, double inner_tol,
                            int inner_max, double lambda_init) {
  require_sigma(sigma_w2);
  if (!kappa.allFinite()) throw InvalidArgument("kappa must be finite");
  if (!(lambda_init > 0.0)) throw InvalidArgument("lambda_init must be positive");
  if (!(inner_tol > 0.0) || inner_max < 1) throw InvalidArgument("invalid inner solve settings");
  PrecisionIdentity h{spectral, sigma_w2,
                      [&](double lambda) { return denoiser.mean_eta_prime(kappa, lambda); }};
  return solve_precision_identity(h, inner_tol, inner_max, lambda_init);
}

double solve_lambda_suboptimal(double lambda_prev, double eta_prime_mean_prev,
                               const SpectralModel& spectral, double sigma_w2) {
  require_sigma(sigma_w2);
  if (!(lambda_prev > 0.0)) throw InvalidArgument("lambda_prev must be positive");
  if (!(eta_prime_mean_prev >= 0.0)) throw InvalidArgument("<eta'> must be nonnegative");
  const double alpha = spectral.alpha();
  const double v = eta_prime_mean_prev / lambda_prev;

  switch (spectral.kind()) {
    case SpectrumKind::IidGaussian:
      return 1.0 / (sigma_w2 + v / alpha);
    case SpectrumKind::RowOrthogonal: {
      if (alpha == 1.0 || v == 0.0) return 1.0 / sigma_w2;
      // Smaller root of alpha sigma_w2 chi lambda^2 - (1 + chi) lambda + 1/sigma_w2 = 0,
      // written without the cancellation of 1 + chi - sqrt(D).
      const double chi = v / (alpha * sigma_w2);
      const double disc = (1.0 + chi) * (1.0 + chi) - 4.0 * alpha * chi;
      if (disc < 0.0) {
        throw std::logic_error("row-orthogonal precision update: negative discriminant");
      }
      return 2.0 / (sigma_w2 * (1.0 + chi + std::sqrt(disc)));
    }
    case SpectrumKind::Empirical:
    case SpectrumKind::UserSupplied:
      break;
  }
  PrecisionIdentity h{spectral, sigma_w2, [v](double lambda) { return lambda * v; }};
  return solve_precision_identity(h, 1e-12, 400, 1.0 / sigma_w2);
}

double initial_lambda(double prior_second_moment, const SpectralModel& spectral,
                      double sigma_w2) {
  if (!(prior_second_moment > 0.0)) throw InvalidArgument("prior second moment must be positive");
  return solve_lambda_suboptimal(1.0, prior_second_moment, spectral, sigma_w2);
}

}  // namespace samp
