#include "samp/denoiser.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>


#include "samp/errors.hpp"
#include "quadrature.hpp"

namespace samp {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

void require_precision(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgument("tilt precision lambda must be positive and finite, got " +
                          std::to_string(lambda));
  }
}

double log_normal_pdf(double x, double var) {
  return -0.5 * (kLog2Pi + std::log(var) + x * x / var);
}

}  // namespace

DenoiserOutput denoise_gaussian(double kappa, double lambda) {
  require_precision(lambda);
  const double v = 1.0 / lambda;
  DenoiserOutput out;
  out.eta = kappa * lambda / (1.0 + lambda);
  out.eta_prime = lambda / (1.0 + lambda);
  out.log_partition = log_normal_pdf(kappa, 1.0 + v);
  return out;
}

DenoiserOutput denoise_bernoulli_gaussian(double kappa, double lambda, double rho) {
  require_precision(lambda);
  if (!(rho > 0.0 && rho <= 1.0)) {
    throw InvalidArgument("bernoulli-gaussian rho must lie in (0, 1], got " + std::to_string(rho));
  }
  const double v = 1.0 / lambda;
  // Slab: kappa ~ N(0, 1 + v); spike: kappa ~ N(0, v).
  const double log_slab = std::log(rho) + log_normal_pdf(kappa, 1.0 + v);
  const double m1 = kappa * lambda / (1.0 + lambda);
  const double s1 = 1.0 / (1.0 + lambda);  // = v / (1 + v)

  DenoiserOutput out;
  if (rho == 1.0) {
    out.eta = m1;
    out.eta_prime = lambda * s1;
    out.log_partition = log_slab;
    return out;
  }
  const double log_spike = std::log1p(-rho) + log_normal_pdf(kappa, v);
  const double d = log_spike - log_slab;
  // pi = P(slab | kappa), om = 1 - pi, each computed without cancellation.
  const double pi = 1.0 / (1.0 + std::exp(d));
  const double om = 1.0 / (1.0 + std::exp(-d));
  const double hi = std::max(log_slab, log_spike);
  out.log_partition = hi + std::log(std::exp(log_slab - hi) + std::exp(log_spike - hi));
  out.eta = pi * m1;
  // lambda * Var = lambda * (pi (m1^2 + s1) - pi^2 m1^2)
  //             = pi om lambda m1^2 + pi lambda s1
  out.eta_prime = pi * om * lambda * m1 * m1 + pi * lambda * s1;
  return out;
}

QuadraturePrior quadrature_prior(const PriorSpec& prior) {
  prior.validate();
  QuadraturePrior q;
  const double rho = prior.rho;
  q.density = [rho](double x) {
    return rho * std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  };
  if (rho < 1.0) q.atoms.push_back({0.0, 1.0 - rho});
  return q;
}

DenoiserOutput denoise_quadrature(const QuadraturePrior& prior, double kappa, double lambda) {
  require_precision(lambda);
  const double width = 1.0 / std::sqrt(lambda);
  const double lo = kappa - 12.0 * width - 12.0;
  const double hi = kappa + 12.0 * width + 12.0;

  // Break points around the tilt so narrow peaks are never skipped.
  std::vector<double> cuts{lo};
  for (int j = -12; j <= 12; ++j) {
    const double c = kappa + j * width;
    if (c > lo && c < hi) cuts.push_back(c);
  }
  cuts.push_back(0.0);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  cuts.erase(std::remove_if(cuts.begin(), cuts.end(), [&](double c) { return c < lo || c > hi; }),
             cuts.end());

  // Tilt written relative to its peak so values stay O(1).
  auto tilt = [&](double x) { return std::exp(-0.5 * lambda * (x - kappa) * (x - kappa)); };

  // `zero` is an extra break point where the integrand vanishes.
  auto integrate = [&](auto&& f, double zero) {
    std::vector<double> pts = cuts;
    if (zero > lo && zero < hi) {
      pts.insert(std::upper_bound(pts.begin(), pts.end(), zero), zero);
      pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    }
    double total = 0.0;
    double abs_total = 0.0;
    double err_total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const auto part = detail::adaptive_gauss_kronrod(f, pts[i], pts[i + 1], 1e-13, 20);
      total += part.value;
      abs_total += part.l1;
      err_total += part.error;
    }
    if (!(err_total <= 1e-12 * std::max(abs_total, std::numeric_limits<double>::min()))) {
      throw QuadratureError("tilted-moment quadrature did not reach 1e-12 (kappa=" +
                            std::to_string(kappa) + ", lambda=" + std::to_string(lambda) + ")");
    }
    return total;
  };

  double z = integrate([&](double x) { return prior.density(x) * tilt(x); }, 0.0);
  double m1 = integrate([&](double x) { return x * prior.density(x) * tilt(x); }, 0.0);
  for (const auto& a : prior.atoms) {
    const double t = a.weight * tilt(a.location);
    z += t;
    m1 += a.location * t;
  }
  if (!(z > 0.0)) throw QuadratureError("tilted belief has zero mass");
  const double mean = m1 / z;
  double c2 = integrate([&](double x) {
    const double d = x - mean;
    return d * d * prior.density(x) * tilt(x);
  }, mean);
  for (const auto& a : prior.atoms) {
    const double d = a.location - mean;
    c2 += d * d * a.weight * tilt(a.location);
  }
  DenoiserOutput out;
  out.eta = mean;
  out.eta_prime = lambda * c2 / z;
  // Z = int p(x) N(x | kappa, 1/lambda) dx; the normalizer of N was dropped above.
  out.log_partition = std::log(z) + 0.5 * std::log(lambda) - 0.5 * kLog2Pi;
  return out;
}

Denoiser::Denoiser(PriorSpec prior) : prior_(prior) { prior_.validate(); }

DenoiserOutput Denoiser::operator()(double kappa, double lambda) const {
  if (prior_.kind == PriorKind::GaussianUnit) return denoise_gaussian(kappa, lambda);
  return denoise_bernoulli_gaussian(kappa, lambda, prior_.rho);
}

void Denoiser::apply(const Vector& kappa, double lambda, Vector& eta, Vector& eta_prime) const {
  eta.resize(kappa.size());
  eta_prime.resize(kappa.size());
  for (Index k = 0; k < kappa.size(); ++k) {
    const auto o = (*this)(kappa(k), lambda);
    eta(k) = o.eta;
    eta_prime(k) = o.eta_prime;
  }
}

void Denoiser::apply(const Vector& kappa, const Vector& lambda, Vector& eta,
                     Vector& eta_prime) const {
  if (lambda.size() != kappa.size()) throw InvalidArgument("kappa/lambda size mismatch");
  eta.resize(kappa.size());
  eta_prime.resize(kappa.size());
  for (Index k = 0; k < kappa.size(); ++k) {
    const auto o = (*this)(kappa(k), lambda(k));
    eta(k) = o.eta;
    eta_prime(k) = o.eta_prime;
  }
}

double Denoiser::mean_eta_prime(const Vector& kappa, double lambda) const {
  double acc = 0.0;
  for (Index k = 0; k < kappa.size(); ++k) acc += (*this)(kappa(k), lambda).eta_prime;
  return acc / static_cast<double>(kappa.size());
}

double eta_prime_fd_check(const Denoiser& denoiser, double kappa, double lambda, double h) {
  if (!(h > 0.0)) throw InvalidArgument("finite-difference step must be positive");
  const double fd = (denoiser(kappa + h, lambda).eta - denoiser(kappa - h, lambda).eta) / (2.0 * h);
  return std::abs(fd - denoiser(kappa, lambda).eta_prime);
}

}  // namespace samp
