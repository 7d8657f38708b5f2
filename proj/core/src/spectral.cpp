#include "samp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "samp/errors.hpp"
#include "quadrature.hpp"

namespace samp {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InvalidArgument("alpha must be positive, got " + std::to_string(alpha));
  }
}

// 1 + w/alpha, rejected only in a rounding neighbourhood of the pole.  Past
// the pole S is negative but finite, and 1 - 1/S stays the AMP coefficient.
double pole_factor(double omega, double alpha) {
  const double d = 1.0 + omega / alpha;
  if (!(std::abs(d) > 8.0 * kEps * (1.0 + std::abs(omega / alpha)))) {
    throw DomainError("S-transform argument " + std::to_string(omega) + " at the pole -alpha = " +
                      std::to_string(-alpha));
  }
  return d;
}

}  // namespace

double s_iid(double omega, double alpha) {
  require_alpha(alpha);
  return 1.0 / pole_factor(omega, alpha);
}

double s_row_orthogonal(double omega, double alpha) {
  require_alpha(alpha);
  if (alpha > 1.0) {
    throw InvalidArgument("row-orthogonal ensemble requires alpha <= 1");
  }
  if (alpha == 1.0) return 1.0;
  return (1.0 + omega) / pole_factor(omega, alpha);
}

double onsager_coefficient(double s_value) {
  if (s_value == 0.0 || !std::isfinite(s_value)) {
    throw DomainError("S-transform value must be finite and nonzero");
  }
  return 1.0 - 1.0 / s_value;
}

std::string_view to_string(SpectrumKind kind) {
  switch (kind) {
    case SpectrumKind::IidGaussian:
      return "iid";
    case SpectrumKind::RowOrthogonal:
      return "row-orth";
    case SpectrumKind::Empirical:
      return "empirical";
    case SpectrumKind::UserSupplied:
      return "user";
  }
  return "unknown";
}

double marchenko_pastur_density(double x, double alpha) {
  require_alpha(alpha);
  const double ratio = 1.0 / alpha;  // K / N
  const double lo = std::pow(1.0 - std::sqrt(ratio), 2);
  const double hi = std::pow(1.0 + std::sqrt(ratio), 2);
  if (x <= lo || x >= hi) return 0.0;
  return std::sqrt((hi - x) * (x - lo)) / (2.0 * std::numbers::pi * ratio * x);
}

double marchenko_pastur_tau(double alpha, double sigma_w2) {
  require_alpha(alpha);
  if (!(sigma_w2 > 0.0)) throw InvalidArgument("sigma_w2 must be positive");
  const double ratio = 1.0 / alpha;
  const double lo = std::pow(1.0 - std::sqrt(ratio), 2);
  const double hi = std::pow(1.0 + std::sqrt(ratio), 2);
  const double half = 0.5 * (hi - lo);
  const double atom = std::max(0.0, 1.0 - alpha);

  // x = lo + 2 half sin^2(t/2) removes the square-root edge behavior; the
  // Jacobian half sin t times sqrt((hi-x)(x-lo)) = half sin t gives the
  // smooth numerator half^2 sin^2 t.
  auto integrand = [&](double t) {
    const double s = std::sin(0.5 * t);
    const double c = std::cos(0.5 * t);
    const double x = lo + 2.0 * half * s * s;
    const double num = 4.0 * half * half * s * s * c * c;
    return num / (2.0 * std::numbers::pi * ratio * x) * sigma_w2 / (sigma_w2 + x);
  };
  const auto q = detail::adaptive_gauss_kronrod(integrand, 0.0, std::numbers::pi, 1e-13, 20);
  const double cont = q.value;
  const double err = q.error;
  if (!(err <= 1e-11 * std::abs(cont) + 1e-15)) {
    std::ostringstream msg;
    msg << "Marchenko-Pastur tau quadrature did not converge (error estimate " << err << ")";
    throw QuadratureError(msg.str());
  }
  return atom + cont;
}

double tau_closed_form(SpectrumKind kind, double alpha, double sigma_w2) {
  require_alpha(alpha);
  if (!(sigma_w2 > 0.0)) throw InvalidArgument("sigma_w2 must be positive");
  switch (kind) {
    case SpectrumKind::RowOrthogonal: {
      if (alpha > 1.0) throw InvalidArgument("row-orthogonal ensemble requires alpha <= 1");
      const double as = alpha * sigma_w2;
      return (1.0 - alpha) + alpha * as / (as + 1.0);
    }
    case SpectrumKind::IidGaussian:
      return marchenko_pastur_tau(alpha, sigma_w2);
    default:
      break;
  }
  throw InvalidArgument("no closed-form tau for spectrum kind " + std::string(to_string(kind)));
}

double tau_empirical(std::span<const double> eigenvalues, double sigma_w2) {
  if (eigenvalues.empty()) throw InvalidArgument("empty spectrum");
  if (!(sigma_w2 > 0.0)) throw InvalidArgument("sigma_w2 must be positive");
  double acc = 0.0;
  for (double ev : eigenvalues) {
    if (ev < 0.0) throw InvalidArgument("negative eigenvalue in spectrum");
    acc += sigma_w2 / (sigma_w2 + ev);
  }
  return acc / static_cast<double>(eigenvalues.size());
}

double r_transform(double omega, SpectrumKind kind, double alpha) {
  require_alpha(alpha);
  if (kind == SpectrumKind::IidGaussian) {
    const double d = 1.0 - omega / alpha;
    if (!(std::abs(d) > 8.0 * kEps * (1.0 + std::abs(omega / alpha)))) {
      throw DomainError("R-transform argument at the pole alpha");
    }
    return 1.0 / d;
  }
  if (kind != SpectrumKind::RowOrthogonal) {
    throw InvalidArgument("R-transform implemented for the closed-form ensembles only");
  }
  if (alpha > 1.0) throw InvalidArgument("row-orthogonal ensemble requires alpha <= 1");
  if (alpha == 1.0) return 1.0;

  // f(w) = w S(w) = w (1 + w) / (1 + w/alpha) is strictly increasing on
  // (-alpha, inf) for alpha < 1 and sweeps the whole real line.
  auto f = [alpha](double w) { return w * (1.0 + w) / (1.0 + w / alpha); };
  auto df = [alpha](double w) {
    const double d = alpha + w;
    return alpha * (w * w + 2.0 * alpha * w + alpha) / (d * d);
  };
  double lo = -alpha;
  double hi = std::max(1.0, 2.0 * std::abs(omega) + 1.0);
  while (f(hi) < omega) hi *= 2.0;
  double w = std::clamp(omega, 0.5 * (lo + std::min(0.0, hi)), hi);
  for (int it = 0; it < 200; ++it) {
    const double g = f(w) - omega;
    if (std::abs(g) <= 4.0 * kEps * (1.0 + std::abs(omega))) break;
    if (g > 0.0) hi = w; else lo = w;
    double next = w - g / df(w);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == w) break;
    w = next;
  }
  return 1.0 / s_row_orthogonal(w, alpha);
}

SpectralModel SpectralModel::iid_gaussian(double alpha) {
  require_alpha(alpha);
  return SpectralModel(SpectrumKind::IidGaussian, alpha);
}

SpectralModel SpectralModel::row_orthogonal(double alpha) {
  require_alpha(alpha);
  if (alpha > 1.0) throw InvalidArgument("row-orthogonal ensemble requires alpha <= 1");
  return SpectralModel(SpectrumKind::RowOrthogonal, alpha);
}

SpectralModel SpectralModel::empirical(std::vector<double> eigenvalues, double alpha) {
  require_alpha(alpha);
  if (eigenvalues.empty()) throw InvalidArgument("empty spectrum");
  SpectralModel m(SpectrumKind::Empirical, alpha);
  std::sort(eigenvalues.begin(), eigenvalues.end());
  if (eigenvalues.front() < 0.0) throw InvalidArgument("negative eigenvalue in spectrum");
  const double n = static_cast<double>(eigenvalues.size());
  m.mean_ = std::accumulate(eigenvalues.begin(), eigenvalues.end(), 0.0) / n;
  if (!(m.mean_ > 0.0)) throw InvalidArgument("spectrum must have positive mean");
  const double tiny = 1e-12 * eigenvalues.back();
  m.zero_mass_ = static_cast<double>(std::count_if(eigenvalues.begin(), eigenvalues.end(),
                                                   [tiny](double v) { return v <= tiny; })) /
                 n;
  m.eigenvalues_ = std::move(eigenvalues);
  return m;
}

SpectralModel SpectralModel::user_supplied(double alpha, STransform s, double branch_lower) {
  require_alpha(alpha);
  if (!s) throw InvalidArgument("user-supplied S-transform is empty");
  if (!(branch_lower < 0.0)) throw InvalidArgument("branch lower bound must be negative");
  SpectralModel m(SpectrumKind::UserSupplied, alpha);
  m.user_ = std::move(s);
  m.user_lower_ = branch_lower;
  return m;
}

double SpectralModel::s_transform(double omega) const {
  switch (kind_) {
    case SpectrumKind::IidGaussian:
      return s_iid(omega, alpha_);
    case SpectrumKind::RowOrthogonal:
      return s_row_orthogonal(omega, alpha_);
    case SpectrumKind::Empirical:
      return empirical_s(omega);
    case SpectrumKind::UserSupplied: {
      const double s = user_(omega);
      if (!std::isfinite(s) || !(s > 0.0)) {
        throw DomainError("user-supplied S-transform inadmissible at " + std::to_string(omega));
      }
      return s;
    }
  }
  throw InvalidArgument("unknown spectrum kind");
}

double SpectralModel::branch_lower_bound() const {
  switch (kind_) {
    case SpectrumKind::IidGaussian:
      return -alpha_;
    case SpectrumKind::RowOrthogonal:
      if (alpha_ < 1.0) return -alpha_;
      break;
    case SpectrumKind::Empirical:
      return zero_mass_ - 1.0;
    case SpectrumKind::UserSupplied:
      return user_lower_;
  }
  return -std::numeric_limits<double>::infinity();
}

// S(x) = -(1 + x)/x * eta^{-1}(1 + x) with eta(g) = <1 / (1 + g lambda)>,
// admissible for x in (zero_mass - 1, 0].
double SpectralModel::empirical_s(double x) const {
  if (x > 0.0 || !(x > zero_mass_ - 1.0)) {
    throw DomainError("empirical S-transform argument " + std::to_string(x) +
                      " outside (" + std::to_string(zero_mass_ - 1.0) + ", 0]");
  }
  if (x > -1e-9) {
    double m2 = 0.0;
    for (double ev : eigenvalues_) m2 += ev * ev;
    m2 /= static_cast<double>(eigenvalues_.size());
    return 1.0 / mean_ + (mean_ * mean_ - m2) / (mean_ * mean_ * mean_) * x;
  }
  const double target = 1.0 + x;
  auto eta = [this, target](double g) {
    double acc = 0.0;
    for (double ev : eigenvalues_) acc += 1.0 / (1.0 + g * ev);
    return acc / static_cast<double>(eigenvalues_.size()) - target;
  };
  double hi = 1.0 / mean_;
  int guard = 0;
  while (eta(hi) > 0.0) {
    hi *= 2.0;
    if (++guard > 2000) throw DomainError("empirical S-transform: eta inverse not bracketed");
  }
  std::uintmax_t iters = 200;
  auto [a, b] = boost::math::tools::toms748_solve(
      eta, 0.0, hi, eta(0.0), eta(hi), boost::math::tools::eps_tolerance<double>(52), iters);
  const double g = 0.5 * (a + b);
  return -(1.0 + x) / x * g;
}

double SpectralModel::r_transform(double omega) const {
  if (!has_closed_form()) {
    throw InvalidArgument("R-transform implemented for the closed-form ensembles only");
  }
  return samp::r_transform(omega, kind_, alpha_);
}

double SpectralModel::tau(double sigma_w2) const {
  switch (kind_) {
    case SpectrumKind::IidGaussian:
    case SpectrumKind::RowOrthogonal:
      return tau_closed_form(kind_, alpha_, sigma_w2);
    case SpectrumKind::Empirical:
      return tau_empirical(eigenvalues_, sigma_w2);
    case SpectrumKind::UserSupplied:
      break;
  }
  throw InvalidArgument("tau unavailable for a user-supplied S-transform");
}

}  // namespace samp
