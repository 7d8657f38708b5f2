#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

namespace samp {

// S-transform of the limiting spectrum of A^T A for iid entries of variance
// 1/N: S(w) = 1 / (1 + w / alpha).  Throws DomainError at or beyond the pole.
double s_iid(double omega, double alpha);

// Row-orthogonal ensemble: S(w) = (1 + w) / (1 + w / alpha), alpha in (0, 1].
// For alpha == 1 the spectrum is a point mass at 1 and S is identically 1.
double s_row_orthogonal(double omega, double alpha);

// Memory coefficient 1 - 1/s of the residual recursion.
double onsager_coefficient(double s_value);

enum class SpectrumKind { IidGaussian, RowOrthogonal, Empirical, UserSupplied };

std::string_view to_string(SpectrumKind kind);

// tau(sigma_w2) = integral dP(x) / (1 + x / sigma_w2) over the limiting
// spectrum.  Row-orthogonal uses the two-atom law (1-alpha) delta_0 +
// alpha delta_{1/alpha}; iid integrates the Marchenko-Pastur law numerically.
double tau_closed_form(SpectrumKind kind, double alpha, double sigma_w2);

// (1/K) sum_i 1 / (1 + lambda_i / sigma_w2).
double tau_empirical(std::span<const double> eigenvalues, double sigma_w2);

// Marchenko-Pastur law of A^T A (entries variance 1/N, alpha = N/K): atom of
// mass max(0, 1 - alpha) at 0 plus the density below on
// [(1 - 1/sqrt(alpha))^2, (1 + 1/sqrt(alpha))^2].
double marchenko_pastur_density(double x, double alpha);
double marchenko_pastur_tau(double alpha, double sigma_w2);

// R-transform, normalized so that S(w) R(w S(w)) = 1 and R(0) is the
// spectrum mean.  iid is closed form; row-orthogonal inverts w -> w S(w) by
// safeguarded Newton.
double r_transform(double omega, SpectrumKind kind, double alpha);

class SpectralModel {
 public:
  using STransform = std::function<double(double)>;

  static SpectralModel iid_gaussian(double alpha);
  static SpectralModel row_orthogonal(double alpha);
  // S-transform obtained numerically from a finite spectrum by inverting its
  // eta-transform.
  static SpectralModel empirical(std::vector<double> eigenvalues, double alpha);
  // `branch_lower` bounds the arguments the precision solves may use.
  static SpectralModel user_supplied(double alpha, STransform s,
                                     double branch_lower = -std::numeric_limits<double>::infinity());

  SpectrumKind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  std::span<const double> eigenvalues() const { return eigenvalues_; }

  double s_transform(double omega) const;
  // Left end of the branch of S through omega = 0: the pole -alpha for the
  // closed-form ensembles (none for square row-orthogonal), the zero-mass
  // bound for empirical spectra, the caller's bound for user-supplied transforms.
  double branch_lower_bound() const;
  double r_transform(double omega) const;
  double tau(double sigma_w2) const;
  bool has_closed_form() const {
    return kind_ == SpectrumKind::IidGaussian || kind_ == SpectrumKind::RowOrthogonal;
  }

 private:
  SpectralModel(SpectrumKind kind, double alpha) : kind_(kind), alpha_(alpha) {}

  double empirical_s(double omega) const;

  SpectrumKind kind_;
  double alpha_;
  std::vector<double> eigenvalues_;
  double mean_ = 1.0;
  double zero_mass_ = 0.0;
  STransform user_;
  double user_lower_ = -std::numeric_limits<double>::infinity();
};

}  // namespace samp
