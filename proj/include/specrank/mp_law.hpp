#pragma once

#include <utility>

#include <Eigen/Core>

#include "specrank/random.hpp"
#include "specrank/spectra.hpp"

namespace specrank {

/// Marchenko-Pastur law with ratio c and noise variance sigma2, restricted to
/// its continuous part. For c > 1 the continuous part carries mass 1/c; it is
/// renormalized here so that pdf/cdf/quantile describe the nonzero
/// eigenvalues.
struct MpModel {
  double c = 1.0;
  double sigma2 = 1.0;
  double c_minus = 0.0;
  double c_plus = 4.0;

  /// Throws DomainError unless c > 0 and sigma2 > 0.
  static MpModel make(double c, double sigma2);

  /// Mass of the continuous part of the unnormalized law: min(1, 1/c).
  double continuous_mass() const { return c > 1.0 ? 1.0 / c : 1.0; }
};

/// (sigma2 (1 - sqrt c)^2, sigma2 (1 + sqrt c)^2).
std::pair<double, double> mp_support(double c, double sigma2);

double mp_pdf(double y, const MpModel& model);
double mp_cdf(double y, const MpModel& model);

/// Inverse of mp_cdf by bisection down to a bracket of 1e-10 * c_plus.
/// Throws DomainError for q outside (0, 1).
double mp_quantile(double q, const MpModel& model);

/// E[Y 1{Y <= y}] under the (renormalized) law.
double mp_partial_mean(double y, const MpModel& model);

/// count i.i.d. inverse-CDF draws, sorted non-increasing.
Eigen::VectorXd mp_sample(Eigen::Index count, const MpModel& model, Rng& rng);

struct NoiseVarianceOptions {
  /// Fraction of the full spectrum, counted from the bottom, treated as noise.
  double trailing_fraction = 0.5;
};

/// Noise variance matched to the trailing part of the spectrum: the mean of
/// the smallest ceil(fraction * side) eigenvalues, divided by the mean the
/// unit-variance law puts on the same lower quantile range. Eigenvalues past
/// n_prime enter through the trace identity. Throws DomainError for fewer
/// than four eigenvalues and DegenerateSpectrum when the trailing part is
/// numerically zero.
double estimate_noise_variance(const SpectrumEstimate& spectrum,
                               const NoiseVarianceOptions& opts = {});

/// Noise model matched to a spectrum: ratio = spectrum.gram_ratio().
MpModel noise_model(const SpectrumEstimate& spectrum, double sigma2);

}  // namespace specrank
