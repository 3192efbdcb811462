#pragma once

#include <span>
#include <utility>

namespace specrank {

/// Moments of the i.i.d. noise entries together with the Gram shape: n is the
/// side of W = (1/p) N N^T and p the averaging dimension.
struct EntryMoments {
  double sigma2 = 1.0;  ///< E N^2
  double gamma4 = 3.0;  ///< E N^4
  long n = 2;
  long p = 2;

  /// Gaussian entries, gamma4 = 3 sigma2^2.
  static EntryMoments gaussian(long n, long p, double sigma2 = 1.0);
  /// Orders the dimensions so that n <= p; a tall matrix (n >= p) is handled
  /// through W_n = (1/n) N^T N with the roles swapped.
  static EntryMoments for_shape(long rows, long cols, double sigma2 = 1.0,
                                double gamma4 = 3.0);
  /// Throws DomainError on sigma2 <= 0, gamma4 < sigma2^2, n < 1 or p < 1.
  void validate() const;
};

/// Gumbel member of the GEV family (shape fixed at 0).
struct GevParams {
  double location = 0.0;
  double scale = 1.0;
  double shape = 0.0;
};

double gumbel_cdf(double x, const GevParams& g);
/// location - scale * log(-log q); DomainError outside (0, 1).
double gumbel_quantile(double q, const GevParams& g);

struct NoiseBound {
  GevParams diag_max;
  GevParams radius_max;
  double confidence = 0.99;
  /// quantile(diag_max, confidence) + quantile(radius_max, confidence).
  double lambda_max_bound = 0.0;
  /// sqrt((n - 1) / p), the rate at which the disc radius shrinks.
  double convergence_rate = 0.0;
};

/// Limit law of a diagonal entry of W: (sigma2, (gamma4 - sigma2^2) / p).
std::pair<double, double> diag_entry_dist(const EntryMoments& m);

/// Limit law of an off-diagonal entry: (0, (gamma4 + sigma2^2) / (4p)).
std::pair<double, double> offdiag_entry_dist(const EntryMoments& m);

/// Largest diagonal entry: Gumbel(sigma2, sqrt((gamma4 - sigma2^2) / p)).
/// Throws DegenerateScale when gamma4 == sigma2^2.
GevParams gev_max_diag(const EntryMoments& m);

/// Largest Gershgorin radius, from the half-normal moments of the
/// off-diagonal absolute values summed over the n - 1 entries of a column.
/// Throws DegenerateScale for n < 2.
GevParams gev_max_radius(const EntryMoments& m);

/// Distributional upper bound on the largest eigenvalue of W at the given
/// confidence. Throws DomainError for confidence outside (0, 1).
NoiseBound gershgorin_upper(const EntryMoments& m, double confidence);

/// Gumbel tail value e^{-e^{-a}} and its bound e^{e^{-2a}} - e^{-a}.
struct Exceedance {
  double exact;
  double bound;
};
Exceedance exceedance_inequality(double a);

/// Diagonal values of E[W] and E[W^2] for standardized entries:
/// (1, 1 + (n + 1) / p).
std::pair<double, double> wp_expected_moments(long n, long p);

/// Log joint density of the n unordered eigenvalues of a real Wishart
/// N N^T (N standard normal, n x p, n <= p), normalizing constant from the
/// Selberg integral in log-gamma form. Returns -infinity when two
/// eigenvalues coincide; throws DomainError for non-positive eigenvalues,
/// a length other than n, or n > p.
double wishart_log_density(std::span<const double> eigs, long n, long p);

}  // namespace specrank
