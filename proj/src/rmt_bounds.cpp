#include "specrank/rmt_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <functional>
#include <numbers>
#include <vector>

#include "specrank/errors.hpp"

namespace specrank {

EntryMoments EntryMoments::gaussian(long n, long p, double sigma2) {
  EntryMoments m{sigma2, 3.0 * sigma2 * sigma2, n, p};
  m.validate();
  return m;
}

EntryMoments EntryMoments::for_shape(long rows, long cols, double sigma2,
                                     double gamma4) {
  EntryMoments m{sigma2, gamma4, std::min(rows, cols), std::max(rows, cols)};
  m.validate();
  return m;
}

void EntryMoments::validate() const {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
    throw DomainError("sigma2 must be positive");
  // Jensen: E N^4 >= (E N^2)^2, allowing for round-off in the inputs.
  if (!(gamma4 >= sigma2 * sigma2 * (1.0 - 1e-12)) || !std::isfinite(gamma4))
    throw DomainError("gamma4 must be at least sigma2^2");
  if (n < 1 || p < 1) throw DomainError("dimensions must be positive");
}

double gumbel_cdf(double x, const GevParams& g) {
  return std::exp(-std::exp(-(x - g.location) / g.scale));
}

double gumbel_quantile(double q, const GevParams& g) {
  if (!(q > 0.0) || !(q < 1.0))
    throw DomainError("quantile level must lie in (0, 1)");
  return g.location - g.scale * std::log(-std::log(q));
}

std::pair<double, double> diag_entry_dist(const EntryMoments& m) {
  m.validate();
  const double s4 = m.sigma2 * m.sigma2;
  return {m.sigma2, std::max(0.0, m.gamma4 - s4) / static_cast<double>(m.p)};
}

std::pair<double, double> offdiag_entry_dist(const EntryMoments& m) {
  m.validate();
  const double s4 = m.sigma2 * m.sigma2;
  return {0.0, (m.gamma4 + s4) / (4.0 * static_cast<double>(m.p))};
}

GevParams gev_max_diag(const EntryMoments& m) {
  const auto [mean, var] = diag_entry_dist(m);
  if (!(var > 0.0))
    throw DegenerateScale("gamma4 equals sigma2^2: diagonal entries are constant");
  return {mean, std::sqrt(var), 0.0};
}

GevParams gev_max_radius(const EntryMoments& m) {
  m.validate();
  if (m.n < 2) throw DegenerateScale("a 1 x 1 Gram matrix has no off-diagonal");
  const double pi = std::numbers::pi;
  const double k = static_cast<double>(m.n - 1);
  const double p = static_cast<double>(m.p);
  const double tail = m.gamma4 + m.sigma2 * m.sigma2;
  const double location = std::sqrt(k * k * tail / (2.0 * p * pi));
  const double scale = std::sqrt(k * (pi - 2.0) * tail / (4.0 * p * pi));
  return {location, scale, 0.0};
}

NoiseBound gershgorin_upper(const EntryMoments& m, double confidence) {
  if (!(confidence > 0.0) || !(confidence < 1.0))
    throw DomainError("confidence must lie in (0, 1)");
  NoiseBound b;
  b.diag_max = gev_max_diag(m);
  b.radius_max = gev_max_radius(m);
  b.confidence = confidence;
  b.lambda_max_bound = gumbel_quantile(confidence, b.diag_max) +
                       gumbel_quantile(confidence, b.radius_max);
  b.convergence_rate =
      std::sqrt(static_cast<double>(m.n - 1) / static_cast<double>(m.p));
  return b;
}

Exceedance exceedance_inequality(double a) {
  const double x = std::exp(-a);
  return {std::exp(-x), std::exp(x * x) - x};
}

std::pair<double, double> wp_expected_moments(long n, long p) {
  if (n < 1 || p < 1) throw DomainError("dimensions must be positive");
  return {1.0, 1.0 + static_cast<double>(n + 1) / static_cast<double>(p)};
}

double wishart_log_density(std::span<const double> eigs, long n, long p) {
  if (n < 1 || p < n) throw DomainError("need 1 <= n <= p");
  if (static_cast<long>(eigs.size()) != n)
    throw DomainError("expected exactly n eigenvalues");
  for (double v : eigs)
    if (!(v > 0.0) || !std::isfinite(v))
      throw DomainError("eigenvalues must be positive and finite");

  const double nd = static_cast<double>(n);
  const double pd = static_cast<double>(p);
  // log Z = -(np/2) log 2 + sum_j [lgamma(3/2) - lgamma(j/2 + 1)
  //                               - lgamma((p - n + j)/2)]
  double log_z = -0.5 * nd * pd * std::numbers::ln2;
  for (long j = 1; j <= n; ++j) {
    const double jd = static_cast<double>(j);
    log_z += std::lgamma(1.5) - std::lgamma(0.5 * jd + 1.0) -
             std::lgamma(0.5 * (pd - nd + jd));
  }

  // Sorted so that every ordering of the input sums identically.
  std::vector<double> l(eigs.begin(), eigs.end());
  std::sort(l.begin(), l.end(), std::greater<>());
  double sum = 0.0, sum_log = 0.0, vandermonde = 0.0;
  for (std::size_t i = 0; i < l.size(); ++i) {
    sum += l[i];
    sum_log += std::log(l[i]);
    for (std::size_t k = i + 1; k < l.size(); ++k) {
      const double gap = l[i] - l[k];
      if (gap == 0.0) return -std::numeric_limits<double>::infinity();
      vandermonde += std::log(gap);
    }
  }
  return log_z - 0.5 * sum + 0.5 * (pd - nd - 1.0) * sum_log + vandermonde;
}

}  // namespace specrank
