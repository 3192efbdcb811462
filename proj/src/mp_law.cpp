#include "specrank/mp_law.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "specrank/errors.hpp"

namespace specrank {

namespace {

// Angle of y under the substitution y = mid - half * cos(theta), which maps
// the support onto [0, pi] and turns the square-root factor into
// half * sin(theta).
double support_angle(double y, const MpModel& m) {
  const double mid = 0.5 * (m.c_minus + m.c_plus);
  const double half = 0.5 * (m.c_plus - m.c_minus);
  return std::acos(std::clamp((mid - y) / half, -1.0, 1.0));
}

}  // namespace

std::pair<double, double> mp_support(double c, double sigma2) {
  if (!(c > 0.0) || !(sigma2 > 0.0) || !std::isfinite(c) ||
      !std::isfinite(sigma2))
    throw DomainError("MP parameters must be positive and finite");
  const double root = std::sqrt(c);
  return {sigma2 * (1.0 - root) * (1.0 - root),
          sigma2 * (1.0 + root) * (1.0 + root)};
}

MpModel MpModel::make(double c, double sigma2) {
  const auto [lo, hi] = mp_support(c, sigma2);
  return MpModel{c, sigma2, lo, hi};
}

double mp_pdf(double y, const MpModel& m) {
  if (!(y > m.c_minus) || !(y < m.c_plus)) return 0.0;
  const double root = std::sqrt((y - m.c_minus) * (m.c_plus - y));
  return root / (2.0 * std::numbers::pi * m.sigma2 * m.c * y) /
         m.continuous_mass();
}

// Closed form of the integral of the density: with alpha = (1 + c) / (2 sqrt c)
// the antiderivative in theta is sin t + alpha t - (alpha^2 - 1) J(t), where
// J is the elementary integral of 1 / (alpha - cos t).
double mp_cdf(double y, const MpModel& m) {
  if (y <= m.c_minus) return 0.0;
  if (y >= m.c_plus) return 1.0;
  const double theta = support_angle(y, m);
  const double sc = std::sqrt(m.c);
  const double alpha = (1.0 + m.c) / (2.0 * sc);
  const double gap = std::abs(1.0 - m.c) / (2.0 * sc);
  const double angle = std::atan2((1.0 + sc) * std::sin(0.5 * theta),
                                  std::abs(1.0 - sc) * std::cos(0.5 * theta));
  const double area = std::sin(theta) + alpha * theta - 2.0 * gap * angle;
  const double total = std::numbers::pi * std::min(1.0, m.c) / sc;
  return std::clamp(area / total, 0.0, 1.0);
}

double mp_partial_mean(double y, const MpModel& m) {
  if (y <= m.c_minus) return 0.0;
  const double theta = y >= m.c_plus ? std::numbers::pi : support_angle(y, m);
  return 2.0 * m.sigma2 / (std::numbers::pi * m.continuous_mass()) *
         (0.5 * theta - 0.25 * std::sin(2.0 * theta));
}

double mp_quantile(double q, const MpModel& m) {
  if (!(q > 0.0) || !(q < 1.0))
    throw DomainError("quantile level must lie in (0, 1)");
  double lo = m.c_minus;
  double hi = m.c_plus;
  const double width = 1e-10 * m.c_plus;
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    if (mp_cdf(mid, m) < q)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

Eigen::VectorXd mp_sample(Eigen::Index count, const MpModel& m, Rng& rng) {
  Eigen::VectorXd out(std::max<Eigen::Index>(count, 0));
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    double u = uniform01(rng);
    while (u == 0.0) u = uniform01(rng);
    out(i) = mp_quantile(u, m);
  }
  std::sort(out.data(), out.data() + out.size(), std::greater<>());
  return out;
}

MpModel noise_model(const SpectrumEstimate& spectrum, double sigma2) {
  return MpModel::make(spectrum.gram_ratio(), sigma2);
}

double estimate_noise_variance(const SpectrumEstimate& s,
                               const NoiseVarianceOptions& opts) {
  const Eigen::Index kept = s.eigenvalues.size();
  if (kept < 4)
    throw DomainError("noise variance needs at least four eigenvalues");
  if (!(opts.trailing_fraction > 0.0) || opts.trailing_fraction > 1.0)
    throw DomainError("trailing fraction must lie in (0, 1]");

  const Eigen::Index side = s.free_side();
  const auto wanted = static_cast<Eigen::Index>(
      std::ceil(opts.trailing_fraction * static_cast<double>(side)));
  Eigen::Index start = side - std::clamp<Eigen::Index>(wanted, 1, side);
  double sum = 0.0;
  if (kept >= side) {
    sum = s.eigenvalues.segment(start, side - start).sum();
  } else {
    // Eigenvalues beyond n_prime are only known through their sum.
    const double unseen = std::max(0.0, s.trace - s.eigenvalues.sum());
    if (start >= kept) {
      sum = unseen;
      start = kept;
    } else {
      sum = s.eigenvalues.segment(start, kept - start).sum() + unseen;
    }
  }
  const Eigen::Index count = side - start;
  const double trailing_mean = sum / static_cast<double>(count);
  const double average = std::max(0.0, s.trace) / static_cast<double>(side);
  if (!(trailing_mean > 1e-12 * average) || !(trailing_mean > 0.0))
    throw DegenerateSpectrum("trailing eigenvalues are numerically zero");
  const MpModel unit = noise_model(s, 1.0);
  const double fraction = static_cast<double>(count) / static_cast<double>(side);
  const double cutoff = fraction >= 1.0 ? unit.c_plus : mp_quantile(fraction, unit);
  const double unit_mean = mp_partial_mean(cutoff, unit) / fraction;
  return trailing_mean / unit_mean;
}

}  // namespace specrank
