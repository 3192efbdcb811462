#include "specrank/changepoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "specrank/errors.hpp"
#include "specrank/random.hpp"

namespace specrank {

namespace {

constexpr Eigen::Index kMaxExact = 14;

// log of the integral of u^{a-1} (1 + u)^{-s} over [0, U], in t = log u and
// shifted so the integrand peaks near 1.
double log_tail_integral(double a, double s, double U) {
  const double top = std::log(U);
  auto g = [&](double t) { return a * t - s * std::log1p(std::exp(t)); };
  // g is maximal where the logistic of t equals a / s.
  double peak = top;
  if (s > a) peak = std::min(top, std::log(a / (s - a)));
  const double g_peak = g(peak);
  boost::math::quadrature::exp_sinh<double> integrator;
  auto f = [&](double r) { return std::exp(g(top - r) - g_peak); };
  const double value = integrator.integrate(f);
  return g_peak + std::log(value);
}

struct Validated {
  Eigen::VectorXd centered;
  double total_ss = 0.0;
  double mean = 0.0;
};

Validated validate_inputs(const Eigen::VectorXd& series,
                          const Eigen::VectorXd& prior, double w0) {
  if (series.size() < 3) throw SeriesTooShort("series needs at least 3 elements, got " +
                         std::to_string(series.size()));
  if (prior.size() != series.size())
    throw PriorLengthMismatch("prior has " + std::to_string(prior.size()) +
                              " entries for a series of " +
                              std::to_string(series.size()));
  if (!series.allFinite()) throw DomainError("series must be finite");
  for (Eigen::Index i = 0; i < prior.size(); ++i)
    if (!(prior(i) >= 0.0) || !(prior(i) < 1.0))
      throw DomainError("prior probabilities must lie in [0, 1)");
  if (!(w0 > 0.0) || w0 > 1.0) throw DomainError("w0 must lie in (0, 1]");
  Validated v;
  v.mean = series.mean();
  v.centered = series.array() - v.mean;
  v.total_ss = v.centered.squaredNorm();
  return v;
}

// Sufficient statistics of a partition from prefix sums of the centered series.
class BlockSums {
 public:
  explicit BlockSums(const Eigen::VectorXd& y) : sums_(y.size() + 1) {
    sums_(0) = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) sums_(i + 1) = sums_(i) + y(i);
  }
  // S^2 / n for the block [lo, hi).
  double fit(Eigen::Index lo, Eigen::Index hi) const {
    const double s = sums_(hi) - sums_(lo);
    return s * s / static_cast<double>(hi - lo);
  }
  double mean(Eigen::Index lo, Eigen::Index hi) const {
    return (sums_(hi) - sums_(lo)) / static_cast<double>(hi - lo);
  }
  double grand() const {
    const double s = sums_(sums_.size() - 1);
    return s * s / static_cast<double>(sums_.size() - 1);
  }

 private:
  Eigen::VectorXd sums_;
};

// Partition log likelihood given the fitted sum Z = sum_j S_j^2 / n_j.
class PartitionLikelihood {
 public:
  PartitionLikelihood(const BlockSums& sums, double total_ss, Eigen::Index m,
                      double w0)
      : sums_(sums), total_(total_ss), m_(static_cast<int>(m)), w0_(w0) {}

  double operator()(double fitted, int blocks) const {
    // A constant series carries no information about the partition.
    if (!(total_ > 0.0)) return 0.0;
    const double within = std::max(total_ - fitted, 1e-10 * total_);
    const double between =
        blocks <= 1 ? 0.0 : std::max(fitted - sums_.grand(), 0.0);
    return log_marginal_likelihood(within, between, blocks, m_, w0_);
  }

 private:
  const BlockSums& sums_;
  double total_;
  int m_;
  double w0_;
};

}  // namespace

double log_marginal_likelihood(double within, double between, int blocks,
                               int length, double w0) {
  if (!(within > 0.0)) throw DomainError("within-block sum of squares must be positive");
  if (blocks < 1 || length < blocks) throw DomainError("invalid block count");
  const double a = 0.5 * (blocks + 1);
  const double s = 0.5 * (length - 1);
  if (!(between > 0.0)) return a * std::log(w0) - std::log(a) - s * std::log(within);

  // w = (W / B) u maps the range onto [0, U] with U = B w0 / W.
  const double U = between * w0 / within;
  const double base = a * std::log(within / between) - s * std::log(within);
  const double b = s - a;
  if (b > 0.0) {
    const double x = U / (1.0 + U);
    const double part = x < 0.5 ? boost::math::ibeta(a, b, x)
                                : boost::math::ibetac(b, a, 1.0 / (1.0 + U));
    if (part > 1e-280 && std::isfinite(part))
      return base + std::log(part) + std::log(boost::math::beta(a, b));
  }
  return base + log_tail_integral(a, s, U);
}

PosteriorTrace bcp_posterior(const Eigen::VectorXd& series,
                             const Eigen::VectorXd& prior, std::uint64_t seed,
                             const BcpOptions& opts) {
  if (opts.sweeps < 1 || opts.burnin < 0)
    throw DomainError("sweeps must be positive and burn-in non-negative");
  const Validated v = validate_inputs(series, prior, opts.w0);
  const Eigen::Index m = series.size();
  const BlockSums sums(v.centered);
  const PartitionLikelihood loglik(sums, v.total_ss, m, opts.w0);
  Rng rng(seed);

  std::vector<char> change(static_cast<std::size_t>(m), 0);
  change[0] = 1;
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd mean_sum = Eigen::VectorXd::Zero(m);

  auto fitted_total = [&]() {
    double z = 0.0;
    Eigen::Index lo = 0;
    for (Eigen::Index i = 1; i <= m; ++i)
      if (i == m || change[static_cast<std::size_t>(i)]) {
        z += sums.fit(lo, i);
        lo = i;
      }
    return z;
  };

  int blocks = 1;
  const int total_sweeps = opts.burnin + opts.sweeps;
  for (int sweep = 0; sweep < total_sweeps; ++sweep) {
    double fitted = fitted_total();
    for (Eigen::Index i = 1; i < m; ++i) {
      const double p = prior(i);
      auto& here = change[static_cast<std::size_t>(i)];
      if (p <= 0.0) {
        if (here) {
          here = 0;
          fitted = fitted_total();
          --blocks;
        }
        continue;
      }
      Eigen::Index lo = i - 1;
      while (!change[static_cast<std::size_t>(lo)]) --lo;
      Eigen::Index hi = i + 1;
      while (hi < m && !change[static_cast<std::size_t>(hi)]) ++hi;

      const double split = sums.fit(lo, i) + sums.fit(i, hi);
      const double merged = sums.fit(lo, hi);
      const double rest = fitted - (here ? split : merged);
      const int rest_blocks = blocks - (here ? 2 : 1);

      const double l0 = loglik(rest + merged, rest_blocks + 1) + std::log1p(-p);
      const double l1 = loglik(rest + split, rest_blocks + 2) + std::log(p);
      const double p1 = 1.0 / (1.0 + std::exp(l0 - l1));
      here = uniform01(rng) < p1 ? 1 : 0;
      fitted = rest + (here ? split : merged);
      blocks = rest_blocks + (here ? 2 : 1);
    }
    if (sweep < opts.burnin) continue;
    Eigen::Index lo = 0;
    for (Eigen::Index i = 1; i <= m; ++i) {
      if (i < m && !change[static_cast<std::size_t>(i)]) continue;
      if (i < m) counts(i) += 1.0;
      mean_sum.segment(lo, i - lo).array() += sums.mean(lo, i);
      lo = i;
    }
  }

  PosteriorTrace t;
  t.series = series;
  t.prior = prior;
  t.probs = counts / static_cast<double>(opts.sweeps);
  t.probs(0) = 0.0;
  t.posterior_means = (mean_sum / static_cast<double>(opts.sweeps)).array() + v.mean;
  t.sweeps = opts.sweeps;
  t.burnin = opts.burnin;
  t.seed = seed;
  return t;
}

std::vector<double> exact_partition_posterior(const Eigen::VectorXd& series,
                                              const Eigen::VectorXd& prior,
                                              double w0) {
  if (series.size() > kMaxExact) throw SeriesTooLong("exact enumeration supports at most " +
                        std::to_string(kMaxExact) + " elements");
  const Validated v = validate_inputs(series, prior, w0);
  const Eigen::Index m = series.size();
  const BlockSums sums(v.centered);
  const PartitionLikelihood loglik(sums, v.total_ss, m, w0);

  const std::size_t count = std::size_t{1} << (m - 1);
  std::vector<double> logw(count);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t mask = 0; mask < count; ++mask) {
    double lp = 0.0;
    double fitted = 0.0;
    int blocks = 1;
    Eigen::Index lo = 0;
    for (Eigen::Index i = 1; i < m; ++i) {
      const bool cut = (mask >> (i - 1)) & 1U;
      lp += cut ? std::log(prior(i)) : std::log1p(-prior(i));
      if (cut) {
        fitted += sums.fit(lo, i);
        lo = i;
        ++blocks;
      }
    }
    fitted += sums.fit(lo, m);
    if (std::isfinite(lp)) lp += loglik(fitted, blocks);
    logw[mask] = lp;
    top = std::max(top, lp);
  }
  double norm = 0.0;
  for (double& w : logw) {
    w = std::exp(w - top);
    norm += w;
  }
  for (double& w : logw) w /= norm;
  return logw;
}

PosteriorTrace exact_posterior_small(const Eigen::VectorXd& series,
                                     const Eigen::VectorXd& prior, double w0) {
  const std::vector<double> mass = exact_partition_posterior(series, prior, w0);
  const Eigen::Index m = series.size();
  const Eigen::VectorXd centered = series.array() - series.mean();
  const BlockSums sums(centered);

  PosteriorTrace t;
  t.series = series;
  t.prior = prior;
  t.probs = Eigen::VectorXd::Zero(m);
  t.posterior_means = Eigen::VectorXd::Zero(m);
  for (std::size_t mask = 0; mask < mass.size(); ++mask) {
    const double w = mass[mask];
    if (w == 0.0) continue;
    Eigen::Index lo = 0;
    for (Eigen::Index i = 1; i <= m; ++i) {
      const bool cut = i < m && ((mask >> (i - 1)) & 1U);
      if (i < m && !cut) continue;
      if (cut) t.probs(i) += w;
      t.posterior_means.segment(lo, i - lo).array() += w * sums.mean(lo, i);
      lo = i;
    }
  }
  t.posterior_means.array() += series.mean();
  return t;
}

PosteriorTrace double_posterior(const PosteriorTrace& trace, std::uint64_t seed,
                                const BcpOptions& opts, double prior_start) {
  if (trace.probs.size() < 4)
    throw SeriesTooShort("double posterior needs at least 4 first-level entries");
  const Eigen::VectorXd boundaries = trace.probs.tail(trace.probs.size() - 1);
  return bcp_posterior(boundaries, linear_prior(boundaries.size(), prior_start), seed,
                       opts);
}

Eigen::VectorXd linear_prior(Eigen::Index length, double start) {
  if (length < 2) throw SeriesTooShort("prior needs at least 2 elements");
  if (!(start >= 0.0) || !(start < 1.0))
    throw DomainError("prior start must lie in [0, 1)");
  Eigen::VectorXd prior(length);
  const double last = static_cast<double>(length - 1);
  for (Eigen::Index i = 0; i < length; ++i)
    prior(i) = start * (1.0 - static_cast<double>(i) / last);
  prior(0) = 0.0;
  return prior;
}

}  // namespace specrank
