#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace specrank {

/// Output of a product-partition change-point analysis. probs[i] is the
/// posterior probability that element i starts a new block; probs[0] is
/// pinned to 0.
struct PosteriorTrace {
  Eigen::VectorXd series;
  Eigen::VectorXd prior;
  Eigen::VectorXd probs;
  Eigen::VectorXd posterior_means;
  int sweeps = 0;
  int burnin = 0;
  std::uint64_t seed = 0;
};

struct BcpOptions {
  int sweeps = 500;  ///< recorded sweeps, after burn-in
  int burnin = 50;
  /// Upper end of the uniform prior on w = sigma^2 / (sigma^2 + sigma_0^2).
  double w0 = 0.2;
};

/// log of the integral over w in [0, w0] of
///   w^{(blocks - 1)/2} (within + between * w)^{-(length - 1)/2},
/// the partition likelihood of the Barry-Hartigan model up to a constant.
/// within must be > 0.
double log_marginal_likelihood(double within, double between, int blocks,
                               int length, double w0);

/// Barry-Hartigan Gibbs sampler over the change indicators, one full
/// conditional per position and sweep, using block partial sums. The
/// partition prior is independent per position: prior[i] is P(change at i).
/// Throws SeriesTooShort (length < 3), PriorLengthMismatch, or DomainError
/// for priors outside [0, 1) or non-positive sweeps.
PosteriorTrace bcp_posterior(const Eigen::VectorXd& series,
                             const Eigen::VectorXd& prior, std::uint64_t seed,
                             const BcpOptions& opts = {});

/// Posterior mass of every partition of a short series. Entry `mask` holds
/// the probability of the partition whose change set is {i : bit i - 1 of
/// mask is set}, i = 1..length-1.
std::vector<double> exact_partition_posterior(const Eigen::VectorXd& series,
                                              const Eigen::VectorXd& prior,
                                              double w0 = 0.2);

/// Exact change probabilities by enumerating all 2^(length-1) partitions.
/// Throws SeriesTooShort below 3 and SeriesTooLong above 14 elements.
PosteriorTrace exact_posterior_small(const Eigen::VectorXd& series,
                                     const Eigen::VectorXd& prior,
                                     double w0 = 0.2);

/// Runs the sampler a second time on the boundary sequence of a trace,
/// trace.probs without its pinned entry 0, under a fresh linear prior of
/// the same start. Entry j of that sequence is the probability of a change
/// right after element j of the original series, so a second-level change
/// at i separates boundaries i - 1 and i, i.e. it marks i leading elements.
/// Throws SeriesTooShort when trace.probs has fewer than 4 entries.
PosteriorTrace double_posterior(const PosteriorTrace& trace, std::uint64_t seed,
                                const BcpOptions& opts = {}, double prior_start = 0.9);

/// prior[i] = start * (1 - i / (length - 1)), with prior[0] = 0.
Eigen::VectorXd linear_prior(Eigen::Index length, double start = 0.9);

}  // namespace specrank
