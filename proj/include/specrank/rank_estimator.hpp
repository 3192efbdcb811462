#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "specrank/changepoint.hpp"
#include "specrank/matrix_io.hpp"
#include "specrank/mp_law.hpp"
#include "specrank/spectra.hpp"

namespace specrank {

/// Half-open index range [begin, end).
struct IndexInterval {
  Eigen::Index begin = 0;
  Eigen::Index end = 0;
  Eigen::Index size() const { return end - begin; }
  bool contains(Eigen::Index i) const { return i >= begin && i < end; }
  bool operator==(const IndexInterval&) const = default;
};

struct AlarmOptions {
  double flat = 0.05;   ///< probabilities below this count as flat
  double spike = 0.5;   ///< tail probabilities at or above this are spikes
  Eigen::Index min_run = 0;  ///< 0 selects max(5, ceil(0.2 * length))
};

struct RankConfig {
  std::optional<Eigen::Index> n_prime;
  double delta = 0.90;
  double confidence = 0.99;
  double gamma4 = 3.0;  ///< fourth moment of standardized noise entries
  int sweeps = 500;
  int burnin = 50;
  std::uint64_t seed = 0;
  double prior_start = 0.9;
  /// Second-pass probabilities within this distance of the maximum count as
  /// tied for the candidate set.
  double tie_tolerance = 0.02;
  AlarmOptions alarm;
  NoiseVarianceOptions noise;
  EigenMethod eigen_method = EigenMethod::automatic;

  /// Throws DomainError on out-of-range settings.
  void validate() const;
};

struct RankDecision {
  Eigen::Index k = 0;
  std::vector<Eigen::Index> candidates;
  Eigen::VectorXd eigenvalues;   ///< observed scaled spectrum
  Eigen::VectorXd noise_samples; ///< sorted MP draws
  Eigen::VectorXd deviation;     ///< eigenvalues - noise_samples
  PosteriorTrace first_trace;
  /// Runs on first_trace's boundary sequence, so it is one entry shorter;
  /// second_trace.probs[i] concerns the same dimension count i as
  /// first_trace.probs[i].
  PosteriorTrace second_trace;
  IndexInterval trimmed_range;
  double sigma2_used = 0.0;
  /// Gershgorin-GEV bound on the largest noise eigenvalue at sigma2_used.
  double noise_bound = 0.0;
  Eigen::Index n_prime = 0;
  std::vector<std::string> warnings;
};

/// Observed spectrum next to sorted draws from its corrected noise law.
struct NoiseComparison {
  SpectrumEstimate spectrum;
  double sigma2 = 0.0;
  Eigen::VectorXd noise_samples;
};

/// First half of the estimator: centers if needed, computes the leading
/// spectrum, fits the noise variance and draws noise eigenvalues (the top
/// n_prime of max(n_prime, free_side) draws) with the same random streams
/// estimate_rank uses.
NoiseComparison compare_to_noise(const DataMatrix& m, const RankConfig& cfg = {});

/// Runs the full estimator: spectrum, corrected noise model, deviation
/// sequence, change-point posterior, trimming, double posterior and the
/// delta rule. Centers the columns first if needed. Deterministic for a
/// fixed cfg.seed.
RankDecision estimate_rank(const DataMatrix& m, const RankConfig& cfg = {});

/// The selection helpers below index boundaries: entry j of a probability
/// sequence refers to a change right after element j, so selecting j means
/// a dimension count of j + 1.

/// Range of boundaries kept for selection. A flat run (probs < flat) of at
/// least min_run entries that is followed only by spikes or reaches the end
/// cuts the range at the start of the run. The range always keeps entry 0.
IndexInterval trim_alarm(const Eigen::VectorXd& probs, const AlarmOptions& opts = {});

struct Selection {
  Eigen::Index k = 0;
  std::vector<Eigen::Index> candidates;  ///< boundary indices
};

/// Two-step rule: candidates are the boundaries in trimmed whose second-pass
/// probability is within tie_tolerance of the maximum; the chosen boundary is
/// the largest candidate whose first-pass probability reaches delta times
/// the first-pass maximum, or the first-pass argmax (lowest index on ties)
/// if none does. k is the chosen boundary plus one.
Selection select_k(const Eigen::VectorXd& first, const Eigen::VectorXd& second,
                   double delta, const IndexInterval& trimmed,
                   double tie_tolerance = 0.0);

/// Drops the pinned entry 0 of a trace, giving its boundary sequence.
Eigen::VectorXd boundary_probs(const PosteriorTrace& trace);

/// Second-level probabilities on the first trace's boundary coordinates:
/// entry j is second.probs[j + 1], the last entry is 0.
Eigen::VectorXd second_level_boundaries(const PosteriorTrace& second);

}  // namespace specrank
