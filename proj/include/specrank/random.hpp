#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace specrank {

/// The explicit random source threaded through every stochastic routine.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer applied to (master, index). Replicate i of a study
/// seeded with `master` always receives derive_seed(master, i), so adding
/// replicates never perturbs the earlier ones.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Uniform draw on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// rows x cols matrix of i.i.d. N(0, 1) entries, filled column by column.
inline Eigen::MatrixXd standard_normal(Eigen::Index rows, Eigen::Index cols,
                                       Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::MatrixXd out(rows, cols);
  double* data = out.data();
  const Eigen::Index size = out.size();
  for (Eigen::Index i = 0; i < size; ++i) data[i] = dist(rng);
  return out;
}

}  // namespace specrank
