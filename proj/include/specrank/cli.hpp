#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "specrank/rank_estimator.hpp"

namespace specrank::cli {

enum ExitCode : int { kOk = 0, kInputError = 2, kNumericalError = 3 };

/// Serialized estimate: every array has length n_prime, missing stages are
/// padded with zeros.
struct CliResult {
  Eigen::Index k = 0;
  double sigma2 = 0.0;
  Eigen::Index n_prime = 0;
  Eigen::VectorXd eigenvalues;
  Eigen::VectorXd mp_samples;
  Eigen::VectorXd deviation;
  Eigen::VectorXd posterior;
  Eigen::VectorXd double_posterior;
  std::vector<Eigen::Index> candidates;
  std::vector<std::string> warnings;
  double runtime_s = 0.0;
};

CliResult to_result(const RankDecision& d, double runtime_s);
std::string to_json(const CliResult& r);
/// One row per dimension; k and sigma2 repeated on every row.
std::string to_csv(const CliResult& r);

/// Entry point behind the `specrank` binary. args excludes the program name.
/// Returns one of ExitCode.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace specrank::cli
