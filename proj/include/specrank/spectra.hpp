#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Core>

#include "specrank/matrix_io.hpp"

namespace specrank {

enum class ScaleSide { divide_by_p, divide_by_n };

/// Leading scaled eigenvalues of the Gram matrix of a centered data matrix.
struct SpectrumEstimate {
  Eigen::VectorXd eigenvalues;  ///< non-increasing, clamped at 0
  Eigen::Index n_prime = 0;
  Eigen::Index n = 0;
  Eigen::Index p = 0;
  double rect_ratio = 0.0;  ///< n / p
  ScaleSide scale_side = ScaleSide::divide_by_p;
  /// Trace of the scaled Gram matrix, i.e. the sum of all min(n, p)
  /// eigenvalues including the ones not computed.
  double trace = 0.0;
  std::optional<Eigen::MatrixXd> eigenvectors;
  /// Eigenvalues forced to zero by construction: centering the rows of a
  /// matrix with n <= p leaves the all-ones vector in the kernel.
  Eigen::Index null_dims = 0;

  Eigen::Index side() const { return n < p ? n : p; }
  /// Number of eigenvalues that can carry noise.
  Eigen::Index free_side() const { return side() - null_dims; }
  /// Aspect ratio seen by the noise law of the Gram matrix actually
  /// decomposed, counted over the free dimensions.
  double gram_ratio() const {
    return static_cast<double>(free_side()) / static_cast<double>(n < p ? p : n);
  }
};

/// (1/p) X X^T when p > n, else (1/n) X^T X. Only the side min(n, p) matrix
/// is ever formed.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
scaled_gram(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  const bool wide = p > n;
  const Eigen::Index side = wide ? n : p;
  const Scalar scale = Scalar(1) / Scalar(wide ? p : n);
  Mat g = Mat::Zero(side, side);
  if (wide)
    g.template selfadjointView<Eigen::Lower>().rankUpdate(x.derived(), scale);
  else
    g.template selfadjointView<Eigen::Lower>().rankUpdate(
        x.derived().transpose(), scale);
  g.template triangularView<Eigen::StrictlyUpper>() = g.transpose();
  return g;
}

/// Checked overload for data matrices; throws NotCentered.
Eigen::MatrixXd scaled_gram(const DataMatrix& m);

enum class EigenMethod { automatic, dense, lanczos };

struct EigenOptions {
  double tol = 1e-10;
  std::uint64_t seed = 0;
  EigenMethod method = EigenMethod::automatic;
  /// Sides above this use the Krylov solver under EigenMethod::automatic.
  Eigen::Index dense_threshold = 500;
  /// Lanczos basis cap; 0 means the full side.
  Eigen::Index max_basis = 0;
  bool want_vectors = false;
};

struct SymmetricEigen {
  Eigen::VectorXd values;  ///< non-increasing
  std::optional<Eigen::MatrixXd> vectors;
  int iterations = 0;  ///< Lanczos steps taken, 0 for the dense path
};

/// The n_prime largest eigenpairs of a symmetric matrix. The Lanczos path
/// uses full reorthogonalization and grows the basis until each wanted Ritz
/// residual is below tol * |lambda_max|; throws ConvergenceFailure if the
/// basis cap is hit first. Negative round-off is not clamped here.
SymmetricEigen eig_truncated(const Eigen::MatrixXd& g, Eigen::Index n_prime,
                             const EigenOptions& opts = {});

/// Full pipeline: scaled Gram of a centered matrix, its n_prime leading
/// eigenvalues clamped to >= 0, and scaling metadata. n_prime <= 0 selects
/// min(n, p, 100).
SpectrumEstimate compute_spectrum(const DataMatrix& m, Eigen::Index n_prime,
                                  const EigenOptions& opts = {});

/// Default truncation: min(n, p, 100).
Eigen::Index default_n_prime(Eigen::Index n, Eigen::Index p);

/// max |(1/p) S N^T|_ij for same-shaped S and N; throws ShapeMismatch.
double cross_term_norm(const Eigen::MatrixXd& s, const Eigen::MatrixXd& noise);

}  // namespace specrank
