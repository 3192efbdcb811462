#include "specrank/spectra.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "specrank/errors.hpp"
#include "specrank/random.hpp"

namespace specrank {

namespace {

SymmetricEigen dense_eig(const Eigen::MatrixXd& g, Eigen::Index k,
                         bool want_vectors) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      g, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw ConvergenceFailure(0);
  SymmetricEigen out;
  out.values = solver.eigenvalues().tail(k).reverse();
  if (want_vectors)
    out.vectors = solver.eigenvectors().rightCols(k).rowwise().reverse();
  return out;
}

// Lanczos with full reorthogonalization. The basis only grows, so every
// step reuses the previous Krylov vectors; on breakdown the process restarts
// from a fresh random direction orthogonal to the basis.
SymmetricEigen lanczos_eig(const Eigen::MatrixXd& g, Eigen::Index k,
                           const EigenOptions& opts) {
  const Eigen::Index side = g.rows();
  const Eigen::Index cap =
      opts.max_basis > 0 ? std::min(opts.max_basis, side) : side;
  if (cap < k) throw ConvergenceFailure(0);

  Rng rng(opts.seed);
  Eigen::MatrixXd basis(side, cap);
  Eigen::VectorXd alpha(cap), beta(cap);
  const double scale = std::max(g.norm(), 1e-300);

  auto fresh_direction = [&](Eigen::Index filled) {
    for (int attempt = 0; attempt < 8; ++attempt) {
      Eigen::VectorXd v = standard_normal(side, 1, rng);
      for (int pass = 0; pass < 2 && filled > 0; ++pass)
        v -= basis.leftCols(filled) *
             (basis.leftCols(filled).transpose() * v);
      const double nv = v.norm();
      if (nv > 1e-8) return Eigen::VectorXd(v / nv);
    }
    throw ConvergenceFailure(static_cast<int>(filled));
  };

  basis.col(0) = fresh_direction(0);
  Eigen::Index steps = 0;
  Eigen::Index target = std::min(cap, std::max<Eigen::Index>(2 * k + 20, 40));
  Eigen::VectorXd w(side);

  for (;;) {
    for (; steps < target; ++steps) {
      const Eigen::Index j = steps;
      w.noalias() = g * basis.col(j);
      alpha(j) = basis.col(j).dot(w);
      w -= alpha(j) * basis.col(j);
      if (j > 0) w -= beta(j - 1) * basis.col(j - 1);
      for (int pass = 0; pass < 2; ++pass)
        w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).transpose() * w);
      beta(j) = w.norm();
      if (j + 1 < cap) {
        if (beta(j) <= 1e-12 * scale) {
          beta(j) = 0.0;
          basis.col(j + 1) = fresh_direction(j + 1);
        } else {
          basis.col(j + 1) = w / beta(j);
        }
      }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    const Eigen::VectorXd diag = alpha.head(steps);
    const Eigen::VectorXd sub = beta.head(std::max<Eigen::Index>(steps - 1, 0));
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (tri.info() != Eigen::Success)
      throw ConvergenceFailure(static_cast<int>(steps));

    const Eigen::VectorXd theta = tri.eigenvalues();
    const double lead = std::max(std::abs(theta(0)), std::abs(theta(steps - 1)));
    const double last_beta = steps == side ? 0.0 : beta(steps - 1);
    bool converged = true;
    for (Eigen::Index i = 0; i < k && converged; ++i) {
      const Eigen::Index col = steps - 1 - i;
      const double residual =
          std::abs(last_beta * tri.eigenvectors()(steps - 1, col));
      converged = residual <= opts.tol * std::max(lead, 1e-300);
    }
    if (converged || steps == cap) {
      if (!converged) throw ConvergenceFailure(static_cast<int>(steps));
      SymmetricEigen out;
      out.values = theta.tail(k).reverse();
      out.iterations = static_cast<int>(steps);
      if (opts.want_vectors)
        out.vectors = basis.leftCols(steps) *
                      tri.eigenvectors().rightCols(k).rowwise().reverse();
      return out;
    }
    target = std::min(cap, 2 * target);
  }
}

}  // namespace

Eigen::MatrixXd scaled_gram(const DataMatrix& m) {
  if (!m.centered) throw NotCentered();
  return scaled_gram(m.values);
}

SymmetricEigen eig_truncated(const Eigen::MatrixXd& g, Eigen::Index n_prime,
                             const EigenOptions& opts) {
  if (g.rows() != g.cols())
    throw ShapeMismatch("eig_truncated needs a square matrix");
  if (n_prime < 1 || n_prime > g.rows())
    throw DomainError("n_prime must lie in [1, side]");
  const bool use_lanczos =
      opts.method == EigenMethod::lanczos ||
      (opts.method == EigenMethod::automatic && g.rows() > opts.dense_threshold);
  return use_lanczos ? lanczos_eig(g, n_prime, opts)
                     : dense_eig(g, n_prime, opts.want_vectors);
}

Eigen::Index default_n_prime(Eigen::Index n, Eigen::Index p) {
  return std::min<Eigen::Index>({n, p, 100});
}

SpectrumEstimate compute_spectrum(const DataMatrix& m, Eigen::Index n_prime,
                                  const EigenOptions& opts) {
  const Eigen::MatrixXd g = scaled_gram(m);
  SpectrumEstimate est;
  est.n = m.n();
  est.p = m.p();
  est.rect_ratio = static_cast<double>(est.n) / static_cast<double>(est.p);
  est.scale_side = est.p > est.n ? ScaleSide::divide_by_p : ScaleSide::divide_by_n;
  est.n_prime = n_prime > 0 ? std::min(n_prime, est.side())
                            : default_n_prime(est.n, est.p);
  est.trace = g.trace();
  if (m.centered && est.n <= est.p && est.n > 1) est.null_dims = 1;

  SymmetricEigen eig;
  try {
    eig = eig_truncated(g, est.n_prime, opts);
  } catch (const ConvergenceFailure&) {
    EigenOptions dense = opts;
    dense.method = EigenMethod::dense;
    eig = eig_truncated(g, est.n_prime, dense);
  }
  est.eigenvalues = eig.values.cwiseMax(0.0);
  est.eigenvectors = std::move(eig.vectors);
  return est;
}

double cross_term_norm(const Eigen::MatrixXd& s, const Eigen::MatrixXd& noise) {
  if (s.rows() != noise.rows() || s.cols() != noise.cols())
    throw ShapeMismatch("signal and noise matrices differ in shape");
  if (s.size() == 0) return 0.0;
  const Eigen::MatrixXd cross =
      (s * noise.transpose()) / static_cast<double>(s.cols());
  return cross.cwiseAbs().maxCoeff();
}

}  // namespace specrank
