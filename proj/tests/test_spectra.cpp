#include <cmath>

#include "doctest.h"
#include "oracles.hpp"

#include "specrank/errors.hpp"
#include "specrank/random.hpp"
#include "specrank/spectra.hpp"

using namespace specrank;

namespace {

DataMatrix centered_noise(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
  Rng rng(seed);
  return center_columns(make_data_matrix(standard_normal(n, p, rng)));
}

Eigen::MatrixXd naive_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j)
      for (Eigen::Index k = 0; k < a.cols(); ++k) out(i, j) += a(i, k) * b(k, j);
  return out;
}

double max_rel(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return ((a - b).cwiseAbs().array() / b.cwiseAbs().array().max(1e-300)).maxCoeff();
}

}  // namespace

TEST_SUITE("spectra") {

TEST_CASE("gram of the centered identity") {
  const DataMatrix m = center_columns(make_data_matrix(Eigen::MatrixXd::Identity(2, 2)));
  const Eigen::MatrixXd x = m.values;
  CHECK(x(0, 0) == 0.5);
  CHECK(x(1, 0) == -0.5);
  const Eigen::MatrixXd expected = naive_product(x.transpose(), x) / 2.0;
  CHECK((scaled_gram(m) - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("gram of zero is zero") {
  DataMatrix m = make_data_matrix(Eigen::MatrixXd::Zero(4, 6));
  m.centered = true;
  CHECK(scaled_gram(m).isZero());
}

TEST_CASE("gram side and scale follow the wider dimension") {
  const DataMatrix wide = centered_noise(3, 5, 1);
  const Eigen::MatrixXd gw = scaled_gram(wide);
  CHECK(gw.rows() == 3);
  CHECK((gw - naive_product(wide.values, wide.values.transpose()) / 5.0).cwiseAbs().maxCoeff() <
        1e-13);

  const DataMatrix tall = centered_noise(5, 3, 2);
  const Eigen::MatrixXd gt = scaled_gram(tall);
  CHECK(gt.rows() == 3);
  CHECK((gt - naive_product(tall.values.transpose(), tall.values) / 5.0).cwiseAbs().maxCoeff() <
        1e-13);
  CHECK((gt - gt.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("uncentered input is refused") {
  CHECK_THROWS_AS(scaled_gram(make_data_matrix(Eigen::MatrixXd::Ones(3, 3))), NotCentered);
}

TEST_CASE("truncated eigenvalues of simple matrices") {
  const Eigen::MatrixXd d = Eigen::Vector3d(3, 2, 1).asDiagonal();
  const SymmetricEigen e = eig_truncated(d, 2);
  CHECK(e.values.size() == 2);
  CHECK(e.values(0) == doctest::Approx(3.0));
  CHECK(e.values(1) == doctest::Approx(2.0));

  const SymmetricEigen id = eig_truncated(Eigen::MatrixXd::Identity(5, 5), 5);
  CHECK((id.values.array() - 1.0).abs().maxCoeff() < 1e-14);

  CHECK_THROWS_AS(eig_truncated(Eigen::MatrixXd::Identity(3, 3), 4), DomainError);
  CHECK_THROWS_AS(eig_truncated(Eigen::MatrixXd::Zero(3, 2), 1), ShapeMismatch);
}

TEST_CASE("truncated eigenvalues match the dense oracle") {
  Rng rng(11);
  const Eigen::MatrixXd a = standard_normal(50, 80, rng);
  const Eigen::MatrixXd g = a * a.transpose();
  const Eigen::VectorXd oracle = oracle::dense_eigenvalues(g).head(10);
  for (EigenMethod method : {EigenMethod::dense, EigenMethod::lanczos}) {
    EigenOptions opts;
    opts.method = method;
    CHECK(max_rel(eig_truncated(g, 10, opts).values, oracle) < 1e-8);
  }
}

TEST_CASE("krylov path on a large side") {
  Rng rng(12);
  const Eigen::MatrixXd a = standard_normal(600, 700, rng);
  const Eigen::MatrixXd g = a * a.transpose() / 700.0;
  EigenOptions opts;
  opts.seed = 4;
  const SymmetricEigen e = eig_truncated(g, 10, opts);
  CHECK(e.iterations > 0);
  CHECK(max_rel(e.values, oracle::dense_eigenvalues(g).head(10)) < 1e-8);
  const SymmetricEigen again = eig_truncated(g, 10, opts);
  CHECK(again.values == e.values);
}

TEST_CASE("eigenvectors are orthonormal") {
  Rng rng(13);
  const Eigen::MatrixXd a = standard_normal(30, 40, rng);
  EigenOptions opts;
  opts.want_vectors = true;
  for (EigenMethod method : {EigenMethod::dense, EigenMethod::lanczos}) {
    opts.method = method;
    const SymmetricEigen e = eig_truncated(a * a.transpose(), 5, opts);
    REQUIRE(e.vectors.has_value());
    const Eigen::MatrixXd gram = e.vectors->transpose() * *e.vectors;
    CHECK((gram - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("spectrum metadata and ordering") {
  const SpectrumEstimate wide = compute_spectrum(centered_noise(20, 60, 3), 8);
  CHECK(wide.n_prime == 8);
  CHECK(wide.eigenvalues.size() == 8);
  CHECK(wide.scale_side == ScaleSide::divide_by_p);
  CHECK(wide.rect_ratio == 20.0 / 60.0);
  for (Eigen::Index i = 1; i < 8; ++i) CHECK(wide.eigenvalues(i) <= wide.eigenvalues(i - 1));
  CHECK(wide.eigenvalues.minCoeff() >= 0.0);

  const SpectrumEstimate tall = compute_spectrum(centered_noise(60, 20, 3), 0);
  CHECK(tall.scale_side == ScaleSide::divide_by_n);
  CHECK(tall.n_prime == 20);
  CHECK(default_n_prime(1000, 5000) == 100);
}

TEST_CASE("both sides share their leading spectrum") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Eigen::MatrixXd x = centered_noise(15, 40, 20 + s).values;
    const double p = 40.0;
    const Eigen::VectorXd small = oracle::dense_eigenvalues(x * x.transpose() / p);
    const Eigen::VectorXd large = oracle::dense_eigenvalues(x.transpose() * x / p).head(15);
    CHECK(max_rel(small.head(14), large.head(14)) < 1e-8);
  }
}

TEST_CASE("eigenvalues sum to the trace") {
  const SpectrumEstimate s = compute_spectrum(centered_noise(30, 45, 5), 30);
  CHECK(std::abs(s.eigenvalues.sum() - s.trace) <= 1e-8 * s.trace);
}

TEST_CASE("pure noise spectrum has unit mean") {
  Rng rng(6);
  const auto st = standardize_columns(make_data_matrix(standard_normal(50, 2000, rng)));
  const SpectrumEstimate s = compute_spectrum(st.matrix, 50);
  // One eigenvalue is lost to centering.
  CHECK(std::abs(s.eigenvalues.sum() / 49.0 - 1.0) < 0.05);
}

TEST_CASE("cross term") {
  Rng rng(7);
  const Eigen::MatrixXd n = standard_normal(10, 30, rng);
  CHECK(cross_term_norm(n, Eigen::MatrixXd::Zero(10, 30)) == 0.0);
  CHECK(cross_term_norm(n, n) == doctest::Approx((n * n.transpose() / 30.0).cwiseAbs().maxCoeff()));
  CHECK_THROWS_AS(cross_term_norm(n, Eigen::MatrixXd::Zero(10, 29)), ShapeMismatch);
}

TEST_CASE("cross term stays below the trace rate") {
  const double trace = 1.0;
  Rng rng(8);
  for (Eigen::Index p : {100, 400, 1600}) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(20, p);
    s.row(0).setConstant(trace);
    double worst = 0.0, mean = 0.0;
    for (int t = 0; t < 200; ++t) {
      const double v = cross_term_norm(s, standard_normal(20, p, rng));
      worst = std::max(worst, v);
      mean += v / 200.0;
    }
    CHECK(worst < 5.0 * trace / std::sqrt(static_cast<double>(p)));
    // max of 20 half-normals has mean near 1.9
    CHECK(mean * std::sqrt(static_cast<double>(p)) == doctest::Approx(1.9).epsilon(0.15));
  }
}

}
