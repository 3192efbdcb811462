#include <cmath>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

#include "specrank/errors.hpp"
#include "specrank/sim_bench.hpp"

using namespace specrank;

namespace {

Eigen::MatrixXd covariance(const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd c = x.rowwise() - x.colwise().mean();
  return c.transpose() * c / double(x.rows() - 1);
}

RankConfig quick() {
  RankConfig cfg;
  cfg.sweeps = 200;
  cfg.burnin = 20;
  return cfg;
}

}  // namespace

TEST_SUITE("sim_bench") {

TEST_CASE("x1 covariance") {
  const SimSetting s{MatrixKind::x1, 3, 100'000, 10, {2, 1, 1}, 1, 0};
  Rng rng(1);
  const DataMatrix x = gen_x1(s, rng);
  Eigen::VectorXd expected = Eigen::VectorXd::Constant(10, 0.54 * 0.54);
  expected.head(3) += Eigen::Vector3d(2, 1, 1);
  CHECK(expected(0) == doctest::Approx(2.2916));
  CHECK(expected(3) == doctest::Approx(0.2916));
  CHECK(kX1NoiseVariance == doctest::Approx(0.2916));
  const Eigen::MatrixXd cov = covariance(x.values);
  CHECK((cov - Eigen::MatrixXd(expected.asDiagonal())).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("x1 without signal is isotropic") {
  const SimSetting s{MatrixKind::x1, 2, 50'000, 4, {0, 0}, 1, 0};
  Rng rng(2);
  const Eigen::VectorXd var = covariance(gen_x1(s, rng).values).diagonal();
  CHECK((var.array() - kX1NoiseVariance).abs().maxCoeff() < 0.02);
}

TEST_CASE("x2 column variances") {
  const SimSetting s{MatrixKind::x2, 3, 50'000, 6, {3}, 1, 0};
  Rng rng(3);
  const Eigen::MatrixXd cov = covariance(gen_x2(s, rng).values);
  for (int j = 0; j < 3; ++j) CHECK(cov(j, j) == doctest::Approx(4.0).epsilon(0.03));
  for (int j = 3; j < 6; ++j) CHECK(cov(j, j) == doctest::Approx(1.0).epsilon(0.03));
  Eigen::MatrixXd off = cov;
  off.diagonal().setZero();
  CHECK(off.cwiseAbs().maxCoeff() < 0.05);

  const SimSetting zero{MatrixKind::x2, 3, 50'000, 4, {0}, 1, 0};
  const Eigen::VectorXd v = covariance(gen_x2(zero, rng).values).diagonal();
  CHECK((v.array() - 1.0).abs().maxCoeff() < 0.03);
}

TEST_CASE("setting validation") {
  CHECK_THROWS_AS(SimSetting({MatrixKind::x2, 5, 10, 3, {1}, 1, 0}).validate(), DomainError);
  CHECK_THROWS_AS(SimSetting({MatrixKind::x2, 1, 10, 3, {1}, 0, 0}).validate(), DomainError);
  CHECK_THROWS_AS(SimSetting({MatrixKind::x1, 3, 10, 5, {1, 1}, 1, 0}).validate(), DomainError);
  CHECK_THROWS_AS(SimSetting({MatrixKind::x2, 1, 10, 5, {1, 2}, 1, 0}).validate(), DomainError);
  CHECK_THROWS_AS(SimSetting({MatrixKind::x2, 1, 10, 5, {-1}, 1, 0}).validate(), DomainError);
  Rng rng(0);
  CHECK_THROWS_AS(gen_x1({MatrixKind::x2, 1, 10, 5, {1}, 1, 0}, rng), DomainError);
}

TEST_CASE("presets") {
  const auto names = table1_preset_names();
  CHECK(names.size() == 18);
  CHECK(names.front() == "table1-row1");
  const auto row1 = table1_preset("table1-row1", 200, 7);
  REQUIRE(row1);
  CHECK(row1->kind == MatrixKind::x1);
  CHECK(row1->n == 100);
  CHECK(row1->p == 10);
  CHECK(row1->sigmas == std::vector<double>{2, 1, 1});
  CHECK(row1->replicates == 200);
  CHECK(row1->seed == 7);
  const auto row18 = table1_preset("table1-row18", 1, 0);
  REQUIRE(row18);
  CHECK(row18->p == 50000);
  CHECK(row18->sigmas == std::vector<double>{100});
  CHECK(!table1_preset("table1-row19", 1, 0));
  CHECK(!table1_preset("table1-row1x", 1, 0));
  CHECK(!table1_preset("row1", 1, 0));
  for (const auto& n : names) CHECK_NOTHROW(table1_preset(n, 1, 0)->validate());
}

TEST_CASE("replicate seeds") {
  const SimSetting s{MatrixKind::x1, 3, 100, 10, {2, 1, 1}, 5, 11};
  std::vector<std::uint64_t> seeds;
  for (int r = 0; r < 100; ++r) seeds.push_back(replicate_seed(s, r));
  std::sort(seeds.begin(), seeds.end());
  CHECK(std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end());
  CHECK(replicate_seed(s, 3) == derive_seed(11, 3));
}

TEST_CASE("benchmark is deterministic and extends cleanly") {
  SimSetting s{MatrixKind::x1, 3, 100, 10, {2, 1, 1}, 6, 3};
  const auto a = run_benchmark({s}, quick());
  const auto b = run_benchmark({s}, quick(), {3});
  CHECK(a[0].accuracy == b[0].accuracy);
  CHECK(a[0].mae == b[0].mae);
  CHECK(a[0].estimates == b[0].estimates);
  s.replicates = 7;
  const auto c = run_benchmark({s}, quick());
  CHECK(std::equal(a[0].estimates.begin(), a[0].estimates.end(), c[0].estimates.begin()));
  CHECK(a[0].failures == 0);
  CHECK(a[0].mean_time_s > 0.0);
}

TEST_CASE("single replicate arithmetic") {
  const SimSetting s{MatrixKind::x2, 3, 40, 120, {6}, 1, 5};
  const BenchRow r = run_benchmark({s}, quick())[0];
  CHECK((r.accuracy == 0.0 || r.accuracy == 1.0));
  CHECK(r.mae == std::floor(r.mae));
  CHECK(r.mae == std::abs(double(r.estimates[0] - 3)));
}

TEST_CASE("reports") {
  const SimSetting s{MatrixKind::x1, 3, 100, 10, {2, 1, 1}, 2, 1};
  const auto rows = run_benchmark({s}, quick());
  std::ostringstream csv;
  write_bench_csv(rows, csv);
  std::istringstream lines(csv.str());
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  CHECK(header == "kind,k_true,n,p,sigmas,acc,mae,time_s");
  CHECK(row.rfind("x1,3,100,10,\"2,1,1\",", 0) == 0);
  CHECK(sigmas_text({2.5, 10}) == "2.5,10");

  const auto j = nlohmann::json::parse(bench_json(rows));
  REQUIRE(j.size() == 1);
  CHECK(j[0]["setting"]["kind"] == "x1");
  CHECK(j[0]["setting"]["replicates"] == 2);
  CHECK(j[0]["accuracy"].get<double>() == rows[0].accuracy);
  CHECK(j[0]["estimates"].size() == 2);
}

}
