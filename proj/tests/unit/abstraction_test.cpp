#include <doctest.h>

#include <complex>
#include <random>

#include "../support/oracles.hpp"
#include "rosyn/abstraction/abstraction.hpp"
#include "rosyn/abstraction/lyapunov.hpp"
#include "rosyn/abstraction/reduction.hpp"
#include "rosyn/error.hpp"
#include "rosyn/io/io.hpp"
#include "rosyn/numeric.hpp"

using namespace rosyn;
using namespace rosyn::abstraction;

namespace {

using CMat = Eigen::MatrixXcd;

CMat transfer(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& C, std::complex<double> z) {
  const CMat zI = z * CMat::Identity(A.rows(), A.cols());
  return C.cast<std::complex<double>>() * (zI - A.cast<std::complex<double>>()).partialPivLu().solve(B.cast<std::complex<double>>());
}

model::LinearGaussianModel random_stable(std::mt19937_64& rng, int n, int m, int p) {
  std::normal_distribution<double> g;
  model::LinearGaussianModel mdl;
  mdl.A = Eigen::MatrixXd::NullaryExpr(n, n, [&] { return g(rng); });
  mdl.A *= 0.8 / std::max(1e-9, spectral_radius(mdl.A));
  mdl.B = Eigen::MatrixXd::NullaryExpr(n, m, [&] { return g(rng); });
  mdl.Bw = Eigen::MatrixXd::NullaryExpr(n, 1, [&] { return g(rng); });
  mdl.C = Eigen::MatrixXd::NullaryExpr(p, n, [&] { return g(rng); });
  mdl.x0 = Eigen::VectorXd::Zero(n);
  return mdl;
}

Eigen::MatrixXd stacked(const Eigen::MatrixXd& B, const Eigen::MatrixXd& Bw) {
  Eigen::MatrixXd s(B.rows(), B.cols() + Bw.cols());
  s << B, Bw;
  return s;
}

model::Box box1(double lo, double hi) { return {Eigen::VectorXd::Constant(1, lo), Eigen::VectorXd::Constant(1, hi)}; }

ReducedModel scalar_reduced(double a, double sigma) {
  ReducedModel r;
  r.A1 = Eigen::MatrixXd::Constant(1, 1, a);
  r.B1 = Eigen::MatrixXd::Constant(1, 1, 1.0);
  r.Bw1 = Eigen::MatrixXd::Constant(1, 1, sigma);
  r.C1 = Eigen::MatrixXd::Identity(1, 1);
  r.P = Eigen::MatrixXd::Identity(1, 1);
  return r;
}

}  // namespace

TEST_CASE("discrete Lyapunov") {
  CHECK(solve_discrete_lyapunov(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Identity(2, 2))
            .isApprox(Eigen::MatrixXd::Identity(2, 2)));
  CHECK(solve_discrete_lyapunov(Eigen::MatrixXd::Constant(1, 1, 0.5), Eigen::MatrixXd::Constant(1, 1, 1.0))(0, 0) ==
        doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  Eigen::MatrixXd A = Eigen::Vector2d(0.8, 0.5).asDiagonal();
  const auto X = solve_discrete_lyapunov(A, Eigen::MatrixXd::Identity(2, 2));
  CHECK(X(0, 0) == doctest::Approx(1.0 / 0.36).epsilon(1e-12));
  CHECK(X(1, 1) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(std::abs(X(0, 1)) < 1e-12);
  CHECK_THROWS_AS(solve_discrete_lyapunov(Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::MatrixXd::Identity(1, 1)),
                  NumericError);
  std::mt19937_64 rng(11);
  for (int t = 0; t < 10; ++t) {
    const auto m = random_stable(rng, 5, 1, 1);
    const Eigen::MatrixXd S = m.B * m.B.transpose() + Eigen::MatrixXd::Identity(5, 5);
    CHECK(lyapunov_residual(m.A, S, solve_discrete_lyapunov(m.A, S)) < 1e-10);
  }
}

TEST_CASE("balanced truncation: full order is a similarity") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> om(0.0, M_PI);
  for (int t = 0; t < 5; ++t) {
    const auto m = random_stable(rng, 4, 2, 2);
    const Eigen::MatrixXd K = Eigen::MatrixXd::Zero(2, 4);
    const auto red = balanced_truncation(m, K, 4);
    CHECK(red.order() == 4);
    CHECK(red.P.fullPivLu().isInvertible());
    for (int f = 0; f < 20; ++f) {
      const auto z = std::polar(1.0, om(rng));
      const CMat g = transfer(m.A, stacked(m.B, m.Bw), m.C, z);
      const CMat gr = transfer(red.A1, stacked(red.B1, red.Bw1), red.C1, z);
      CHECK((g - gr).norm() < 1e-8 * std::max(1.0, g.norm()));
    }
  }
}

TEST_CASE("balanced truncation: error bound and toy Hankel values") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> om(0.0, M_PI);
  for (int t = 0; t < 5; ++t) {
    const auto m = random_stable(rng, 4, 1, 1);
    const auto red = balanced_truncation(m, Eigen::MatrixXd::Zero(1, 4), 2);
    const auto& hsv = red.hankel_singular_values;
    const double bound = 2.0 * (hsv(2) + hsv(3));
    for (int f = 0; f < 200; ++f) {
      const auto z = std::polar(1.0, om(rng));
      const CMat e = transfer(m.A, stacked(m.B, m.Bw), m.C, z) - transfer(red.A1, stacked(red.B1, red.Bw1), red.C1, z);
      CHECK(Eigen::JacobiSVD<CMat>(e).singularValues()(0) <= bound * (1 + 1e-9) + 1e-12);
    }
  }
  const auto toy = io::parse_model(io::read_text(std::string(ROSYN_CONFIG_DIR) + "/toy_model.json"));
  Eigen::MatrixXd K(1, 3);
  K << 0.7738, -0.9369, 0.6829;
  const auto red = balanced_truncation(toy, K, 1);
  CHECK(red.order() == 1);
  const auto& hsv = red.hankel_singular_values;
  REQUIRE(hsv.size() == 3);
  CHECK(hsv(0) > hsv(1));
  CHECK(hsv(1) > hsv(2));
  CHECK(hsv(2) > 0.0);
  CHECK_THROWS_AS(balanced_truncation(toy, K, 4), Error);
  CHECK_THROWS_AS(balanced_truncation(toy, Eigen::MatrixXd::Zero(1, 3), 1), NumericError);
}

TEST_CASE("grid partition") {
  GridPartition g(box1(-10, 10), {200});
  CHECK(g.num_cells() == 200);
  CHECK(g.diameter()(0) == doctest::Approx(0.1));
  CHECK(g.center(0)(0) == doctest::Approx(-9.95));
  CHECK(g.center(1)(0) == doctest::Approx(-9.85));
  CHECK(g.center(199)(0) == doctest::Approx(9.95));
  CHECK(g.locate(Eigen::VectorXd::Constant(1, 10.0)) == std::optional<std::size_t>(199));
  CHECK_FALSE(g.locate(Eigen::VectorXd::Constant(1, 10.01)).has_value());
  CHECK(g.locate(Eigen::VectorXd::Constant(1, -9.9)) == std::optional<std::size_t>(0));

  GridPartition one(box1(2, 5), {1});
  CHECK(one.center(0)(0) == doctest::Approx(3.5));
  CHECK(one.diameter()(0) == doctest::Approx(3.0));

  GridPartition sq({Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1)}, {2, 2});
  CHECK(sq.num_cells() == 4);
  CHECK(sq.center(0).isApprox(Eigen::Vector2d(0.25, 0.25)));
  CHECK(sq.center(1).isApprox(Eigen::Vector2d(0.25, 0.75)));
  CHECK(sq.flat_index(sq.multi_index(3)) == 3);

  CHECK_THROWS_AS(GridPartition(box1(1, 0), {2}), Error);
  CHECK_THROWS_AS(GridPartition(box1(0, 1), {0}), Error);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Vector2d x(u(rng), u(rng));
    const auto s = sq.snap(x);
    REQUIRE(s.has_value());
    CHECK(sq.snap(*s) == s);
    CHECK(sq.cell_box(*sq.locate(x)).contains(x));
  }
}

TEST_CASE("cell probability") {
  const Eigen::VectorXd mu = Eigen::VectorXd::Constant(1, 0.5), var = Eigen::VectorXd::Constant(1, 1.0);
  const double p = cell_probability(mu, var, box1(0, 1));
  CHECK(p == doctest::Approx(0.3829249225480262).epsilon(1e-12));
  CHECK(std::abs(p - oracle::gaussian_interval_mass(0.5, 1.0, 0.0, 1.0)) < 1e-12);
  CHECK(cell_probability(mu, var, box1(0.5 - 40, 0.5 + 40)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cell_probability(mu, Eigen::VectorXd::Zero(1), box1(0, 1)) == 1.0);
  CHECK(cell_probability(mu, Eigen::VectorXd::Zero(1), box1(1, 2)) == 0.0);
  const Eigen::Vector2d mu2(0.5, 0.0), var2(1.0, 0.0);
  CHECK(cell_probability(mu2, var2, {Eigen::Vector2d(0, -1), Eigen::Vector2d(1, 1)}) == doctest::Approx(p));
}

TEST_CASE("build_abstraction") {
  SUBCASE("deterministic limit") {
    auto r = scalar_reduced(0.0, 1e-6);
    r.B1.setZero();
    const auto abs = build_abstraction(r, GridPartition(box1(-1.1, 1.1), {11}), input_grid(1, 0.0, 1));
    for (std::size_t i = 0; i < abs.num_cells(); ++i) {
      const auto row = abs.kernel.row(i, 0);
      REQUIRE(row.size() == 1);
      CHECK(std::abs(abs.grid.center(row[0].target)(0)) < 1e-12);
      CHECK(row[0].probability == doctest::Approx(1.0));
    }
  }
  SUBCASE("single wide cell") {
    const auto abs = build_abstraction(scalar_reduced(0.0, 0.1), GridPartition(box1(-4, 4), {1}), input_grid(1, 0.0, 1));
    CHECK(abs.kernel.row(0, 0)[0].probability == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("rows stochastic, sink absorbing, entries match the oracle") {
    const auto abs =
        build_abstraction(scalar_reduced(0.8, 0.5), GridPartition(box1(-3, 3), {30}), input_grid(1, 0.25, 3));
    CHECK(abs.kernel.num_inputs() == 3);
    CHECK(abs.kernel.max_row_defect() < 1e-12);
    CHECK(abs.kernel.entries_in_unit_interval());
    for (std::size_t j = 0; j < 3; ++j) {
      const auto sink = abs.kernel.row(abs.sink(), j);
      REQUIRE(sink.size() == 1);
      CHECK(sink[0].target == abs.sink());
    }
    const std::size_t i = 7, j = 2;
    const double mean = 0.8 * abs.grid.center(i)(0) + abs.inputs[j](0);
    for (const auto& e : abs.kernel.row(i, j)) {
      if (e.target == abs.sink()) continue;
      const auto cb = abs.grid.cell_box(e.target);
      CHECK(e.probability == doctest::Approx(oracle::gaussian_interval_mass(mean, 0.5, cb.lo(0), cb.hi(0))).epsilon(1e-10));
    }
  }
  SUBCASE("non-diagonal covariance is rejected") {
    ReducedModel r;
    r.A1 = Eigen::MatrixXd::Zero(2, 2);
    r.B1 = Eigen::MatrixXd::Zero(2, 1);
    r.Bw1 = Eigen::MatrixXd::Ones(2, 1);
    r.C1 = Eigen::MatrixXd::Identity(2, 2);
    r.P = Eigen::MatrixXd::Identity(2, 2);
    CHECK_THROWS_AS(build_abstraction(r, GridPartition({Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1)}, {2, 2}),
                                      input_grid(1, 0.0, 1)),
                    Error);
  }
}

TEST_CASE("input grid") {
  CHECK(input_grid(2, 1.0, 1).size() == 1);
  const auto g = input_grid(1, 0.25, 5);
  REQUIRE(g.size() == 5);
  CHECK(g.front()(0) == doctest::Approx(-0.5));
  CHECK(g.back()(0) == doctest::Approx(0.5));
  for (const auto& u : input_grid(2, 1.0, 5)) CHECK(u.squaredNorm() <= 1.0 + 1e-12);
}
