#include <doctest.h>

#include <random>

#include "../support/oracles.hpp"
#include "rosyn/error.hpp"
#include "rosyn/io/io.hpp"
#include "rosyn/numeric.hpp"
#include "rosyn/pipeline.hpp"
#include "rosyn/random.hpp"
#include "rosyn/relation/relation.hpp"

using namespace rosyn;
using namespace rosyn::relation;

namespace {

Eigen::MatrixXd s(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

// x2+ = 0.5 x2 + u2 + 0.2 w,  x1+ = 0.5 x1 + u1 + 0.1 w, P = 1.
CertificateInputs scalar_inputs() {
  CertificateInputs in;
  in.concrete.A = s(0.5);
  in.concrete.B = s(1.0);
  in.concrete.Bw = s(0.2);
  in.concrete.C = s(1.0);
  in.concrete.x0 = Eigen::VectorXd::Zero(1);
  in.reduced.A1 = s(0.5);
  in.reduced.B1 = s(1.0);
  in.reduced.Bw1 = s(0.1);
  in.reduced.C1 = s(1.0);
  in.reduced.P = s(1.0);
  in.Q = s(0.0);
  in.R = s(1.0);
  in.K = s(0.0);
  in.M = s(1.0);
  in.input_bound = 0.0;
  in.diameter = Eigen::VectorXd::Zero(1);
  return in;
}

}  // namespace

TEST_CASE("solve_interface") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  const Eigen::MatrixXd A2 = Eigen::MatrixXd::NullaryExpr(3, 3, [&] { return g(rng); });
  const Eigen::MatrixXd P = Eigen::MatrixXd::NullaryExpr(3, 3, [&] { return g(rng); });
  const Eigen::MatrixXd B2 = Eigen::MatrixXd::NullaryExpr(3, 2, [&] { return g(rng); });
  const Eigen::MatrixXd A1 = P.inverse() * A2 * P;
  const auto sim = solve_interface(A1, A2, B2, P);
  CHECK(sim.Q.norm() < 1e-10);
  CHECK(sim.residual < 1e-10);

  const Eigen::MatrixXd A1b = Eigen::MatrixXd::NullaryExpr(3, 3, [&] { return g(rng); });
  const auto full = solve_interface(A1b, A2, Eigen::MatrixXd::Identity(3, 3), P);
  CHECK(full.Q.isApprox(P * A1b - A2 * P, 1e-12));

  // rank-deficient B2 with an unreachable right-hand side
  Eigen::MatrixXd B2d = Eigen::MatrixXd::Zero(3, 2);
  B2d(0, 0) = 1.0;
  CHECK_THROWS_AS(solve_interface(A1b, A2, B2d, P), NumericError);
}

TEST_CASE("toy projection satisfies the interface identities") {
  const auto cfg = parse_config(io::read_text(std::string(ROSYN_CONFIG_DIR) + "/toy.json"), ROSYN_CONFIG_DIR);
  const auto prep = prepare_abstraction(cfg);
  const auto& red = prep.abstraction.reduced;
  const auto& m = cfg.model;
  CHECK(prep.projection_residual <= 1e-8);
  CHECK((red.P * red.A1 - m.A * red.P - m.B * prep.Q).norm() < 1e-8);
  CHECK((m.C * red.P - red.C1).norm() < 1e-8);

  const auto in = certificate_inputs(cfg, prep);
  const Eigen::MatrixXd Abar = m.A + m.B * cfg.feedback;
  const auto M = default_weight(Abar, m.C);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M - m.C.transpose() * m.C);
  CHECK(es.eigenvalues().minCoeff() >= -1e-12);
  CHECK(operator_norm(spd_sqrt(M) * Abar * spd_inv_sqrt(M)) < 1.0);

  const auto search = optimize_weight(in, cfg.delta);
  REQUIRE(search.result.feasible());
  const auto& cert = *search.result.certificate;
  CHECK(cert.epsilon > 0.0);
  CHECK(cert.lambda < 1.0);
  CHECK_FALSE(falsify(cert, 20'000, 4).has_value());

  const auto init = initial_abstract_state(cert, prep.abstraction.grid, m.x0);
  CHECK(init.feasible);
  CHECK(init.cell.has_value());
  const Eigen::VectorXd z = prep.abstraction.grid.center(*init.cell);
  const Eigen::VectorXd e = m.x0 - cert.P * z;
  CHECK(init.residual == doctest::Approx(e.dot(cert.M * e)));
  CHECK(init.residual <= cert.epsilon * cert.epsilon);
}

TEST_CASE("default_weight") {
  const double eta = 1e-6;
  const Eigen::MatrixXd C = (Eigen::MatrixXd(1, 2) << 1.0, 2.0).finished();
  CHECK(default_weight(Eigen::MatrixXd::Zero(2, 2), C, eta)
            .isApprox(C.transpose() * C + eta * Eigen::MatrixXd::Identity(2, 2), 1e-12));
  CHECK(default_weight(s(0.5), s(1.0), eta)(0, 0) == doctest::Approx(4.0 / 3.0 * (1 + eta)).epsilon(1e-12));
  CHECK(default_weight(s(0.5), s(1.0), 0.0, 0.8)(0, 0) == doctest::Approx(1.0 / (1.0 - 0.25 / 0.64)).epsilon(1e-12));
  CHECK_THROWS_AS(default_weight(s(0.5), s(1.0), eta, 0.4), NumericError);
  CHECK_THROWS_AS(default_weight(s(0.5), s(1.0), -1.0), Error);
}

TEST_CASE("chi2_bound") {
  CHECK(chi2_bound(1, 0.05) == doctest::Approx(3.841458820694124).epsilon(1e-9));
  CHECK(chi2_bound(2, std::exp(-1.0)) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(chi2_bound(1, 1.0 - 1e-9) < 1e-6);
  for (int d = 1; d <= 6; ++d) {
    for (double delta : {0.01, 0.03, 0.1, 0.5}) {
      CHECK(std::abs(chi2_bound(d, delta) - oracle::chi2_quantile_bisection(d, delta)) < 1e-8);
    }
  }
  CHECK_THROWS_AS(chi2_bound(1, 0.0), Error);
  CHECK_THROWS_AS(chi2_bound(0, 0.1), Error);
}

TEST_CASE("certify: scalar closed form") {
  const auto in = scalar_inputs();
  const auto r = certify(in, 0.05);
  REQUIRE(r.feasible());
  const auto& c = *r.certificate;
  const double expected = 0.1 * std::sqrt(oracle::chi2_quantile_bisection(1, 0.05)) / 0.5;
  CHECK(c.epsilon == doctest::Approx(expected).epsilon(1e-9));
  CHECK(c.epsilon == doctest::Approx(0.39199).epsilon(1e-4));
  CHECK(c.lambda == doctest::Approx(0.5));
  CHECK_FALSE(falsify(c, 100'000, 1).has_value());

  auto shrunk = c;
  shrunk.epsilon = c.epsilon / 2.0;
  const auto ce = falsify(shrunk, 100'000, 1);
  REQUIRE(ce.has_value());
  CHECK(ce->value > ce->bound);
  CHECK(invariance_value(shrunk, ce->x_bar, ce->u1, ce->w, ce->beta) == doctest::Approx(ce->value));

  // direct boundary sample: x_bar = eps/2, w = sqrt(c_w)
  const double xb = shrunk.epsilon, w = std::sqrt(c.c_w);
  const double e = 0.5 * xb + 0.1 * w;
  CHECK(invariance_value(shrunk, Eigen::VectorXd::Constant(1, xb), Eigen::VectorXd::Zero(1),
                         Eigen::VectorXd::Constant(1, w), Eigen::VectorXd::Zero(1)) == doctest::Approx(e * e));
  CHECK(e * e > shrunk.epsilon * shrunk.epsilon);

  const auto sweep = certify_sweep(in, {0.01, 0.05, 0.2});
  REQUIRE(sweep.size() == 3);
  CHECK(sweep[0].certificate->epsilon > sweep[1].certificate->epsilon);
  CHECK(sweep[1].certificate->epsilon > sweep[2].certificate->epsilon);
}

TEST_CASE("certify: exact identity relation gives eps 0") {
  auto in = scalar_inputs();
  in.concrete.Bw = s(0.1);
  in.K = s(-0.5);
  in.Q = solve_interface(in.reduced.A1, in.concrete.A, in.concrete.B, in.reduced.P).Q;
  const auto r = certify(in, 0.05);
  REQUIRE(r.feasible());
  CHECK(r.certificate->epsilon == doctest::Approx(0.0));
  CHECK(r.certificate->lambda == doctest::Approx(0.0));
  CHECK_FALSE(falsify(*r.certificate, 10'000, 2).has_value());
}

TEST_CASE("certify: infeasible cases") {
  auto in = scalar_inputs();
  in.K = s(1.0);  // Abar = 1.5
  const auto r = certify(in, 0.05);
  CHECK_FALSE(r.feasible());
  CHECK_FALSE(r.reason.empty());
  CHECK(optimize_weight(in, 0.05).result.reason.find("stable") != std::string::npos);

  auto bad = scalar_inputs();
  bad.M = s(0.5);  // M - C^T C not PSD
  CHECK_FALSE(certify(bad, 0.05).feasible());
}

TEST_CASE("initial_abstract_state") {
  SimulationCertificate c;
  c.P = Eigen::MatrixXd::Zero(2, 1);
  c.P(0, 0) = 1.0;
  c.M = Eigen::MatrixXd::Identity(2, 2);
  c.epsilon = 0.5;
  const abstraction::GridPartition grid({Eigen::VectorXd::Constant(1, -10), Eigen::VectorXd::Constant(1, 10)}, {200});
  const auto r = initial_abstract_state(c, grid, Eigen::Vector2d(3, 7));
  CHECK(r.unsnapped(0) == doctest::Approx(3.0));
  CHECK(r.cell.has_value());
  CHECK(r.residual == doctest::Approx(49.0 + 0.0025));
  CHECK_FALSE(r.feasible);

  const Eigen::VectorXd z = grid.center(42);
  const auto on = initial_abstract_state(c, grid, c.P * z);
  CHECK(on.cell == std::optional<std::size_t>(42));
  CHECK(on.residual < 1e-20);
  CHECK(on.feasible);

  CHECK_THROWS_AS(initial_abstract_state(c, grid, Eigen::Vector2d(30, 0)), Error);
  auto singular = c;
  singular.P.setZero();
  CHECK_THROWS_AS(initial_abstract_state(singular, grid, Eigen::Vector2d(1, 0)), NumericError);
}

TEST_CASE("relation is kept with probability at least 1 - delta") {
  const auto in = scalar_inputs();
  const double delta = 0.05;
  const auto c = *certify(in, delta).certificate;
  CounterRng rng(17, 0);
  const int trials = 200'000;
  int exits = 0;
  for (int t = 0; t < trials; ++t) {
    const double xb = (rng.uniform() < 0.5 ? -1.0 : 1.0) * c.epsilon;
    const double w = rng.normal();
    const double e = 0.5 * xb + 0.1 * w;
    if (e * e > c.epsilon * c.epsilon) ++exits;
  }
  const double freq = static_cast<double>(exits) / trials;
  CHECK(freq <= delta + 3.0 * std::sqrt(delta * (1 - delta) / trials));
}
