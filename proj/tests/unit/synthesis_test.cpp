#include <doctest.h>

#include <random>

#include "../support/oracles.hpp"
#include "rosyn/abstraction/abstraction.hpp"
#include "rosyn/error.hpp"
#include "rosyn/logic/compiler.hpp"
#include "rosyn/synthesis/synthesis.hpp"

using namespace rosyn;
using namespace rosyn::synthesis;
using abstraction::Kernel;

namespace {

TargetSet target_of(const std::vector<bool>& k) { return TargetSet{k}; }

double bound(const ReachResult& r, const TargetSet& K, std::size_t s, double shift) {
  return reach_bound_at(r.values, K, s, shift);
}

model::Box box1(double lo, double hi) { return {Eigen::VectorXd::Constant(1, lo), Eigen::VectorXd::Constant(1, hi)}; }

abstraction::FiniteAbstraction scalar_abstraction(std::size_t cells, std::size_t inputs) {
  abstraction::ReducedModel r;
  r.A1 = Eigen::MatrixXd::Constant(1, 1, 0.9);
  r.B1 = Eigen::MatrixXd::Constant(1, 1, 1.0);
  r.Bw1 = Eigen::MatrixXd::Constant(1, 1, 0.6);
  r.C1 = Eigen::MatrixXd::Identity(1, 1);
  r.P = Eigen::MatrixXd::Identity(1, 1);
  return abstraction::build_abstraction(r, abstraction::GridPartition(box1(-6, 6), {cells}),
                                        abstraction::input_grid(1, 0.36, inputs));
}

oracle::Dense perturb(std::mt19937_64& rng, const oracle::Dense& t, double delta) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto out = t;
  for (auto& state : out) {
    for (auto& row : state) {
      const auto q = oracle::random_row(rng, row.size(), 0.5);
      const double a = delta * u(rng);
      for (std::size_t k = 0; k < row.size(); ++k) row[k] = (1 - a) * row[k] + a * q[k];
    }
  }
  return out;
}

}  // namespace

TEST_CASE("truncate") {
  CHECK(truncate(-0.2) == 0.0);
  CHECK(truncate(0.5) == 0.5);
  CHECK(truncate(1.3) == 1.0);
}

TEST_CASE("erosion and dilation") {
  const auto K = box1(-2, 2);
  auto e = erode_box(K, 0.5);
  REQUIRE(e.has_value());
  CHECK(e->lo(0) == doctest::Approx(-1.5));
  CHECK(e->hi(0) == doctest::Approx(1.5));
  const auto d = dilate_box(K, 0.5);
  CHECK(d.lo(0) == doctest::Approx(-2.5));
  CHECK(d.hi(0) == doctest::Approx(2.5));
  e = erode_box(K, 1.2266);
  REQUIRE(e.has_value());
  CHECK(e->lo(0) == doctest::Approx(-0.7734));
  CHECK(e->hi(0) == doctest::Approx(0.7734));
  CHECK_FALSE(erode_box(K, 2.5).has_value());

  const auto abs = scalar_abstraction(120, 1);
  const double margin = cell_output_radius(abs);
  CHECK(margin == doctest::Approx(0.05));
  const auto er = eroded_target(abs, K, 0.5);
  const auto di = dilated_target(abs, K, 0.5);
  for (std::size_t i = 0; i < abs.num_cells(); ++i) {
    const double c = abs.grid.center(i)(0);
    if (std::abs(std::abs(c) + 0.05 - 1.5) > 1e-9) CHECK(er.member[i] == (std::abs(c) + 0.05 < 1.5));
    if (std::abs(std::abs(c) - 0.05 - 2.5) > 1e-9) CHECK(di.member[i] == (std::abs(c) - 0.05 < 2.5));
    if (er.member[i]) CHECK(di.member[i]);
  }
  CHECK_FALSE(er.member[abs.sink()]);
  CHECK_FALSE(di.member[abs.sink()]);
}

TEST_CASE("standard_reach: trivial targets") {
  std::mt19937_64 rng(1);
  const auto t = oracle::random_mdp(rng, 4, 2);
  const auto kernel = Kernel::from_dense(t);
  const auto all = target_of(std::vector<bool>(4, true));
  const auto r = standard_reach(kernel, all, Horizon::finite(3), 0);
  CHECK(r.policy.bound == 1.0);
  for (double v : r.values.values) CHECK(v == doctest::Approx(1.0));
  const auto none = target_of(std::vector<bool>(4, false));
  const auto z = standard_reach(kernel, none, Horizon::unbounded(), 0);
  CHECK(z.policy.bound == 0.0);
  for (double v : z.values.values) CHECK(v == 0.0);
}

TEST_CASE("standard_reach matches policy enumeration") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = oracle::random_mdp(rng, 3, 2);
    auto K = oracle::random_target(rng, 3, 0.35);
    const auto kernel = Kernel::from_dense(t);
    const auto target = target_of(K);
    const auto r = standard_reach(kernel, target, Horizon::finite(3));
    const auto best = oracle::enumerate_policies(t, K, 3);
    for (std::size_t s = 0; s < 3; ++s) CHECK(std::abs(bound(r, target, s, 0.0) - best[s]) < 1e-12);
    // the returned policy attains the optimum
    const auto eval = standard_reach(kernel, target, Horizon::finite(3), std::nullopt, &r.policy);
    for (std::size_t s = 0; s < 3; ++s) CHECK(std::abs(bound(eval, target, s, 0.0) - best[s]) < 1e-12);
    CHECK(r.policy.tables.size() == 3);
  }
}

TEST_CASE("robust and upper recursions match the straight-line oracle") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const auto t = oracle::random_mdp(rng, 3, 2);
    const auto K = oracle::random_target(rng, 3, 0.35);
    const auto kernel = Kernel::from_dense(t);
    const auto target = target_of(K);
    const auto lower = robust_reach(kernel, target, 0.1, Horizon::finite(2));
    const auto lo_oracle = oracle::reach_recursion(t, K, 2, -0.1);
    for (std::size_t s = 0; s < 3; ++s) {
      CHECK(std::abs(bound(lower, target, s, -0.1) - lo_oracle[s]) < 1e-12);
      CHECK(std::abs(upper_bound_reach(kernel, target, 0.05, 2, s) - oracle::reach_recursion(t, K, 2, 0.05)[s]) < 1e-12);
    }
    const auto exact = standard_reach(kernel, target, Horizon::finite(2));
    const auto zero = robust_reach(kernel, target, 0.0, Horizon::finite(2));
    CHECK(zero.values.values == exact.values.values);
    for (std::size_t s = 0; s < 3; ++s) {
      CHECK(upper_bound_reach(kernel, target, 0.0, 2, s) == doctest::Approx(bound(exact, target, s, 0.0)));
    }
  }
}

TEST_CASE("robust_reach: delta >= 1 floors everything") {
  std::mt19937_64 rng(3);
  const auto t = oracle::random_mdp(rng, 5, 2);
  const auto K = oracle::random_target(rng, 5, 0.5);
  const auto r = robust_reach(Kernel::from_dense(t), target_of(K), 1.0, Horizon::unbounded(), 0);
  CHECK(r.policy.bound == 0.0);
  for (double v : r.values.values) CHECK(v == 0.0);
  CHECK_THROWS_AS(robust_reach(Kernel::from_dense(t), target_of(K), -0.1, Horizon::finite(2)), Error);
}

TEST_CASE("operator monotonicity") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto t = oracle::random_mdp(rng, 6, 3);
    const auto kernel = Kernel::from_dense(t);
    const auto target = target_of(oracle::random_target(rng, 6));
    std::vector<double> W1(6), W2(6), o1(6), o2(6);
    for (std::size_t i = 0; i < 6; ++i) {
      W2[i] = u(rng);
      W1[i] = std::min(1.0, W2[i] + u(rng) * 0.3);
    }
    for (double shift : {0.0, -0.07, 0.07}) {
      reach_backup(kernel, target, shift, W1, o1);
      reach_backup(kernel, target, shift, W2, o2);
      for (std::size_t i = 0; i < 6; ++i) CHECK(o1[i] >= o2[i] - 1e-15);
    }
  }
}

TEST_CASE("iterates from zero are nondecreasing and converge") {
  std::mt19937_64 rng(21);
  const auto t = oracle::random_mdp(rng, 8, 2);
  const auto kernel = Kernel::from_dense(t);
  const auto target = target_of(oracle::random_target(rng, 8));
  std::vector<double> V(8, 0.0), next(8);
  for (int k = 0; k < 200; ++k) {
    reach_backup(kernel, target, -0.02, V, next);
    for (std::size_t i = 0; i < 8; ++i) {
      CHECK(next[i] >= V[i] - 1e-15);
      CHECK(next[i] <= 1.0);
    }
    V = next;
  }
  const auto fp = robust_reach(kernel, target, 0.02, Horizon::unbounded());
  CHECK(fp.values.converged);
  CHECK(fp.policy.tables.size() == 1);
  for (std::size_t i = 0; i < 8; ++i) CHECK(fp.values.at(i) == doctest::Approx(V[i]).epsilon(1e-7));
}

TEST_CASE("soundness under delta-perturbation") {
  std::mt19937_64 rng(99);
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const double delta = 0.02 + 0.08 * std::uniform_real_distribution<double>(0, 1)(rng);
    const auto t1 = oracle::random_mdp(rng, 5, 2);
    const auto t2 = perturb(rng, t1, delta);
    const auto K = oracle::random_target(rng, 5, 0.3);
    const auto target = target_of(K);
    const int N = 4;
    const auto robust = robust_reach(Kernel::from_dense(t1), target, delta, Horizon::finite(N));
    const auto eval = standard_reach(Kernel::from_dense(t2), target, Horizon::finite(N), std::nullopt, &robust.policy);
    for (std::size_t s = 0; s < 5; ++s) {
      if (bound(eval, target, s, 0.0) < bound(robust, target, s, -delta) - 1e-12) ++violations;
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("sandwich on an abstraction") {
  const auto abs = scalar_abstraction(60, 3);
  const auto K = box1(-2, 2);
  for (std::size_t s = 0; s < abs.num_cells(); s += 7) {
    for (double delta : {0.0, 0.01, 0.05}) {
      const auto lo = robust_reach(abs, K, 0.0, delta, Horizon::finite(6), s);
      const auto mid = standard_reach(abs.kernel, eroded_target(abs, K, 0.0), Horizon::finite(6), s);
      const double up = upper_bound_reach(abs, K, 0.0, delta, 6, s);
      CHECK(lo.policy.bound <= mid.policy.bound + 1e-12);
      CHECK(mid.policy.bound <= up + 1e-12);
      if (delta == 0.0) CHECK(lo.policy.bound == doctest::Approx(mid.policy.bound));
    }
  }
  CHECK_THROWS_AS(upper_bound_reach(abs, K, 0.0, 0.01, -1, 0), Error);
}

TEST_CASE("scLTL: F k collapses to reachability") {
  const auto abs = scalar_abstraction(60, 3);
  Alphabet ab({"k"});
  const model::LabellingMap labels(ab, 1, {{box1(-2, 2), 1}}, 0);
  const auto dfa = logic::compile_dfa(logic::parse_scltl("F k", ab), ab);
  const auto K = box1(-2, 2);
  for (auto horizon : {Horizon::finite(5), Horizon::unbounded()}) {
    const auto sc = robust_scltl(abs, dfa, labels, 0.0, 0.03, horizon);
    const auto problem = make_scltl_problem(abs, dfa, labels, 0.0, 0.03);
    const auto target = eroded_target(abs, K, 0.0);
    const auto rr = robust_reach(abs.kernel, target, 0.03, horizon);
    for (std::size_t s = 0; s < abs.num_cells(); ++s) {
      CHECK(scltl_bound_at(problem, sc.values, s) == doctest::Approx(reach_bound_at(rr.values, target, s, -0.03)).epsilon(1e-9));
      CHECK(sc.values.at(s, dfa.initial()) == doctest::Approx(rr.values.at(s)).epsilon(1e-9));
    }
    CHECK(scltl_bound_at(problem, sc.values, abs.sink()) == 0.0);
  }
}

TEST_CASE("scLTL: bound is nonincreasing in eps and delta") {
  const auto abs = scalar_abstraction(60, 3);
  Alphabet ab({"k"});
  const model::LabellingMap labels(ab, 1, {{box1(-2, 2), 1}}, 0);
  const auto dfa = logic::compile_dfa(logic::parse_scltl("F (G<=2 k)", ab), ab);
  std::vector<std::vector<double>> prev_eps;
  for (double eps : {0.0, 0.3, 0.8, 1.5}) {
    std::vector<double> row;
    for (double delta : {0.0, 0.02, 0.05}) {
      const auto r = robust_scltl(abs, dfa, labels, eps, delta, Horizon::finite(8));
      const auto p = make_scltl_problem(abs, dfa, labels, eps, delta);
      for (std::size_t s = 0; s < abs.num_cells(); ++s) row.push_back(scltl_bound_at(p, r.values, s));
    }
    if (!prev_eps.empty()) {
      for (std::size_t i = 0; i < row.size(); ++i) CHECK(row[i] <= prev_eps.back()[i] + 1e-12);
    }
    const std::size_t n = abs.num_cells();
    for (std::size_t s = 0; s < n; ++s) {
      CHECK(row[n + s] <= row[s] + 1e-12);
      CHECK(row[2 * n + s] <= row[n + s] + 1e-12);
    }
    prev_eps.push_back(row);
  }
  // eps so large that every cell sees both letters: the G part can never be certified
  const auto r = robust_scltl(abs, dfa, labels, 10.0, 0.0, Horizon::finite(8));
  const auto p = make_scltl_problem(abs, dfa, labels, 10.0, 0.0);
  for (std::size_t s = 0; s < abs.num_cells(); ++s) CHECK(scltl_bound_at(p, r.values, s) == 0.0);
}

TEST_CASE("scLTL: errors") {
  const auto abs = scalar_abstraction(20, 1);
  Alphabet ab({"k"}), other({"a", "b"});
  const model::LabellingMap labels(ab, 1, {{box1(-2, 2), 1}}, 0);
  const auto dfa = logic::compile_dfa(logic::parse_scltl("F a", other), other);
  CHECK_THROWS_AS(robust_scltl(abs, dfa, labels, 0.0, 0.0, Horizon::finite(2)), Error);
  const auto fk = logic::compile_dfa(logic::parse_scltl("F k", ab), ab);
  CHECK_THROWS_AS(robust_scltl(abs, fk, labels, 0.0, 0.0, Horizon::finite(2), std::nullopt, 10), ResourceError);
}

TEST_CASE("policy tables and ties") {
  // two identical inputs: ties resolve to input 0
  oracle::Dense t = {{{0.5, 0.5}, {0.5, 0.5}}, {{0.0, 1.0}, {0.0, 1.0}}};
  const auto r = standard_reach(Kernel::from_dense(t), target_of({false, true}), Horizon::finite(3));
  for (const auto& table : r.policy.tables) CHECK(table[0] == 0u);
  CHECK(r.policy.input(0, 0, 99) == r.policy.tables.back()[0]);
}
