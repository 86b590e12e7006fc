#include <doctest.h>

#include <random>

#include "../support/oracles.hpp"
#include "rosyn/error.hpp"
#include "rosyn/io/io.hpp"
#include "rosyn/logic/compiler.hpp"
#include "rosyn/pipeline.hpp"
#include "rosyn/random.hpp"
#include "rosyn/refinement/refinement.hpp"

using namespace rosyn;
using namespace rosyn::refinement;

namespace {

struct Toy {
  RunConfig cfg;
  Prepared prep;
  std::unique_ptr<ClosedLoop> loop;
};

const Toy& toy() {
  static const Toy t = [] {
    Toy t;
    t.cfg = parse_config(io::read_text(std::string(ROSYN_CONFIG_DIR) + "/toy.json"), ROSYN_CONFIG_DIR);
    t.prep = prepare_abstraction(t.cfg);
    const auto cert = *certify_stage(t.cfg, t.prep).result.certificate;
    const auto dfa = automaton(t.cfg);
    t.loop = std::make_unique<ClosedLoop>(ClosedLoop{t.cfg.model, t.prep.abstraction, cert, {}, dfa, t.cfg.labels});
    auto synth = synthesis_stage(t.cfg, t.prep, t.loop->dfa, cert);
    t.loop->policy = synth.result.policy;
    return t;
  }();
  return t;
}

ClosedLoop with_formula(const ClosedLoop& base, const std::string& formula) {
  ClosedLoop loop = base;
  const auto& ab = base.labels.alphabet();
  loop.dfa = logic::compile_dfa(logic::parse_scltl(formula, ab), ab);
  loop.policy = synthesis::robust_scltl(loop.abstraction, loop.dfa, loop.labels, 0.0, 0.0, synthesis::Horizon::finite(5))
                    .policy;
  return loop;
}

}  // namespace

TEST_CASE("controller initialization") {
  const auto& loop = *toy().loop;
  const Eigen::VectorXd& x0 = loop.concrete.x0;
  RefinedController c(loop, x0);
  CHECK(c.time() == 0);
  CHECK_FALSE(c.in_sink());
  // y = 2.45 lies outside [-2, 2]
  CHECK(concrete_letter(loop, x0) == 0u);
  CHECK(c.location() == loop.dfa.step(loop.dfa.initial(), 0));
  const auto init = relation::initial_abstract_state(loop.certificate, loop.abstraction.grid, x0);
  CHECK(c.cell() == *init.cell);

  const std::size_t cell = 97;
  const Eigen::VectorXd z = loop.abstraction.representative(cell);
  RefinedController on(loop, loop.certificate.P * z);
  CHECK(on.cell() == cell);
  CHECK(on.relation_value(loop.certificate.P * z) < 1e-20);
  CHECK(on.location() == loop.dfa.step(loop.dfa.initial(), 1));

  auto far = loop;
  far.certificate.epsilon = 1e-6;
  CHECK_THROWS_AS(RefinedController(far, x0), Error);
  CHECK_NOTHROW(RefinedController(far, x0, false));
}

TEST_CASE("control law identities") {
  const auto& loop = *toy().loop;
  const auto& c = loop.certificate;
  for (std::size_t cell : {10u, 97u, 150u}) {
    const Eigen::VectorXd z = loop.abstraction.representative(cell);
    const Eigen::VectorXd x2 = c.P * z;
    RefinedController ctrl(loop, x2);
    const Eigen::VectorXd u2 = ctrl.control(x2);
    const Eigen::VectorXd& u1 = loop.abstraction.inputs[ctrl.last_input()];
    CHECK((u2 - (c.R * u1 + c.Q * z)).norm() < 1e-12);
    const Eigen::Vector3d dx(0.1, -0.2, 0.3);
    RefinedController ctrl2(loop, x2);
    CHECK((ctrl2.control(x2 + dx) - (u2 + c.K * dx)).norm() < 1e-12);
  }
}

TEST_CASE("noise reconstruction") {
  auto loop = *toy().loop;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int t = 0; t < 20; ++t) {
    loop.concrete.A = Eigen::MatrixXd::NullaryExpr(3, 3, [&] { return g(rng); });
    loop.concrete.B = Eigen::MatrixXd::NullaryExpr(3, 1, [&] { return g(rng); });
    loop.concrete.Bw = Eigen::MatrixXd::NullaryExpr(3, 2, [&] { return g(rng); });
    RefinedController ctrl(loop, loop.concrete.x0, false);
    const Eigen::VectorXd x = Eigen::VectorXd::NullaryExpr(3, [&] { return g(rng); });
    const Eigen::VectorXd u = Eigen::VectorXd::NullaryExpr(1, [&] { return g(rng); });
    const Eigen::VectorXd w = Eigen::VectorXd::NullaryExpr(2, [&] { return g(rng); });
    const Eigen::VectorXd next = loop.concrete.A * x + loop.concrete.B * u + loop.concrete.Bw * w;
    CHECK((ctrl.reconstruct_noise(x, u, next) - w).norm() < 1e-10);
    const Eigen::Vector3d off = Eigen::Vector3d(loop.concrete.Bw.col(0)).cross(Eigen::Vector3d(loop.concrete.Bw.col(1))).normalized();
    CHECK_THROWS_AS(ctrl.observe(x, u, next + 1e-3 * off), NumericError);
  }
  loop.concrete.Bw = Eigen::MatrixXd::Zero(3, 1);
  CHECK_THROWS_AS(RefinedController(loop, loop.concrete.x0, false), Error);
}

TEST_CASE("zero noise moves the abstract state deterministically") {
  const auto& loop = *toy().loop;
  const auto& red = loop.abstraction.reduced;
  RefinedController ctrl(loop, loop.concrete.x0);
  const Eigen::VectorXd x = loop.concrete.x0;
  const std::size_t cell = ctrl.cell();
  const Eigen::VectorXd u2 = ctrl.control(x);
  const Eigen::VectorXd next = loop.concrete.A * x + loop.concrete.B * u2;
  ctrl.observe(x, u2, next);
  const Eigen::VectorXd z = loop.abstraction.representative(cell);
  const Eigen::VectorXd x1 = red.A1 * z + red.B1 * loop.abstraction.inputs[ctrl.last_input()];
  CHECK(ctrl.cell() == loop.abstraction.grid.locate(x1).value_or(loop.abstraction.sink()));
  CHECK(ctrl.time() == 1);
}

TEST_CASE("trace matches a straight-line simulator") {
  const auto& loop = *toy().loop;
  MonteCarloOptions opt;
  opt.runs = 3;
  opt.horizon = 20;
  opt.seed = 123;
  opt.keep_traces = 3;
  const auto mc = monte_carlo(loop, opt);
  REQUIRE(mc.traces.size() == 3);
  const auto& m = loop.concrete;
  const auto& c = loop.certificate;
  const auto& red = loop.abstraction.reduced;
  for (std::uint64_t run = 0; run < 3; ++run) {
    CounterRng rng(opt.seed, run);
    Eigen::VectorXd x = m.x0;
    const Eigen::VectorXd xhat = (c.P.transpose() * c.M * c.P).inverse() * c.P.transpose() * c.M * x;
    std::size_t cell = *loop.abstraction.grid.locate(xhat);
    auto q = loop.dfa.step(loop.dfa.initial(), loop.labels.label_of(m.C * x));
    const auto& steps = mc.traces[run].steps;
    std::size_t t = 0;
    for (; t < 20 && !loop.dfa.is_accepting(q); ++t) {
      REQUIRE(t < steps.size());
      const auto& s = steps[t];
      const bool sink = cell == loop.abstraction.sink();
      const std::uint32_t j = sink ? 0 : loop.policy.input(cell, q, t);
      const Eigen::VectorXd z = sink ? Eigen::VectorXd::Zero(1) : loop.abstraction.representative(cell);
      const Eigen::VectorXd u1 = loop.abstraction.inputs[j];
      const Eigen::VectorXd u2 = sink ? Eigen::VectorXd(c.K * x) : Eigen::VectorXd(c.R * u1 + c.Q * z + c.K * (x - c.P * z));
      CHECK(s.x1 == cell);
      CHECK(s.q == q);
      CHECK((s.x2 - x).norm() < 1e-12);
      CHECK((s.u2 - u2).norm() < 1e-12);
      CHECK(s.letter == loop.labels.label_of(s.y2));
      Eigen::VectorXd w(m.noise_dim());
      for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = rng.normal();
      x = m.A * x + m.B * u2 + m.Bw * w;
      if (!sink) cell = loop.abstraction.grid.locate(red.A1 * z + red.B1 * u1 + red.Bw1 * w).value_or(loop.abstraction.sink());
      q = loop.dfa.step(q, loop.labels.label_of(m.C * x));
    }
    CHECK(steps.size() == t + 1);
    CHECK((steps.back().x2 - x).norm() < 1e-12);
    CHECK((mc.traces[run].verdict == Verdict::Accepted) == loop.dfa.is_accepting(q));
  }
}

TEST_CASE("monte carlo: determinism, trivial formulas, relation maintenance") {
  const auto& loop = *toy().loop;
  MonteCarloOptions opt;
  opt.runs = 2000;
  opt.horizon = 20;
  opt.seed = 7;
  opt.keep_traces = 2;
  const auto a = monte_carlo(loop, opt);
  const auto b = monte_carlo(loop, opt);
  CHECK(a.successes == b.successes);
  CHECK(a.relation_steps == b.relation_steps);
  CHECK(a.traces[1].steps.size() == b.traces[1].steps.size());
  CHECK(a.interval.lower <= a.probability + 1e-12);
  CHECK(a.probability <= a.interval.upper + 1e-12);

  const double delta = loop.certificate.delta;
  REQUIRE(a.relation_steps > 0);
  const double n = static_cast<double>(a.relation_steps);
  CHECK(static_cast<double>(a.relation_exits) / n <= delta + 3.0 * std::sqrt(delta * (1 - delta) / n));

  opt.runs = 200;
  CHECK(monte_carlo(with_formula(loop, "true"), opt).probability == 1.0);
  CHECK(monte_carlo(with_formula(loop, "k & !k"), opt).probability == 0.0);
  opt.runs = 0;
  CHECK_THROWS_AS(monte_carlo(loop, opt), Error);
}

TEST_CASE("exact evaluation") {
  std::mt19937_64 rng(31);
  Alphabet ab({"a"});
  const auto dfa = logic::compile_dfa(logic::parse_scltl("F a", ab), ab);

  SUBCASE("optimal policy reproduces the optimum") {
    for (int trial = 0; trial < 10; ++trial) {
      const auto t = oracle::random_mdp(rng, 6, 2);
      const auto K = oracle::random_target(rng, 6);
      const auto kernel = abstraction::Kernel::from_dense(t);
      std::vector<Letter> labels(6);
      synthesis::ScltlProblem p;
      p.kernel = &kernel;
      p.dfa = &dfa;
      p.absorbing.assign(6, false);
      for (std::size_t s = 0; s < 6; ++s) {
        labels[s] = K[s] ? 1 : 0;
        p.letters.push_back({labels[s]});
      }
      const auto best = oracle::enumerate_policies(t, K, 3);
      for (std::size_t s0 = 0; s0 < 6; ++s0) {
        const auto r = synthesis::robust_scltl(p, synthesis::Horizon::finite(3), s0);
        CHECK(r.policy.bound == doctest::Approx(best[s0]).epsilon(1e-12));
        const double v = exact_eval_finite(kernel, r.policy, dfa, labels, s0, synthesis::Horizon::finite(3));
        CHECK(std::abs(v - best[s0]) < 1e-12);
      }
    }
  }

  SUBCASE("agrees with sampling") {
    const auto t = oracle::random_mdp(rng, 4, 2);
    const auto kernel = abstraction::Kernel::from_dense(t);
    const std::vector<Letter> labels = {0, 0, 1, 0};
    synthesis::RobustPolicy pol;
    pol.num_states = 4;
    pol.num_locations = dfa.num_locations();
    pol.num_inputs = 2;
    pol.horizon = synthesis::Horizon::finite(6);
    std::uniform_int_distribution<std::uint32_t> coin(0, 1);
    for (int k = 0; k < 6; ++k) {
      std::vector<std::uint32_t> table(4 * dfa.num_locations());
      for (auto& e : table) e = coin(rng);
      pol.tables.push_back(table);
    }
    const double exact = exact_eval_finite(kernel, pol, dfa, labels, 0, synthesis::Horizon::finite(6));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int runs = 400'000;
    int hits = 0;
    for (int r = 0; r < runs; ++r) {
      std::size_t s = 0;
      auto q = dfa.step(dfa.initial(), labels[s]);
      for (int k = 0; k < 6 && !dfa.is_accepting(q); ++k) {
        const auto& row = t[s][pol.tables[k][s * dfa.num_locations() + q]];
        double x = u(rng), acc = 0.0;
        std::size_t next = row.size() - 1;
        for (std::size_t l = 0; l < row.size(); ++l) {
          acc += row[l];
          if (x < acc) {
            next = l;
            break;
          }
        }
        s = next;
        q = dfa.step(q, labels[s]);
      }
      hits += dfa.is_accepting(q) ? 1 : 0;
    }
    const double p = static_cast<double>(hits) / runs;
    const double se = std::sqrt(std::max(exact * (1 - exact), 1e-12) / runs);
    CHECK(std::abs(p - exact) <= 4.0 * se);
  }

  SUBCASE("resource cap") {
    const auto t = oracle::random_mdp(rng, 4, 1);
    synthesis::RobustPolicy pol;
    pol.num_states = 4;
    pol.num_locations = dfa.num_locations();
    pol.num_inputs = 1;
    pol.tables = {std::vector<std::uint32_t>(8, 0)};
    CHECK_THROWS_AS(exact_eval_finite(abstraction::Kernel::from_dense(t), pol, dfa, {0, 0, 1, 0}, 0,
                                      synthesis::Horizon::unbounded(), 1000, 4),
                    ResourceError);
  }
}
