#include "rosyn/error.hpp"
#include "rosyn/parallel.hpp"
#include "rosyn/random.hpp"
#include "rosyn/refinement/refinement.hpp"

namespace rosyn::refinement {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Accepted:
      return "accepted";
    case Verdict::HorizonExhausted:
      return "horizon_exhausted";
    case Verdict::RelationLost:
      return "relation_lost";
  }
  return "unknown";
}

namespace {

struct RunOutcome {
  bool success = false;
  bool fail_safe = false;
  long relation_steps = 0;
  long relation_exits = 0;
  Trace trace;
};

RunOutcome simulate(const ClosedLoop& loop, const MonteCarloOptions& opt, std::uint64_t run, bool keep) {
  RunOutcome out;
  CounterRng rng(opt.seed, run);
  const auto& m = loop.concrete;
  const double eps2 = loop.certificate.epsilon * loop.certificate.epsilon;
  Eigen::VectorXd x2 = m.x0;
  RefinedController ctrl(loop, x2, false);
  bool lost = false;
  Eigen::VectorXd w(m.noise_dim());

  auto record = [&](const Eigen::VectorXd& u2) {
    if (!keep) return;
    TraceStep s;
    s.t = ctrl.time();
    s.x2 = x2;
    s.y2 = model::output(m, x2);
    s.u2 = u2;
    s.x1 = ctrl.cell();
    s.u1 = ctrl.last_input();
    s.q = ctrl.location();
    s.letter = loop.labels.label_of(s.y2);
    s.fail_safe = ctrl.fail_safe();
    out.trace.steps.push_back(std::move(s));
  };

  for (std::size_t t = 0; t < opt.horizon && !ctrl.accepted(); ++t) {
    const bool related = ctrl.relation_value(x2) <= eps2;
    const Eigen::VectorXd u2 = ctrl.control(x2);
    record(u2);
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = rng.normal();
    const Eigen::VectorXd next = m.step(x2, u2, w);
    ctrl.observe(x2, u2, next);
    x2 = next;
    if (related) {
      ++out.relation_steps;
      if (ctrl.relation_value(x2) > eps2) {
        ++out.relation_exits;
        lost = true;
      }
    }
  }
  record(Eigen::VectorXd::Zero(m.input_dim()));
  out.success = ctrl.accepted();
  out.fail_safe = ctrl.fail_safe();
  out.trace.verdict = out.success ? Verdict::Accepted : (lost ? Verdict::RelationLost : Verdict::HorizonExhausted);
  return out;
}

}  // namespace

MonteCarloResult monte_carlo(const ClosedLoop& loop, const MonteCarloOptions& opt) {
  if (opt.runs < 1) throw Error("monte_carlo: runs must be >= 1");
  loop.concrete.validate();
  // Construct once up front so configuration errors surface here, not in a worker.
  RefinedController probe(loop, loop.concrete.x0, false);
  (void)probe;

  const auto n = static_cast<std::size_t>(opt.runs);
  std::vector<RunOutcome> outcomes(n);
  std::vector<std::string> errors(n);
  parallel_for(
      n,
      [&](std::size_t i) {
        try {
          outcomes[i] = simulate(loop, opt, i, i < opt.keep_traces);
        } catch (const std::exception& e) {
          errors[i] = e.what();
        }
      },
      16);

  MonteCarloResult res;
  res.runs = opt.runs;
  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i].empty()) throw NumericError("monte_carlo: run " + std::to_string(i) + ": " + errors[i]);
    const auto& o = outcomes[i];
    res.successes += o.success ? 1 : 0;
    res.fail_safe_runs += o.fail_safe ? 1 : 0;
    res.relation_steps += o.relation_steps;
    res.relation_exits += o.relation_exits;
    if (i < opt.keep_traces) res.traces.push_back(o.trace);
  }
  res.probability = static_cast<double>(res.successes) / static_cast<double>(res.runs);
  res.interval = wilson_interval(res.successes, res.runs);
  return res;
}

}  // namespace rosyn::refinement
