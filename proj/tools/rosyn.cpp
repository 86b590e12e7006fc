// Command-line driver: translate, abstract, certify, synthesize, simulate,
// bound and pipeline. Exit codes: 0 ok, 2 parse error, 3 resource cap,
// 4 stage failure.
#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <json.hpp>

#include "rosyn/io/io.hpp"
#include "rosyn/logic/compiler.hpp"
#include "rosyn/logic/formula.hpp"
#include "rosyn/pipeline.hpp"

namespace {

using rosyn::RunConfig;
namespace fs = std::filesystem;

struct Flags {
  std::string config;
  std::string model;
  std::string labels;
  std::string formula;
  std::string dfa;
  std::string grid;
  std::vector<std::string> atoms;
  double delta = -1.0;
  double eps = -1.0;
  int horizon = -1;
  bool unbounded = false;
  long runs = -1;
  long sim_horizon = -1;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir = ".";
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "Run configuration (JSON)");
  cmd->add_option("--model", f.model, "Concrete model (JSON)");
  cmd->add_option("--labels", f.labels, "Output labelling (JSON)");
  cmd->add_option("--formula", f.formula, "scLTL formula");
  cmd->add_option("--dfa", f.dfa, "Precompiled automaton (JSON)");
  cmd->add_option("--grid", f.grid, "lo:hi:count per reduced axis, comma separated");
  cmd->add_option("--delta", f.delta, "Probability deviation delta");
  cmd->add_option("--eps", f.eps, "Use this epsilon instead of the certified one");
  auto* h = cmd->add_option("--horizon", f.horizon, "Finite synthesis horizon");
  auto* u = cmd->add_flag("--unbounded", f.unbounded, "Fixed-point synthesis");
  h->excludes(u);
  cmd->add_option("--runs", f.runs, "Monte Carlo runs");
  cmd->add_option("--sim-horizon", f.sim_horizon, "Simulation length per run");
  cmd->add_option("--seed", f.seed, "Random seed")->each([&f](const std::string&) { f.seed_set = true; });
  cmd->add_option("--out-dir", f.out_dir, "Output directory");
}

RunConfig load(const Flags& f) {
  RunConfig c;
  if (!f.config.empty()) {
    const fs::path p(f.config);
    c = rosyn::parse_config(rosyn::io::read_text(p), p.parent_path());
  }
  if (!f.model.empty()) c.model = rosyn::io::parse_model(rosyn::io::read_text(f.model));
  if (!f.labels.empty()) c.labels = rosyn::io::parse_labelling(rosyn::io::read_text(f.labels));
  if (!f.formula.empty()) {
    c.formula = f.formula;
    c.dfa.reset();
  }
  if (!f.dfa.empty()) c.dfa = rosyn::io::parse_dfa(rosyn::io::read_text(f.dfa));
  if (!f.grid.empty()) rosyn::parse_grid_flag(f.grid, c.grid_box, c.grid_counts);
  if (f.delta >= 0.0) c.delta = f.delta;
  if (f.eps >= 0.0) c.eps_override = f.eps;
  if (f.horizon >= 0) c.horizon = rosyn::synthesis::Horizon::finite(f.horizon);
  if (f.unbounded) c.horizon = rosyn::synthesis::Horizon::unbounded();
  if (f.runs >= 0) c.runs = f.runs;
  if (f.sim_horizon >= 0) c.sim_horizon = static_cast<std::size_t>(f.sim_horizon);
  if (f.seed_set) c.seed = f.seed;
  if (c.model.A.size() == 0) throw rosyn::Error("no model given (--model or --config)");
  if (c.feedback.size() == 0) c.feedback = Eigen::MatrixXd::Zero(c.model.input_dim(), c.model.state_dim());
  return c;
}

rosyn::relation::SimulationCertificate certified(const RunConfig& c, const rosyn::Prepared& prep) {
  const auto search = rosyn::certify_stage(c, prep);
  if (!search.result.feasible()) {
    throw rosyn::StageError("certify", search.result.reason + " [lambda=" +
                                           std::to_string(search.result.diagnostics.lambda) + "]");
  }
  return *search.result.certificate;
}

int cmd_translate(const Flags& f) {
  rosyn::Alphabet alphabet;
  if (!f.atoms.empty()) {
    alphabet = rosyn::Alphabet(f.atoms);
  } else if (!f.labels.empty()) {
    alphabet = rosyn::io::parse_labelling(rosyn::io::read_text(f.labels)).alphabet();
  } else if (!f.config.empty()) {
    alphabet = load(f).labels.alphabet();
  } else {
    throw rosyn::Error("translate needs --atoms, --labels or --config");
  }
  std::string formula = f.formula;
  if (formula.empty() && !f.config.empty()) formula = load(f).formula;
  const auto dfa = rosyn::logic::compile_dfa(rosyn::logic::parse_scltl(formula, alphabet), alphabet);
  const std::string text = rosyn::io::write_dfa(dfa, formula);
  if (f.out_dir == ".") {
    std::cout << text;
  } else {
    rosyn::io::write_text(fs::path(f.out_dir) / "dfa.json", text);
  }
  std::cerr << "locations: " << dfa.num_locations() << "\n";
  return 0;
}

int cmd_abstract(const Flags& f) {
  const auto c = load(f);
  const auto prep = rosyn::prepare_abstraction(c);
  rosyn::io::write_text(fs::path(f.out_dir) / "abstraction.json", rosyn::io::write_abstraction(prep.abstraction));
  std::cout << "cells " << prep.abstraction.num_cells() << "\ninputs " << prep.abstraction.inputs.size()
            << "\nkernel_entries " << prep.abstraction.kernel.num_entries() << "\n";
  return 0;
}

int cmd_certify(const Flags& f) {
  const auto c = load(f);
  const auto prep = rosyn::prepare_abstraction(c);
  const auto search = rosyn::certify_stage(c, prep);
  const auto& d = search.result.diagnostics;
  std::cout << "lambda " << d.lambda << "\ngamma_u " << d.gamma_u << "\ngamma_w " << d.gamma_w << "\ngamma_beta "
            << d.gamma_beta << "\n";
  if (!search.result.feasible()) {
    std::cerr << "certify: " << search.result.reason << "\n";
    return 4;
  }
  std::cout << "epsilon " << search.result.certificate->epsilon << "\ndelta " << c.delta << "\n";
  rosyn::io::write_text(fs::path(f.out_dir) / "certificate.json",
                        rosyn::io::write_certificate(*search.result.certificate));
  return 0;
}

int cmd_synthesize(const Flags& f) {
  const auto c = load(f);
  const auto dfa = rosyn::automaton(c);
  const auto prep = rosyn::prepare_abstraction(c);
  const auto cert = certified(c, prep);
  const auto s = rosyn::synthesis_stage(c, prep, dfa, cert);
  const fs::path out(f.out_dir);
  rosyn::io::write_text(out / "policy.json", rosyn::io::write_policy(s.result.policy));
  rosyn::io::write_text(out / "values.csv", rosyn::io::value_csv(prep.abstraction, s.result.values));
  rosyn::io::write_text(out / "curve.csv", rosyn::io::bound_curve_csv(prep.abstraction, s.curve));
  std::cout << "epsilon " << s.epsilon_used << "\ndelta " << c.delta << "\nbound " << s.result.policy.bound << "\n";
  return 0;
}

int cmd_simulate(const Flags& f) {
  const auto c = load(f);
  const auto dfa = rosyn::automaton(c);
  const auto prep = rosyn::prepare_abstraction(c);
  const auto cert = certified(c, prep);
  const auto s = rosyn::synthesis_stage(c, prep, dfa, cert);
  rosyn::refinement::ClosedLoop loop{c.model, prep.abstraction, cert, s.result.policy, dfa, c.labels};
  loop.certificate.epsilon = s.epsilon_used;
  rosyn::refinement::MonteCarloOptions opt;
  opt.runs = c.runs;
  opt.horizon = c.sim_horizon;
  opt.seed = c.seed;
  opt.keep_traces = c.keep_traces;
  const auto mc = rosyn::refinement::monte_carlo(loop, opt);
  rosyn::io::write_text(fs::path(f.out_dir) / "traces.csv", rosyn::io::trace_csv(mc.traces, c.labels.alphabet()));
  std::cout << "bound " << s.result.policy.bound << "\nprobability " << mc.probability << "\nwilson_lower "
            << mc.interval.lower << "\nwilson_upper " << mc.interval.upper << "\n";
  return 0;
}

int cmd_bound(const Flags& f) {
  const auto c = load(f);
  const auto prep = rosyn::prepare_abstraction(c);
  const auto cert = certified(c, prep);
  const auto b = rosyn::bound_stage(c, prep, cert);
  std::cout << "epsilon " << b.epsilon << "\nlower " << b.lower << "\nupper " << b.upper << "\n";
  return 0;
}

int cmd_pipeline(const Flags& f) {
  const auto c = load(f);
  const auto out = rosyn::run_pipeline(c, f.out_dir);
  std::cout << out.report_json;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rosyn: robust scLTL controller synthesis via certified grid abstractions"};
  app.require_subcommand(1);
  Flags f;
  struct Command {
    const char* name;
    const char* help;
    int (*run)(const Flags&);
  };
  const Command commands[] = {
      {"translate", "Compile a formula into a DFA", cmd_translate},
      {"abstract", "Build the finite abstraction", cmd_abstract},
      {"certify", "Certify the simulation relation", cmd_certify},
      {"synthesize", "Robust policy and value curve", cmd_synthesize},
      {"simulate", "Monte Carlo of the refined controller", cmd_simulate},
      {"bound", "Lower and upper reachability bounds", cmd_bound},
      {"pipeline", "Run every stage and write a report", cmd_pipeline},
  };
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    add_common(sub, f);
    if (std::string(c.name) == "translate") sub->add_option("--atoms", f.atoms, "Atomic propositions");
    subs.emplace_back(sub, &c);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  try {
    for (const auto& [sub, c] : subs) {
      if (sub->parsed()) return c->run(f);
    }
  } catch (const rosyn::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const rosyn::ResourceError& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return 3;
  } catch (const rosyn::StageError& e) {
    std::cerr << "stage " << e.stage() << " failed: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
