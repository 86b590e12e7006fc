#include "rosyn/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <json.hpp>
#include <sstream>

#include "rosyn/abstraction/reduction.hpp"
#include "rosyn/io/io.hpp"
#include "rosyn/logic/compiler.hpp"
#include "rosyn/logic/formula.hpp"
#include "rosyn/numeric.hpp"

namespace rosyn {

using nlohmann::json;

namespace {

Eigen::MatrixXd matrix_from(const json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows == 0 ? 0 : static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j[static_cast<std::size_t>(i)].size()) != cols) throw Error("config: ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(i, c) = j[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)].get<double>();
    }
  }
  return m;
}

Eigen::VectorXd vector_from(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

std::string document(const json& j, const std::filesystem::path& base) {
  if (j.is_string()) return io::read_text(base / j.get<std::string>());
  return j.dump();
}

template <class F>
auto stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

json vec_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

}  // namespace

void parse_grid_flag(const std::string& text, model::Box& box, std::vector<std::size_t>& counts) {
  std::vector<double> lo, hi;
  counts.clear();
  std::stringstream ss(text);
  std::string axis;
  while (std::getline(ss, axis, ',')) {
    const auto a = axis.find(':');
    const auto b = axis.find(':', a == std::string::npos ? a : a + 1);
    if (a == std::string::npos || b == std::string::npos) throw Error("grid: expected lo:hi:count, got '" + axis + "'");
    try {
      lo.push_back(std::stod(axis.substr(0, a)));
      hi.push_back(std::stod(axis.substr(a + 1, b - a - 1)));
      const long n = std::stol(axis.substr(b + 1));
      if (n <= 0) throw Error("grid: count must be positive");
      counts.push_back(static_cast<std::size_t>(n));
    } catch (const std::logic_error&) {
      throw Error("grid: malformed axis '" + axis + "'");
    }
  }
  if (counts.empty()) throw Error("grid: empty specification");
  box.lo = Eigen::Map<Eigen::VectorXd>(lo.data(), static_cast<Eigen::Index>(lo.size()));
  box.hi = Eigen::Map<Eigen::VectorXd>(hi.data(), static_cast<Eigen::Index>(hi.size()));
}

Eigen::MatrixXd riccati_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, int max_iterations) {
  const auto n = A.rows();
  const auto m = B.cols();
  Eigen::MatrixXd X = Eigen::MatrixXd::Identity(n, n);
  for (int it = 0; it < max_iterations; ++it) {
    const Eigen::MatrixXd S = Eigen::MatrixXd::Identity(m, m) + B.transpose() * X * B;
    const Eigen::MatrixXd G = S.ldlt().solve(B.transpose() * X * A);
    const Eigen::MatrixXd next = Eigen::MatrixXd::Identity(n, n) + A.transpose() * X * (A - B * G);
    const double change = (next - X).norm();
    X = 0.5 * (next + next.transpose());
    if (!X.allFinite()) break;
    if (change <= 1e-12 * std::max(1.0, X.cwiseAbs().maxCoeff())) {
      const Eigen::MatrixXd S2 = Eigen::MatrixXd::Identity(m, m) + B.transpose() * X * B;
      Eigen::MatrixXd K = -S2.ldlt().solve(B.transpose() * X * A);
      if (spectral_radius(A + B * K) < 1.0) return K;
      break;
    }
  }
  throw NumericError("riccati iteration did not converge (is (A, B) stabilizable?)");
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("config: invalid JSON: ") + e.what());
  }
  if (j.value("schema", -1) != io::kSchemaVersion) throw Error("config: unsupported schema version");
  try {
    RunConfig c;
    c.model = io::parse_model(document(j.at("model"), base));
    c.labels = io::parse_labelling(document(j.at("labels"), base));
    c.formula = j.value("formula", std::string{});
    if (j.contains("dfa")) c.dfa = io::parse_dfa(document(j["dfa"], base));
    c.feedback = j.contains("feedback") ? matrix_from(j["feedback"]) : riccati_gain(c.model.A, c.model.B);
    c.least_squares_R = j.value("interface_input", std::string{"identity"}) == "least_squares";
    c.reduced_order = j.value("reduced_order", Eigen::Index{1});
    c.output_coordinates = j.value("output_coordinates", true);
    const auto& g = j.at("grid");
    c.grid_box = model::Box{vector_from(g.at("lo")), vector_from(g.at("hi"))};
    c.grid_counts = g.at("counts").get<std::vector<std::size_t>>();
    c.inputs_per_axis = j.value("inputs_per_axis", std::size_t{1});
    c.delta = j.value("delta", 0.05);
    if (j.contains("epsilon") && !j["epsilon"].is_null()) c.eps_override = j["epsilon"].get<double>();
    if (j.contains("horizon")) {
      const auto& h = j["horizon"];
      c.horizon = (h.is_string() && h.get<std::string>() == "unbounded") ? synthesis::Horizon::unbounded()
                                                                          : synthesis::Horizon::finite(h.get<int>());
    }
    c.runs = j.value("runs", 1000L);
    c.sim_horizon = j.value("sim_horizon", std::size_t{100});
    c.seed = j.value("seed", std::uint64_t{0});
    c.keep_traces = j.value("keep_traces", std::size_t{10});
    if (j.contains("target")) c.target = model::Box{vector_from(j["target"].at("lo")), vector_from(j["target"].at("hi"))};
    return c;
  } catch (const json::exception& e) {
    throw Error(std::string("config: ") + e.what());
  }
}

Prepared prepare_abstraction(const RunConfig& cfg) {
  cfg.model.validate();
  if (cfg.feedback.rows() != cfg.model.input_dim() || cfg.feedback.cols() != cfg.model.state_dim()) {
    throw DimensionError("feedback gain must be " + std::to_string(cfg.model.input_dim()) + "x" +
                         std::to_string(cfg.model.state_dim()));
  }
  const double rho = spectral_radius(cfg.model.A + cfg.model.B * cfg.feedback);
  if (rho >= 1.0) {
    throw NumericError("closed loop A + B K has spectral radius " + std::to_string(rho) +
                       ", so lambda >= 1 for every weight and no relation can be certified");
  }
  Prepared p;
  auto red = abstraction::balanced_truncation(cfg.model, cfg.feedback, cfg.reduced_order);
  if (cfg.output_coordinates) red = abstraction::to_output_coordinates(red);
  const auto fit = relation::fit_projection(red.A1, red.C1, cfg.model.A, cfg.model.B, cfg.model.C, red.P);
  if (fit.residual > 1e-8) {
    throw NumericError("no projection P satisfies P A1 = A2 P + B2 Q and C2 P = C1 (residual " +
                       std::to_string(fit.residual) + ")");
  }
  red.P = fit.P;
  p.Q = fit.Q;
  p.projection_residual = fit.residual;
  p.R = cfg.least_squares_R ? Eigen::MatrixXd(pseudo_inverse(cfg.model.B) * red.P * red.B1)
                            : Eigen::MatrixXd::Identity(cfg.model.input_dim(), red.B1.cols());
  abstraction::GridPartition grid(cfg.grid_box, cfg.grid_counts);
  auto inputs = abstraction::input_grid(red.B1.cols(), cfg.model.input_bound, cfg.inputs_per_axis);
  p.abstraction = abstraction::build_abstraction(red, grid, std::move(inputs));
  return p;
}

relation::CertificateInputs certificate_inputs(const RunConfig& cfg, const Prepared& prep) {
  relation::CertificateInputs in;
  in.concrete = cfg.model;
  in.reduced = prep.abstraction.reduced;
  in.Q = prep.Q;
  in.R = prep.R;
  in.K = cfg.feedback;
  in.input_bound = cfg.model.input_bound;
  in.diameter = prep.abstraction.grid.diameter();
  return in;
}

relation::WeightSearchResult certify_stage(const RunConfig& cfg, const Prepared& prep) {
  return relation::optimize_weight(certificate_inputs(cfg, prep), cfg.delta);
}

logic::Dfa automaton(const RunConfig& cfg) {
  if (cfg.dfa) {
    if (!(cfg.dfa->alphabet() == cfg.labels.alphabet())) throw Error("automaton alphabet differs from the labelling");
    return *cfg.dfa;
  }
  if (cfg.formula.empty()) throw Error("no formula or automaton given");
  return logic::compile_dfa(logic::parse_scltl(cfg.formula, cfg.labels.alphabet()), cfg.labels.alphabet());
}

SynthesisOutcome synthesis_stage(const RunConfig& cfg, const Prepared& prep, const logic::Dfa& dfa,
                                 const relation::SimulationCertificate& cert) {
  SynthesisOutcome out;
  out.epsilon_used = cfg.eps_override.value_or(cert.epsilon);
  relation::SimulationCertificate used = cert;
  used.epsilon = out.epsilon_used;
  out.initial = relation::initial_abstract_state(used, prep.abstraction.grid, cfg.model.x0);
  out.problem = synthesis::make_scltl_problem(prep.abstraction, dfa, cfg.labels, out.epsilon_used, cfg.delta);
  out.result = synthesis::robust_scltl(out.problem, cfg.horizon, out.initial.cell);
  out.result.policy.epsilon = out.epsilon_used;
  out.curve.resize(prep.abstraction.num_cells());
  for (std::size_t i = 0; i < out.curve.size(); ++i) {
    out.curve[i] = synthesis::scltl_bound_at(out.problem, out.result.values, i);
  }
  return out;
}

BoundOutcome bound_stage(const RunConfig& cfg, const Prepared& prep, const relation::SimulationCertificate& cert) {
  if (!cfg.target && cfg.labels.regions().empty()) throw Error("bound needs a target rectangle");
  if (!cfg.horizon.is_finite()) throw Error("bound needs a finite horizon");
  const model::Box K = cfg.target.value_or(cfg.labels.regions().front().box);
  BoundOutcome b;
  b.epsilon = cfg.eps_override.value_or(cert.epsilon);
  relation::SimulationCertificate used = cert;
  used.epsilon = b.epsilon;
  b.initial_cell = *relation::initial_abstract_state(used, prep.abstraction.grid, cfg.model.x0).cell;
  const auto& abs = prep.abstraction;
  b.lower = synthesis::robust_reach(abs, K, b.epsilon, cfg.delta, cfg.horizon, b.initial_cell).policy.bound;
  b.upper = synthesis::upper_bound_reach(abs, K, b.epsilon, cfg.delta, cfg.horizon.steps(), b.initial_cell);
  if (b.lower > b.upper + 1e-12) {
    throw NumericError("lower bound " + std::to_string(b.lower) + " exceeds upper bound " + std::to_string(b.upper));
  }
  return b;
}

PipelineOutcome run_pipeline(const RunConfig& cfg, const std::filesystem::path& out_dir) {
  using clock = std::chrono::steady_clock;
  json timings = json::object();
  auto timed = [&](const char* name, auto&& f) {
    const auto t0 = clock::now();
    auto r = stage(name, f);
    timings[name] = std::chrono::duration<double>(clock::now() - t0).count();
    return r;
  };

  const logic::Dfa dfa = timed("translate", [&] { return automaton(cfg); });
  const Prepared prep = timed("abstract", [&] { return prepare_abstraction(cfg); });
  const auto search = timed("certify", [&] { return certify_stage(cfg, prep); });
  if (!search.result.feasible()) {
    const auto& d = search.result.diagnostics;
    throw StageError("certify", search.result.reason + " [lambda=" + std::to_string(d.lambda) + "]");
  }
  const auto& cert = *search.result.certificate;
  auto synth = timed("synthesize", [&] { return synthesis_stage(cfg, prep, dfa, cert); });

  refinement::ClosedLoop loop{cfg.model, prep.abstraction, cert, synth.result.policy, dfa, cfg.labels};
  loop.certificate.epsilon = synth.epsilon_used;
  refinement::MonteCarloOptions mc_opt;
  mc_opt.runs = cfg.runs;
  mc_opt.horizon = cfg.sim_horizon;
  mc_opt.seed = cfg.seed;
  mc_opt.keep_traces = cfg.keep_traces;
  auto mc = timed("simulate", [&] { return refinement::monte_carlo(loop, mc_opt); });

  json report = json::object();
  report["schema"] = io::kSchemaVersion;
  report["kind"] = "report";
  report["formula"] = cfg.formula;
  report["dfa_locations"] = dfa.num_locations();
  report["delta"] = cfg.delta;
  report["epsilon_certified"] = cert.epsilon;
  report["epsilon_used"] = synth.epsilon_used;
  report["certificate"] = {{"lambda", cert.lambda},         {"gamma_u", cert.gamma_u},
                           {"gamma_w", cert.gamma_w},       {"gamma_beta", cert.gamma_beta},
                           {"c_w", cert.c_w},               {"weight_rate", search.rate},
                           {"weight_eta", search.eta},      {"projection_residual", prep.projection_residual}};
  report["abstraction"] = {{"cells", prep.abstraction.num_cells()},
                           {"inputs", prep.abstraction.inputs.size()},
                           {"kernel_entries", prep.abstraction.kernel.num_entries()},
                           {"hankel_singular_values", vec_json(prep.abstraction.reduced.hankel_singular_values)}};
  report["initial"] = {{"cell", synth.initial.cell ? json(*synth.initial.cell) : json(nullptr)},
                       {"x1", vec_json(synth.initial.unsnapped)},
                       {"relation_value", synth.initial.residual},
                       {"in_relation", synth.initial.feasible}};
  report["synthesis"] = {{"bound", synth.result.policy.bound},
                         {"iterations", synth.result.values.iterations},
                         {"converged", synth.result.values.converged},
                         {"horizon", cfg.horizon.is_finite() ? json(cfg.horizon.steps()) : json("unbounded")}};
  report["simulation"] = {{"runs", mc.runs},
                          {"successes", mc.successes},
                          {"probability", mc.probability},
                          {"wilson_lower", mc.interval.lower},
                          {"wilson_upper", mc.interval.upper},
                          {"wilson_half_width", mc.interval.half_width},
                          {"horizon", cfg.sim_horizon},
                          {"seed", cfg.seed},
                          {"fail_safe_runs", mc.fail_safe_runs},
                          {"relation_steps", mc.relation_steps},
                          {"relation_exits", mc.relation_exits}};

  PipelineOutcome out;
  out.report_json = report.dump(2) + "\n";
  out.epsilon_certified = cert.epsilon;
  out.epsilon_used = synth.epsilon_used;
  out.bound = synth.result.policy.bound;
  stage("write", [&] {
    io::write_text(out_dir / "report.json", out.report_json);
    io::write_text(out_dir / "timings.json", timings.dump(2) + "\n");
    io::write_text(out_dir / "dfa.json", io::write_dfa(dfa, cfg.formula));
    io::write_text(out_dir / "certificate.json", io::write_certificate(cert));
    io::write_text(out_dir / "policy.json", io::write_policy(synth.result.policy));
    io::write_text(out_dir / "values.csv", io::value_csv(prep.abstraction, synth.result.values));
    io::write_text(out_dir / "curve.csv", io::bound_curve_csv(prep.abstraction, synth.curve));
    io::write_text(out_dir / "traces.csv", io::trace_csv(mc.traces, cfg.labels.alphabet()));
    return 0;
  });
  out.monte_carlo = std::move(mc);
  return out;
}

}  // namespace rosyn
