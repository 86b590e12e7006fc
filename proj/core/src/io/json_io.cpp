#include <fstream>
#include <json.hpp>
#include <sstream>

#include "rosyn/error.hpp"
#include "rosyn/io/io.hpp"

namespace rosyn::io {

using nlohmann::json;

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

namespace {

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

// An empty row list is a 0 x cols matrix; "cols" disambiguates when present.
Eigen::MatrixXd matrix_from(const json& j, const char* what) {
  if (!j.is_array()) throw Error(std::string("expected a matrix for ") + what);
  const auto rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows == 0 ? 0 : static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw Error(std::string("ragged matrix for ") + what);
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

Eigen::VectorXd vector_from(const json& j, const char* what) {
  if (!j.is_array()) throw Error(std::string("expected a vector for ") + what);
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

json header(const char* kind) { return json{{"schema", kSchemaVersion}, {"kind", kind}}; }

json parse_doc(const std::string& text, const char* kind) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("invalid JSON for ") + kind + ": " + e.what());
  }
  if (!j.is_object()) throw Error(std::string(kind) + ": expected an object");
  if (j.value("schema", -1) != kSchemaVersion) throw Error(std::string(kind) + ": unsupported schema version");
  if (j.contains("kind") && j["kind"] != kind) {
    throw Error(std::string("expected a ") + kind + " document, got " + j["kind"].dump());
  }
  return j;
}

template <class F>
auto guarded(const char* kind, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(std::string(kind) + ": " + e.what());
  }
}

json letter_json(const Alphabet& a, Letter l) { return a.names(l); }
Letter letter_from(const Alphabet& a, const json& j) { return a.letter(j.get<std::vector<std::string>>()); }

json box_json(const model::Box& b) { return json{{"lo", vector_json(b.lo)}, {"hi", vector_json(b.hi)}}; }
model::Box box_from(const json& j) { return model::Box{vector_from(j.at("lo"), "lo"), vector_from(j.at("hi"), "hi")}; }

json horizon_json(const synthesis::Horizon& h) {
  return h.is_finite() ? json(h.steps()) : json("unbounded");
}
synthesis::Horizon horizon_from(const json& j) {
  if (j.is_string() && j.get<std::string>() == "unbounded") return synthesis::Horizon::unbounded();
  return synthesis::Horizon::finite(j.get<int>());
}

}  // namespace

std::string write_dfa(const logic::Dfa& dfa, const std::string& formula) {
  json j = header("dfa");
  if (!formula.empty()) j["formula"] = formula;
  const auto& ab = dfa.alphabet();
  j["atoms"] = ab.atoms();
  j["locations"] = dfa.num_locations();
  j["initial"] = dfa.initial();
  json acc = json::array();
  for (std::size_t q = 0; q < dfa.num_locations(); ++q) {
    if (dfa.is_accepting(static_cast<logic::Location>(q))) acc.push_back(q);
  }
  j["accepting"] = acc;
  json tr = json::array();
  for (std::size_t q = 0; q < dfa.num_locations(); ++q) {
    for (std::size_t a = 0; a < dfa.num_letters(); ++a) {
      const auto letter = static_cast<Letter>(a);
      tr.push_back(json::array({q, letter_json(ab, letter), dfa.step_unchecked(static_cast<logic::Location>(q), letter)}));
    }
  }
  j["transitions"] = tr;
  return j.dump() + "\n";
}

logic::Dfa parse_dfa(const std::string& text) {
  const json j = parse_doc(text, "dfa");
  return guarded("dfa", [&] {
    Alphabet alphabet(j.at("atoms").get<std::vector<std::string>>());
    const auto n = j.at("locations").get<std::size_t>();
    std::vector<bool> accepting(n, false);
    for (const auto& q : j.at("accepting")) {
      const auto idx = q.get<std::size_t>();
      if (idx >= n) throw Error("dfa: accepting location out of range");
      accepting[idx] = true;
    }
    constexpr auto unset = static_cast<logic::Location>(-1);
    std::vector<logic::Location> table(n * alphabet.num_letters(), unset);
    for (const auto& t : j.at("transitions")) {
      const auto q = t.at(0).get<std::size_t>();
      const Letter a = letter_from(alphabet, t.at(1));
      if (q >= n) throw Error("dfa: transition source out of range");
      auto& slot = table[q * alphabet.num_letters() + a];
      if (slot != unset) throw Error("dfa: duplicate transition");
      slot = t.at(2).get<logic::Location>();
    }
    // Accepting locations are absorbing, so their rows may be omitted.
    for (std::size_t q = 0; q < n; ++q) {
      if (!accepting[q]) continue;
      for (std::size_t a = 0; a < alphabet.num_letters(); ++a) {
        auto& slot = table[q * alphabet.num_letters() + a];
        if (slot == unset) slot = static_cast<logic::Location>(q);
      }
    }
    return logic::Dfa(std::move(alphabet), n, j.at("initial").get<logic::Location>(), std::move(accepting),
                      std::move(table));
  });
}

std::string write_model(const model::LinearGaussianModel& m) {
  json j = header("model");
  j["A"] = matrix_json(m.A);
  j["B"] = matrix_json(m.B);
  j["Bw"] = matrix_json(m.Bw);
  j["C"] = matrix_json(m.C);
  j["input_bound"] = m.input_bound;
  j["x0"] = vector_json(m.x0);
  return j.dump(2) + "\n";
}

model::LinearGaussianModel parse_model(const std::string& text) {
  const json j = parse_doc(text, "model");
  return guarded("model", [&] {
    model::LinearGaussianModel m;
    m.A = matrix_from(j.at("A"), "A");
    m.B = matrix_from(j.at("B"), "B");
    m.Bw = matrix_from(j.at("Bw"), "Bw");
    m.C = matrix_from(j.at("C"), "C");
    m.input_bound = j.value("input_bound", 0.0);
    m.x0 = j.contains("x0") ? vector_from(j["x0"], "x0") : Eigen::VectorXd::Zero(m.A.rows());
    m.validate();
    return m;
  });
}

std::string write_labelling(const model::LabellingMap& labels) {
  json j = header("labelling");
  const auto& a = labels.alphabet();
  j["atoms"] = a.atoms();
  j["output_dim"] = labels.output_dim();
  j["default"] = letter_json(a, labels.default_letter());
  json regions = json::array();
  for (const auto& r : labels.regions()) {
    json e = box_json(r.box);
    e["label"] = letter_json(a, r.letter);
    regions.push_back(std::move(e));
  }
  j["regions"] = regions;
  return j.dump(2) + "\n";
}

model::LabellingMap parse_labelling(const std::string& text) {
  const json j = parse_doc(text, "labelling");
  return guarded("labelling", [&] {
    Alphabet a(j.at("atoms").get<std::vector<std::string>>());
    std::vector<model::LabelledRegion> regions;
    for (const auto& e : j.at("regions")) regions.push_back({box_from(e), letter_from(a, e.at("label"))});
    const Letter def = j.contains("default") ? letter_from(a, j["default"]) : Letter{0};
    const auto dim = j.at("output_dim").get<Eigen::Index>();
    return model::LabellingMap(std::move(a), dim, std::move(regions), def);
  });
}

std::string write_abstraction(const abstraction::FiniteAbstraction& abs) {
  json j = header("abstraction");
  const auto& r = abs.reduced;
  j["reduced"] = {{"A1", matrix_json(r.A1)}, {"B1", matrix_json(r.B1)},   {"Bw1", matrix_json(r.Bw1)},
                  {"C1", matrix_json(r.C1)}, {"P", matrix_json(r.P)},     {"hsv", vector_json(r.hankel_singular_values)},
                  {"B1_cols", r.B1.cols()},  {"Bw1_cols", r.Bw1.cols()}};
  j["grid"] = box_json(abs.grid.box());
  j["grid"]["counts"] = abs.grid.counts();
  json inputs = json::array();
  for (const auto& u : abs.inputs) inputs.push_back(vector_json(u));
  j["inputs"] = inputs;
  j["input_dim"] = abs.inputs.empty() ? 0 : abs.inputs.front().size();
  json rows = json::array();
  for (std::size_t s = 0; s < abs.kernel.num_states(); ++s) {
    for (std::size_t u = 0; u < abs.kernel.num_inputs(); ++u) {
      json row = json::array();
      for (const auto& e : abs.kernel.row(s, u)) row.push_back(json::array({e.target, e.probability}));
      rows.push_back(std::move(row));
    }
  }
  j["kernel"] = {{"num_states", abs.kernel.num_states()}, {"num_inputs", abs.kernel.num_inputs()}, {"rows", rows}};
  return j.dump() + "\n";
}

abstraction::FiniteAbstraction parse_abstraction(const std::string& text) {
  const json j = parse_doc(text, "abstraction");
  return guarded("abstraction", [&] {
    abstraction::FiniteAbstraction abs;
    const auto& r = j.at("reduced");
    abs.reduced.A1 = matrix_from(r.at("A1"), "A1");
    abs.reduced.B1 = matrix_from(r.at("B1"), "B1");
    abs.reduced.Bw1 = matrix_from(r.at("Bw1"), "Bw1");
    abs.reduced.C1 = matrix_from(r.at("C1"), "C1");
    abs.reduced.P = matrix_from(r.at("P"), "P");
    abs.reduced.hankel_singular_values = vector_from(r.at("hsv"), "hsv");
    if (abs.reduced.B1.rows() == 0) abs.reduced.B1.resize(abs.reduced.A1.rows(), r.at("B1_cols").get<Eigen::Index>());
    abs.grid = abstraction::GridPartition(box_from(j.at("grid")), j.at("grid").at("counts").get<std::vector<std::size_t>>());
    const auto input_dim = j.at("input_dim").get<Eigen::Index>();
    for (const auto& u : j.at("inputs")) {
      Eigen::VectorXd v = vector_from(u, "input");
      if (v.size() != input_dim) throw Error("abstraction: input dimension");
      abs.inputs.push_back(std::move(v));
    }
    const auto& k = j.at("kernel");
    abs.kernel = abstraction::Kernel(k.at("num_states").get<std::size_t>(), k.at("num_inputs").get<std::size_t>());
    std::vector<abstraction::Kernel::Entry> entries;
    for (const auto& row : k.at("rows")) {
      entries.clear();
      for (const auto& e : row) entries.push_back({e.at(0).get<std::uint32_t>(), e.at(1).get<double>()});
      abs.kernel.append_row(entries);
    }
    if (!abs.kernel.complete()) throw Error("abstraction: kernel rows missing");
    if (abs.kernel.num_states() != abs.num_states() || abs.kernel.num_inputs() != abs.inputs.size()) {
      throw Error("abstraction: kernel shape differs from grid and inputs");
    }
    return abs;
  });
}

std::string write_certificate(const relation::SimulationCertificate& c) {
  json j = header("certificate");
  j["epsilon"] = c.epsilon;
  j["delta"] = c.delta;
  j["P"] = matrix_json(c.P);
  j["Q"] = matrix_json(c.Q);
  j["R"] = matrix_json(c.R);
  j["K"] = matrix_json(c.K);
  j["M"] = matrix_json(c.M);
  j["c_w"] = c.c_w;
  j["c_u"] = c.c_u;
  j["diameter"] = vector_json(c.diameter);
  j["Abar"] = matrix_json(c.Abar);
  j["Bbar"] = matrix_json(c.Bbar);
  j["Bwbar"] = matrix_json(c.Bwbar);
  j["lambda"] = c.lambda;
  j["gamma_u"] = c.gamma_u;
  j["gamma_w"] = c.gamma_w;
  j["gamma_beta"] = c.gamma_beta;
  return j.dump(2) + "\n";
}

relation::SimulationCertificate parse_certificate(const std::string& text) {
  const json j = parse_doc(text, "certificate");
  return guarded("certificate", [&] {
    relation::SimulationCertificate c;
    c.epsilon = j.at("epsilon").get<double>();
    c.delta = j.at("delta").get<double>();
    c.P = matrix_from(j.at("P"), "P");
    c.Q = matrix_from(j.at("Q"), "Q");
    c.R = matrix_from(j.at("R"), "R");
    c.K = matrix_from(j.at("K"), "K");
    c.M = matrix_from(j.at("M"), "M");
    c.c_w = j.at("c_w").get<double>();
    c.c_u = j.at("c_u").get<double>();
    c.diameter = vector_from(j.at("diameter"), "diameter");
    c.Abar = matrix_from(j.at("Abar"), "Abar");
    c.Bbar = matrix_from(j.at("Bbar"), "Bbar");
    c.Bwbar = matrix_from(j.at("Bwbar"), "Bwbar");
    c.lambda = j.at("lambda").get<double>();
    c.gamma_u = j.at("gamma_u").get<double>();
    c.gamma_w = j.at("gamma_w").get<double>();
    c.gamma_beta = j.at("gamma_beta").get<double>();
    return c;
  });
}

std::string write_policy(const synthesis::RobustPolicy& p) {
  json j = header("policy");
  j["num_states"] = p.num_states;
  j["num_locations"] = p.num_locations;
  j["num_inputs"] = p.num_inputs;
  j["horizon"] = horizon_json(p.horizon);
  j["epsilon"] = p.epsilon;
  j["delta"] = p.delta;
  j["bound"] = p.bound;
  j["tables"] = p.tables;
  return j.dump() + "\n";
}

synthesis::RobustPolicy parse_policy(const std::string& text) {
  const json j = parse_doc(text, "policy");
  return guarded("policy", [&] {
    synthesis::RobustPolicy p;
    p.num_states = j.at("num_states").get<std::size_t>();
    p.num_locations = j.at("num_locations").get<std::size_t>();
    p.num_inputs = j.at("num_inputs").get<std::size_t>();
    p.horizon = horizon_from(j.at("horizon"));
    p.epsilon = j.at("epsilon").get<double>();
    p.delta = j.at("delta").get<double>();
    p.bound = j.at("bound").get<double>();
    p.tables = j.at("tables").get<std::vector<std::vector<std::uint32_t>>>();
    for (const auto& t : p.tables) {
      if (t.size() != p.num_states * p.num_locations) throw Error("policy: table size");
      for (auto u : t) {
        if (u >= p.num_inputs) throw Error("policy: input index out of range");
      }
    }
    return p;
  });
}

}  // namespace rosyn::io
