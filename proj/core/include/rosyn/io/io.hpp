#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rosyn/abstraction/abstraction.hpp"
#include "rosyn/logic/dfa.hpp"
#include "rosyn/model/labelling.hpp"
#include "rosyn/model/linear_model.hpp"
#include "rosyn/refinement/refinement.hpp"
#include "rosyn/relation/relation.hpp"
#include "rosyn/synthesis/synthesis.hpp"

namespace rosyn::io {

inline constexpr int kSchemaVersion = 1;

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

// Every document carries "schema": 1 and "kind". Parsers throw Error on
// malformed input and on a schema or kind mismatch. Doubles are written with
// round-trip precision so parse(write(x)) == x.

std::string write_dfa(const logic::Dfa& dfa, const std::string& formula = {});
logic::Dfa parse_dfa(const std::string& text);

std::string write_model(const model::LinearGaussianModel& m);
model::LinearGaussianModel parse_model(const std::string& text);

std::string write_labelling(const model::LabellingMap& labels);
model::LabellingMap parse_labelling(const std::string& text);

std::string write_abstraction(const abstraction::FiniteAbstraction& abs);
abstraction::FiniteAbstraction parse_abstraction(const std::string& text);

std::string write_certificate(const relation::SimulationCertificate& cert);
relation::SimulationCertificate parse_certificate(const std::string& text);

std::string write_policy(const synthesis::RobustPolicy& policy);
synthesis::RobustPolicy parse_policy(const std::string& text);

/// CSV with columns state, x1..., location, value (one row per cell and
/// location; the sink is omitted).
std::string value_csv(const abstraction::FiniteAbstraction& abs, const synthesis::ValueTable& values);

/// CSV of the robust bound per cell: x1..., bound.
std::string bound_curve_csv(const abstraction::FiniteAbstraction& abs, const std::vector<double>& bound);

/// CSV with columns run, t, x2..., y2..., u2..., x1, u1, q, letter, fail_safe, verdict.
std::string trace_csv(const std::vector<refinement::Trace>& traces, const Alphabet& alphabet);

}  // namespace rosyn::io
