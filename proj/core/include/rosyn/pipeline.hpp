#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "rosyn/abstraction/abstraction.hpp"
#include "rosyn/error.hpp"
#include "rosyn/logic/dfa.hpp"
#include "rosyn/model/labelling.hpp"
#include "rosyn/model/linear_model.hpp"
#include "rosyn/refinement/refinement.hpp"
#include "rosyn/relation/relation.hpp"
#include "rosyn/synthesis/synthesis.hpp"

namespace rosyn {

/// Failure inside one pipeline stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct RunConfig {
  model::LinearGaussianModel model;
  model::LabellingMap labels;
  std::string formula;
  std::optional<logic::Dfa> dfa;  // takes precedence over formula
  /// Interface gain K (u2 = K x2 closes the loop); also used for reduction.
  Eigen::MatrixXd feedback;
  /// R = pinv(B2) P B1 instead of the identity.
  bool least_squares_R = false;
  Eigen::Index reduced_order = 1;
  bool output_coordinates = true;
  model::Box grid_box;
  std::vector<std::size_t> grid_counts;
  std::size_t inputs_per_axis = 1;
  double delta = 0.05;
  std::optional<double> eps_override;
  synthesis::Horizon horizon = synthesis::Horizon::unbounded();
  long runs = 1000;
  std::size_t sim_horizon = 100;
  std::uint64_t seed = 0;
  std::size_t keep_traces = 10;
  /// Reachability target for the bound command; defaults to the first labelled region.
  std::optional<model::Box> target;
};

/// K = -(I + B^T X B)^-1 B^T X A with X the stabilizing solution of the
/// discrete Riccati equation for unit state and input weights.
Eigen::MatrixXd riccati_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, int max_iterations = 100'000);

/// Config JSON ("kind": "config"). "model" and "labels" are either inline
/// documents or paths relative to base_dir.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});

/// Parses "lo:hi:count[,lo:hi:count...]".
void parse_grid_flag(const std::string& text, model::Box& box, std::vector<std::size_t>& counts);

struct Prepared {
  abstraction::FiniteAbstraction abstraction;  // reduced.P already refitted
  Eigen::MatrixXd Q;
  Eigen::MatrixXd R;
  double projection_residual = 0.0;
};

/// Reduction, projection fit, grid and kernel.
Prepared prepare_abstraction(const RunConfig& cfg);

relation::CertificateInputs certificate_inputs(const RunConfig& cfg, const Prepared& prep);

/// Weight search plus certification; the result may be infeasible.
relation::WeightSearchResult certify_stage(const RunConfig& cfg, const Prepared& prep);

logic::Dfa automaton(const RunConfig& cfg);

struct SynthesisOutcome {
  synthesis::ReachResult result;
  synthesis::ScltlProblem problem;
  double epsilon_used = 0.0;
  relation::InitialState initial;
  std::vector<double> curve;  // robust bound per cell
};

/// Robust scLTL synthesis with eps from the certificate or the override.
/// `dfa` and `prep` must outlive the returned problem.
SynthesisOutcome synthesis_stage(const RunConfig& cfg, const Prepared& prep, const logic::Dfa& dfa,
                                 const relation::SimulationCertificate& cert);

struct BoundOutcome {
  double lower = 0.0;
  double upper = 0.0;
  double epsilon = 0.0;
  std::size_t initial_cell = 0;
};

/// Reachability bounds for the target; finite horizons only.
BoundOutcome bound_stage(const RunConfig& cfg, const Prepared& prep, const relation::SimulationCertificate& cert);

struct PipelineOutcome {
  std::string report_json;
  double epsilon_certified = 0.0;
  double epsilon_used = 0.0;
  double bound = 0.0;
  refinement::MonteCarloResult monte_carlo;
};

/// reduce -> grid -> certify -> synthesize -> refine -> simulate, writing
/// report.json, timings.json, certificate.json, policy.json, dfa.json,
/// values.csv, curve.csv and traces.csv into out_dir. Throws StageError.
PipelineOutcome run_pipeline(const RunConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace rosyn
