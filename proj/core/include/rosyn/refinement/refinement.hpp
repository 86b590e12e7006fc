#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "rosyn/abstraction/abstraction.hpp"
#include "rosyn/logic/dfa.hpp"
#include "rosyn/model/labelling.hpp"
#include "rosyn/model/linear_model.hpp"
#include "rosyn/numeric.hpp"
#include "rosyn/relation/relation.hpp"
#include "rosyn/synthesis/synthesis.hpp"

namespace rosyn::refinement {

/// Everything a refined controller reads. Must outlive the controllers built on it.
struct ClosedLoop {
  model::LinearGaussianModel concrete;
  abstraction::FiniteAbstraction abstraction;
  relation::SimulationCertificate certificate;
  synthesis::RobustPolicy policy;
  logic::Dfa dfa;
  model::LabellingMap labels;
};

/// Letter of the concrete output C2 x2.
Letter concrete_letter(const ClosedLoop& loop, const Eigen::VectorXd& x2);

/// Control strategy with internal state (abstract cell, DFA location, time).
/// The abstract state moves by reconstructing the noise from consecutive
/// measurements; the DFA reads concrete labels.
class RefinedController {
 public:
  /// Initializes x1 = Pi(P_hat x20), q = t(q0, L(C2 x20)), k = 0. Throws Error
  /// when Bw2 lacks full column rank or (with require_relation) the initial
  /// pair is outside the relation.
  RefinedController(const ClosedLoop& loop, const Eigen::VectorXd& x20, bool require_relation = true);

  /// u2 = R u1 + Q z + K (x2 - P z) with u1 from the policy at (x1, q, k);
  /// u2 = K x2 once the abstract state is in the sink.
  Eigen::VectorXd control(const Eigen::VectorXd& x2);

  /// Advances (x1, q, k) after the plant moved from x2_prev under u2 to
  /// x2_next. Throws NumericError when the reconstruction residual exceeds 1e-8.
  void observe(const Eigen::VectorXd& x2_prev, const Eigen::VectorXd& u2, const Eigen::VectorXd& x2_next);

  /// w = pinv(Bw2) (x2_next - A2 x2_prev - B2 u2).
  Eigen::VectorXd reconstruct_noise(const Eigen::VectorXd& x2_prev, const Eigen::VectorXd& u2,
                                    const Eigen::VectorXd& x2_next) const;

  std::size_t cell() const noexcept { return cell_; }
  logic::Location location() const noexcept { return q_; }
  std::size_t time() const noexcept { return k_; }
  bool in_sink() const noexcept { return cell_ == loop_->abstraction.sink(); }
  bool fail_safe() const noexcept { return fail_safe_; }
  std::uint32_t last_input() const noexcept { return u1_; }
  bool accepted() const { return loop_->dfa.is_accepting(q_); }

  /// (x2 - P z)^T M (x2 - P z) for the current cell; +inf in the sink.
  double relation_value(const Eigen::VectorXd& x2) const;

 private:
  const ClosedLoop* loop_;
  Eigen::MatrixXd Bw2_pinv_;
  std::size_t cell_ = 0;
  logic::Location q_ = 0;
  std::size_t k_ = 0;
  std::uint32_t u1_ = 0;
  bool fail_safe_ = false;
};

enum class Verdict { Accepted, HorizonExhausted, RelationLost };

const char* to_string(Verdict v);

struct TraceStep {
  std::size_t t = 0;
  Eigen::VectorXd x2, y2, u2;
  std::size_t x1 = 0;
  std::uint32_t u1 = 0;
  logic::Location q = 0;
  Letter letter = 0;
  bool fail_safe = false;
};

struct Trace {
  std::vector<TraceStep> steps;
  Verdict verdict = Verdict::HorizonExhausted;
};

struct MonteCarloOptions {
  long runs = 1000;
  std::size_t horizon = 100;
  std::uint64_t seed = 0;
  std::size_t keep_traces = 0;
};

struct MonteCarloResult {
  long runs = 0;
  long successes = 0;
  double probability = 0.0;
  WilsonInterval interval;
  long fail_safe_runs = 0;
  /// Steps that started inside the relation, and how many of them left it.
  long relation_steps = 0;
  long relation_exits = 0;
  std::vector<Trace> traces;
};

/// Simulates the closed loop; run i draws its noise from CounterRng(seed, i).
/// A run succeeds when the DFA (on concrete labels) reaches F within the
/// horizon. Deterministic for a fixed seed.
MonteCarloResult monte_carlo(const ClosedLoop& loop, const MonteCarloOptions& options);

/// Exact satisfaction probability of a fixed policy on a finite MDP whose
/// state s carries letter labels[s], started at `initial`. Unbounded horizons
/// run the forward recursion until the undecided mass stops changing (1e-14)
/// or max_steps. Throws ResourceError above max_product (|X| |Q|).
double exact_eval_finite(const abstraction::Kernel& kernel, const synthesis::RobustPolicy& policy,
                         const logic::Dfa& dfa, const std::vector<Letter>& labels, std::size_t initial,
                         synthesis::Horizon horizon, std::size_t max_steps = 100'000,
                         std::size_t max_product = 50'000'000);

}  // namespace rosyn::refinement
