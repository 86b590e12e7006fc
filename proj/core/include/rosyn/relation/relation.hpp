#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rosyn/abstraction/grid.hpp"
#include "rosyn/abstraction/reduction.hpp"
#include "rosyn/model/linear_model.hpp"

namespace rosyn::relation {

struct InterfaceSolution {
  Eigen::MatrixXd Q;
  /// ||B2 Q - (P A1 - A2 P)||_F relative to max(||P A1||_F, ||A2 P||_F, 1).
  double residual = 0.0;
};

/// Least-squares Q with B2 Q = P A1 - A2 P. Throws NumericError when B2 is
/// rank deficient and the residual is nonzero.
InterfaceSolution solve_interface(const Eigen::MatrixXd& A1, const Eigen::MatrixXd& A2, const Eigen::MatrixXd& B2,
                                  const Eigen::MatrixXd& P);

struct ProjectionFit {
  Eigen::MatrixXd P;
  Eigen::MatrixXd Q;
  double residual = 0.0;
};

/// Re-solves the projection so that P A1 = A2 P + B2 Q and C2 P = C1 hold
/// jointly for the given reduced (A1, C1). Among all solutions, returns the
/// one closest to `P_guess` in Frobenius norm.
ProjectionFit fit_projection(const Eigen::MatrixXd& A1, const Eigen::MatrixXd& C1, const Eigen::MatrixXd& A2,
                             const Eigen::MatrixXd& B2, const Eigen::MatrixXd& C2, const Eigen::MatrixXd& P_guess);

/// Weight M solving (Abar/rate)^T M (Abar/rate) - M + C2^T C2 + eta I = 0.
/// rate = 1 is the plain Lyapunov weight; rate in (rho(Abar), 1) trades a
/// larger M for a faster contraction ||M^1/2 Abar M^-1/2|| <= rate.
Eigen::MatrixXd default_weight(const Eigen::MatrixXd& Abar, const Eigen::MatrixXd& C2, double eta = 1e-6,
                               double rate = 1.0);

/// Smallest c with P(chi2_d <= c) >= 1 - delta, by bisection (tolerance 1e-10).
double chi2_bound(int noise_dim, double delta);

/// Everything certify needs besides delta.
struct CertificateInputs {
  model::LinearGaussianModel concrete;
  abstraction::ReducedModel reduced;  // A1, B1, Bw1, C1 and P
  Eigen::MatrixXd Q;
  Eigen::MatrixXd R;
  Eigen::MatrixXd K;
  Eigen::MatrixXd M;
  double input_bound = 0.0;
  Eigen::VectorXd diameter;
};

/// Witness for an (eps, delta) simulation relation
/// (x1, x2) in R  iff  (x2 - P x1)^T M (x2 - P x1) <= eps^2
/// under the interface u2 = R u1 + Q x1 + K (x2 - P x1).
struct SimulationCertificate {
  double epsilon = 0.0;
  double delta = 0.0;
  Eigen::MatrixXd P, Q, R, K, M;
  double c_w = 0.0;
  double c_u = 0.0;
  Eigen::VectorXd diameter;
  Eigen::MatrixXd Abar, Bbar, Bwbar;
  double lambda = 0.0;
  double gamma_u = 0.0;
  double gamma_w = 0.0;
  double gamma_beta = 0.0;
};

struct Diagnostics {
  double lambda = 0.0;
  double gamma_u = 0.0;
  double gamma_w = 0.0;
  double gamma_beta = 0.0;
  double interface_residual = 0.0;
  double output_residual = 0.0;
  double weight_margin = 0.0;  // min eig(M - C2^T C2)
};

struct CertifyResult {
  std::optional<SimulationCertificate> certificate;
  Diagnostics diagnostics;
  std::string reason;  // why certification failed; empty on success
  bool feasible() const { return certificate.has_value(); }
};

/// Smallest eps satisfying lambda eps + gamma_u + gamma_w + gamma_beta <= eps,
/// which implies the invariance condition for every x_bar in the eps-ellipsoid,
/// ||u1||^2 <= c_u, w^T w <= c_w and |beta| <= diameter. Infeasible when
/// lambda >= 1 or a structural identity fails.
CertifyResult certify(const CertificateInputs& in, double delta);

/// certify over a list of deltas (the eps/delta trade-off curve).
std::vector<CertifyResult> certify_sweep(const CertificateInputs& in, const std::vector<double>& deltas);

struct WeightSearchResult {
  Eigen::MatrixXd M;
  double rate = 1.0;
  double eta = 1e-6;
  CertifyResult result;
};

/// Searches the (rate, eta) family of default_weight for the smallest
/// certified eps. `in.M` is ignored.
WeightSearchResult optimize_weight(const CertificateInputs& in, double delta);

struct Counterexample {
  Eigen::VectorXd x_bar, u1, w, beta;
  double value = 0.0;  // quadratic form
  double bound = 0.0;  // eps^2
};

/// Samples boundary points of the admissible sets (random and adversarially
/// aligned) and returns the first violation of the invariance inequality.
std::optional<Counterexample> falsify(const SimulationCertificate& cert, std::size_t samples, std::uint64_t seed);

/// Value of the invariance quadratic form for one sample.
double invariance_value(const SimulationCertificate& cert, const Eigen::VectorXd& x_bar, const Eigen::VectorXd& u1,
                        const Eigen::VectorXd& w, const Eigen::VectorXd& beta);

struct InitialState {
  Eigen::VectorXd unsnapped;       // P_hat x20
  std::optional<std::size_t> cell;  // grid cell of the snapped point
  double residual = 0.0;           // (x20 - P z)^T M (x20 - P z)
  bool feasible = false;           // residual <= eps^2
};

/// x10 = Pi(P_hat x20) with P_hat = (P^T M P)^-1 P^T M. Throws NumericError
/// when P^T M P is singular and Error when the point falls outside the grid.
InitialState initial_abstract_state(const SimulationCertificate& cert, const abstraction::GridPartition& grid,
                                    const Eigen::VectorXd& x20);

}  // namespace rosyn::relation
