#include <algorithm>
#include <cmath>

#include "rosyn/abstraction/lyapunov.hpp"
#include "rosyn/error.hpp"
#include "rosyn/numeric.hpp"
#include "rosyn/relation/relation.hpp"

namespace rosyn::relation {

InterfaceSolution solve_interface(const Eigen::MatrixXd& A1, const Eigen::MatrixXd& A2, const Eigen::MatrixXd& B2,
                                  const Eigen::MatrixXd& P) {
  if (A2.rows() != A2.cols() || A1.rows() != A1.cols() || P.rows() != A2.rows() || P.cols() != A1.rows() ||
      B2.rows() != A2.rows()) {
    throw DimensionError("solve_interface: inconsistent dimensions");
  }
  const Eigen::MatrixXd rhs = P * A1 - A2 * P;
  const auto cod = B2.completeOrthogonalDecomposition();
  InterfaceSolution sol;
  sol.Q = cod.solve(rhs);
  const double scale = std::max({(P * A1).norm(), (A2 * P).norm(), 1.0});
  sol.residual = (B2 * sol.Q - rhs).norm() / scale;
  if (cod.rank() < B2.cols() && sol.residual > 1e-8) {
    throw NumericError("solve_interface: B2 is rank deficient and P A1 - A2 P is not in its range");
  }
  return sol;
}

ProjectionFit fit_projection(const Eigen::MatrixXd& A1, const Eigen::MatrixXd& C1, const Eigen::MatrixXd& A2,
                             const Eigen::MatrixXd& B2, const Eigen::MatrixXd& C2, const Eigen::MatrixXd& P_guess) {
  const Eigen::Index n = A2.rows();
  const Eigen::Index ns = A1.rows();
  const Eigen::Index m = B2.cols();
  const Eigen::Index p = C2.rows();
  if (C1.rows() != p || C1.cols() != ns || P_guess.rows() != n || P_guess.cols() != ns || B2.rows() != n ||
      C2.cols() != n) {
    throw DimensionError("fit_projection: inconsistent dimensions");
  }
  // Unknowns: column-major vec(P) (n*ns entries) followed by vec(Q) (m*ns).
  const Eigen::Index np = n * ns;
  const Eigen::Index nq = m * ns;
  Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(np + p * ns, np + nq);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(np + p * ns);
  auto pidx = [&](Eigen::Index r, Eigen::Index c) { return c * n + r; };
  auto qidx = [&](Eigen::Index r, Eigen::Index c) { return np + c * m + r; };
  // Row (i, j) of P A1 - A2 P - B2 Q = 0.
  for (Eigen::Index j = 0; j < ns; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index row = j * n + i;
      for (Eigen::Index k = 0; k < ns; ++k) sys(row, pidx(i, k)) += A1(k, j);
      for (Eigen::Index k = 0; k < n; ++k) sys(row, pidx(k, j)) -= A2(i, k);
      for (Eigen::Index k = 0; k < m; ++k) sys(row, qidx(k, j)) -= B2(i, k);
    }
  }
  // Row (i, j) of C2 P = C1.
  for (Eigen::Index j = 0; j < ns; ++j) {
    for (Eigen::Index i = 0; i < p; ++i) {
      const Eigen::Index row = np + j * p + i;
      for (Eigen::Index k = 0; k < n; ++k) sys(row, pidx(k, j)) = C2(i, k);
      rhs(row) = C1(i, j);
    }
  }
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(np + nq);
  for (Eigen::Index j = 0; j < ns; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) x0(pidx(i, j)) = P_guess(i, j);
  }
  const Eigen::VectorXd x = x0 + pseudo_inverse(sys) * (rhs - sys * x0);

  ProjectionFit fit;
  fit.P.resize(n, ns);
  fit.Q.resize(m, ns);
  for (Eigen::Index j = 0; j < ns; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) fit.P(i, j) = x(pidx(i, j));
    for (Eigen::Index i = 0; i < m; ++i) fit.Q(i, j) = x(qidx(i, j));
  }
  fit.residual = (sys * x - rhs).norm() / std::max(rhs.norm(), 1.0);
  return fit;
}

Eigen::MatrixXd default_weight(const Eigen::MatrixXd& Abar, const Eigen::MatrixXd& C2, double eta, double rate) {
  if (Abar.rows() != Abar.cols() || C2.cols() != Abar.rows()) throw DimensionError("default_weight: dimensions");
  if (!(rate > 0.0 && rate <= 1.0)) throw Error("default_weight: rate must lie in (0, 1]");
  if (eta < 0.0) throw Error("default_weight: eta must be non-negative");
  const Eigen::Index n = Abar.rows();
  const Eigen::MatrixXd S = C2.transpose() * C2 + eta * Eigen::MatrixXd::Identity(n, n);
  // (Abar/rate)^T M (Abar/rate) - M + S = 0 is the Lyapunov equation of (Abar/rate)^T.
  return abstraction::solve_discrete_lyapunov(Abar.transpose() / rate, S);
}

double chi2_bound(int noise_dim, double delta) {
  if (noise_dim < 1) throw Error("chi2_bound: noise dimension must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw Error("chi2_bound: delta must lie in (0, 1)");
  const double target = 1.0 - delta;
  double lo = 0.0;
  double hi = std::max(1.0, static_cast<double>(noise_dim));
  while (chi_square_cdf(noise_dim, hi) < target) hi *= 2.0;
  while (hi - lo > 1e-13 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (chi_square_cdf(noise_dim, mid) >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace rosyn::relation
