#include <cmath>

#include "rosyn/error.hpp"
#include "rosyn/numeric.hpp"
#include "rosyn/random.hpp"
#include "rosyn/relation/relation.hpp"

namespace rosyn::relation {

double invariance_value(const SimulationCertificate& cert, const Eigen::VectorXd& x_bar, const Eigen::VectorXd& u1,
                        const Eigen::VectorXd& w, const Eigen::VectorXd& beta) {
  const Eigen::VectorXd e = cert.Abar * x_bar + cert.Bbar * u1 + cert.Bwbar * w - cert.P * beta;
  return e.dot(cert.M * e);
}

namespace {

Eigen::VectorXd unit_or(const Eigen::VectorXd& v, CounterRng& rng) {
  const double n = v.norm();
  if (n > 1e-300) return v / n;
  Eigen::VectorXd r(v.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) r(i) = rng.normal();
  return r / r.norm();
}

Eigen::VectorXd random_unit(Eigen::Index n, CounterRng& rng) {
  return unit_or(Eigen::VectorXd::Zero(n), rng);
}

}  // namespace

std::optional<Counterexample> falsify(const SimulationCertificate& cert, std::size_t samples, std::uint64_t seed) {
  const Eigen::Index n = cert.M.rows();
  const Eigen::Index m = cert.Bbar.cols();
  const Eigen::Index nw = cert.Bwbar.cols();
  const Eigen::Index ns = cert.P.cols();
  if (cert.diameter.size() != ns) throw DimensionError("falsify: diameter size");
  const Eigen::MatrixXd Mh = spd_sqrt(cert.M);
  const Eigen::MatrixXd Mhi = spd_inv_sqrt(cert.M);
  const Eigen::MatrixXd Ga = Mh * cert.Abar * Mhi;
  const Eigen::MatrixXd Gu = Mh * cert.Bbar;
  const Eigen::MatrixXd Gw = Mh * cert.Bwbar;
  const Eigen::MatrixXd Gb = Mh * cert.P;
  const double ru = std::sqrt(cert.c_u);
  const double rw = std::sqrt(cert.c_w);
  const double bound = cert.epsilon * cert.epsilon;
  const double tol = bound * 1e-9 + 1e-12;

  CounterRng rng(seed, 0);
  for (std::size_t s = 0; s < samples; ++s) {
    // y is M^1/2 x_bar on the sphere of radius eps.
    Eigen::VectorXd y = cert.epsilon * random_unit(n, rng);
    Eigen::VectorXd u1 = ru * random_unit(m, rng);
    Eigen::VectorXd w = rw * random_unit(nw, rng);
    Eigen::VectorXd beta(ns);
    for (Eigen::Index i = 0; i < ns; ++i) beta(i) = rng.uniform() < 0.5 ? -cert.diameter(i) : cert.diameter(i);
    if (s % 2 == 1) {
      // Align every term with the current image direction.
      for (int it = 0; it < 20; ++it) {
        const Eigen::VectorXd v = Ga * y + Gu * u1 + Gw * w - Gb * beta;
        const Eigen::VectorXd d = unit_or(v, rng);
        y = cert.epsilon * unit_or(Ga.transpose() * d, rng);
        if (m > 0) u1 = ru * unit_or(Gu.transpose() * d, rng);
        if (nw > 0) w = rw * unit_or(Gw.transpose() * d, rng);
        const Eigen::VectorXd gb = Gb.transpose() * d;
        for (Eigen::Index i = 0; i < ns; ++i) beta(i) = gb(i) > 0.0 ? -cert.diameter(i) : cert.diameter(i);
      }
    }
    const Eigen::VectorXd x_bar = Mhi * y;
    const double value = invariance_value(cert, x_bar, u1, w, beta);
    if (value > bound + tol) return Counterexample{x_bar, u1, w, beta, value, bound};
  }
  return std::nullopt;
}

InitialState initial_abstract_state(const SimulationCertificate& cert, const abstraction::GridPartition& grid,
                                    const Eigen::VectorXd& x20) {
  if (x20.size() != cert.P.rows()) throw DimensionError("initial_abstract_state: x20 dimension");
  if (static_cast<Eigen::Index>(grid.dim()) != cert.P.cols()) {
    throw DimensionError("initial_abstract_state: grid dimension");
  }
  const Eigen::MatrixXd G = cert.P.transpose() * cert.M * cert.P;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      ldlt.vectorD().minCoeff() <= 1e-14 * std::max(1.0, ldlt.vectorD().maxCoeff())) {
    throw NumericError("initial_abstract_state: P^T M P is singular");
  }
  InitialState out;
  out.unsnapped = ldlt.solve(cert.P.transpose() * cert.M * x20);
  out.cell = grid.locate(out.unsnapped);
  if (!out.cell) throw Error("initial_abstract_state: projected initial state lies outside the grid");
  const Eigen::VectorXd z = grid.center(*out.cell);
  const Eigen::VectorXd e = x20 - cert.P * z;
  out.residual = e.dot(cert.M * e);
  out.feasible = out.residual <= cert.epsilon * cert.epsilon * (1.0 + 1e-9) + 1e-12;
  return out;
}

}  // namespace rosyn::relation
