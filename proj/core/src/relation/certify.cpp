#include <algorithm>
#include <cmath>
#include <limits>

#include "rosyn/error.hpp"
#include "rosyn/numeric.hpp"
#include "rosyn/relation/relation.hpp"

namespace rosyn::relation {

namespace {

double relative_gap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / std::max({a.norm(), b.norm(), 1.0});
}

}  // namespace

CertifyResult certify(const CertificateInputs& in, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw Error("certify: delta must lie in (0, 1)");
  const auto& c = in.concrete;
  const auto& r = in.reduced;
  c.validate();
  const Eigen::Index n = c.state_dim();
  const Eigen::Index ns = r.A1.rows();
  if (r.P.rows() != n || r.P.cols() != ns || in.M.rows() != n || in.M.cols() != n || in.K.rows() != c.input_dim() ||
      in.K.cols() != n || in.Q.rows() != c.input_dim() || in.Q.cols() != ns || in.R.rows() != c.input_dim() ||
      in.R.cols() != r.B1.cols() || r.Bw1.cols() != c.noise_dim() || in.diameter.size() != ns) {
    throw DimensionError("certify: inconsistent certificate inputs");
  }

  CertifyResult out;
  auto& diag = out.diagnostics;
  diag.interface_residual = relative_gap(r.P * r.A1, c.A * r.P + c.B * in.Q);
  diag.output_residual = relative_gap(r.C1, c.C * r.P);
  const Eigen::MatrixXd gap = in.M - c.C.transpose() * c.C;
  diag.weight_margin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(0.5 * (gap + gap.transpose())).eigenvalues()(0);

  const Eigen::MatrixXd Abar = c.A + c.B * in.K;
  const Eigen::MatrixXd Bbar = c.B * in.R - r.P * r.B1;
  const Eigen::MatrixXd Bwbar = c.Bw - r.P * r.Bw1;
  const double c_w = chi2_bound(static_cast<int>(c.noise_dim()), delta);

  const Eigen::MatrixXd Mh = spd_sqrt(in.M);
  const Eigen::MatrixXd Mhi = spd_inv_sqrt(in.M);
  diag.lambda = operator_norm(Mh * Abar * Mhi);
  diag.gamma_u = operator_norm(Mh * Bbar) * std::sqrt(in.input_bound);
  diag.gamma_w = operator_norm(Mh * Bwbar) * std::sqrt(c_w);
  diag.gamma_beta = operator_norm(Mh * r.P) * in.diameter.norm();

  if (diag.interface_residual > 1e-8) {
    out.reason = "P A1 = A2 P + B2 Q violated (relative residual " + std::to_string(diag.interface_residual) + ")";
    return out;
  }
  if (diag.output_residual > 1e-8) {
    out.reason = "C1 = C2 P violated (relative residual " + std::to_string(diag.output_residual) + ")";
    return out;
  }
  if (diag.weight_margin < -1e-10) {
    out.reason = "C2^T C2 <= M violated (min eigenvalue " + std::to_string(diag.weight_margin) + ")";
    return out;
  }
  if (diag.lambda >= 1.0) {
    out.reason = "error dynamics not contractive in the M-norm (lambda = " + std::to_string(diag.lambda) + " >= 1)";
    return out;
  }

  SimulationCertificate cert;
  cert.delta = delta;
  cert.epsilon = (diag.gamma_u + diag.gamma_w + diag.gamma_beta) / (1.0 - diag.lambda);
  cert.P = r.P;
  cert.Q = in.Q;
  cert.R = in.R;
  cert.K = in.K;
  cert.M = in.M;
  cert.c_w = c_w;
  cert.c_u = in.input_bound;
  cert.diameter = in.diameter;
  cert.Abar = Abar;
  cert.Bbar = Bbar;
  cert.Bwbar = Bwbar;
  cert.lambda = diag.lambda;
  cert.gamma_u = diag.gamma_u;
  cert.gamma_w = diag.gamma_w;
  cert.gamma_beta = diag.gamma_beta;
  out.certificate = std::move(cert);
  return out;
}

std::vector<CertifyResult> certify_sweep(const CertificateInputs& in, const std::vector<double>& deltas) {
  std::vector<CertifyResult> out;
  out.reserve(deltas.size());
  for (double d : deltas) out.push_back(certify(in, d));
  return out;
}

WeightSearchResult optimize_weight(const CertificateInputs& in, double delta) {
  const Eigen::MatrixXd Abar = in.concrete.A + in.concrete.B * in.K;
  const double rho = spectral_radius(Abar);
  WeightSearchResult best;
  best.M = Eigen::MatrixXd::Identity(Abar.rows(), Abar.cols());
  if (rho >= 1.0) {
    best.result.reason = "interface closed loop A2 + B2 K is not stable (spectral radius " + std::to_string(rho) + ")";
    return best;
  }

  const double scale = std::max(1.0, (in.concrete.C.transpose() * in.concrete.C).norm());
  const std::vector<double> etas{1e-6, 1e-4, 1e-2, 1e-1, 1.0};
  double best_eps = std::numeric_limits<double>::infinity();
  bool have_any = false;

  auto evaluate = [&](double rate, double eta) -> double {
    CertificateInputs probe = in;
    try {
      probe.M = default_weight(Abar, in.concrete.C, eta * scale, rate);
    } catch (const NumericError&) {
      return std::numeric_limits<double>::infinity();
    }
    CertifyResult res = certify(probe, delta);
    const double eps = res.feasible() ? res.certificate->epsilon : std::numeric_limits<double>::infinity();
    if (!have_any || eps < best_eps) {
      have_any = true;
      best_eps = eps;
      best.M = probe.M;
      best.rate = rate;
      best.eta = eta * scale;
      best.result = std::move(res);
    }
    return eps;
  };

  constexpr int kRates = 60;
  double best_rate = 1.0;
  double best_eta = etas.front();
  for (double eta : etas) {
    for (int k = 1; k <= kRates; ++k) {
      const double rate = rho + (1.0 - rho) * static_cast<double>(k) / kRates;
      const double before = best_eps;
      evaluate(rate, eta);
      if (best_eps < before) {
        best_rate = rate;
        best_eta = eta;
      }
    }
  }
  // Golden-section refinement of the rate around the best grid point.
  const double step = (1.0 - rho) / kRates;
  double a = std::max(rho + 1e-9, best_rate - step);
  double b = std::min(1.0, best_rate + step);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - g * (b - a);
  double x2 = a + g * (b - a);
  double f1 = evaluate(x1, best_eta);
  double f2 = evaluate(x2, best_eta);
  for (int it = 0; it < 40; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = evaluate(x1, best_eta);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = evaluate(x2, best_eta);
    }
  }
  return best;
}

}  // namespace rosyn::relation
