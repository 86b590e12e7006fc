#include "rosyn/abstraction/abstraction.hpp"

#include <cmath>

#include "rosyn/error.hpp"
#include "rosyn/numeric.hpp"
#include "rosyn/parallel.hpp"

namespace rosyn::abstraction {

namespace {

// Mass of [lo, hi] under N(mu, sigma^2), evaluated on the tail closer to the
// interval to avoid cancellation far from the mean.
double interval_mass(double mu, double sigma, double lo, double hi) {
  if (sigma <= 0.0) return (mu >= lo && mu <= hi) ? 1.0 : 0.0;
  const double a = (lo - mu) / sigma;
  const double b = (hi - mu) / sigma;
  if (a > 0.0) return normal_cdf(-a) - normal_cdf(-b);
  return normal_cdf(b) - normal_cdf(a);
}

}  // namespace

double cell_probability(const Eigen::VectorXd& mean, const Eigen::VectorXd& variances, const model::Box& cell) {
  if (mean.size() != cell.dim() || variances.size() != cell.dim()) {
    throw DimensionError("cell_probability: dimension mismatch");
  }
  double p = 1.0;
  for (Eigen::Index a = 0; a < mean.size(); ++a) {
    if (variances(a) < 0.0) throw NumericError("cell_probability: negative variance");
    p *= interval_mass(mean(a), std::sqrt(variances(a)), cell.lo(a), cell.hi(a));
    if (p == 0.0) break;
  }
  return p;
}

FiniteAbstraction build_abstraction(const ReducedModel& red, const GridPartition& grid,
                                    std::vector<Eigen::VectorXd> inputs, const AbstractionOptions& options) {
  const Eigen::Index ns = red.A1.rows();
  if (grid.dim() != ns) throw DimensionError("build_abstraction: grid dimension differs from reduced order");
  if (inputs.empty()) throw Error("build_abstraction: at least one abstract input is required");
  for (const auto& u : inputs) {
    if (u.size() != red.B1.cols()) throw DimensionError("build_abstraction: input dimension mismatch");
  }
  const Eigen::MatrixXd cov = red.Bw1 * red.Bw1.transpose();
  const double scale = std::max(cov.diagonal().maxCoeff(), 1e-300);
  for (Eigen::Index a = 0; a < ns; ++a) {
    for (Eigen::Index b = 0; b < ns; ++b) {
      if (a != b && std::abs(cov(a, b)) > 1e-12 * scale) {
        throw Error("build_abstraction: noise covariance Bw1 Bw1^T must be diagonal");
      }
    }
  }
  const Eigen::VectorXd sigma = cov.diagonal().cwiseMax(0.0).cwiseSqrt();

  const std::size_t cells = grid.num_cells();
  const std::size_t m = inputs.size();
  const std::uint32_t sink = static_cast<std::uint32_t>(cells);

  // rows[i][j]: entries for cell i under input j.
  std::vector<std::vector<std::vector<Kernel::Entry>>> rows(cells, std::vector<std::vector<Kernel::Entry>>(m));
  parallel_for(cells, [&](std::size_t i) {
    const Eigen::VectorXd z = grid.center(i);
    std::vector<std::vector<std::pair<std::size_t, double>>> axis_mass(ns);
    for (std::size_t j = 0; j < m; ++j) {
      const Eigen::VectorXd mean = red.A1 * z + red.B1 * inputs[j];
      for (Eigen::Index a = 0; a < ns; ++a) {
        auto& am = axis_mass[a];
        am.clear();
        const auto count = grid.counts()[a];
        const double lo = grid.box().lo(a);
        const double w = grid.diameter()(a);
        for (std::size_t b = 0; b < count; ++b) {
          const double clo = lo + static_cast<double>(b) * w;
          const double chi = b + 1 == count ? grid.box().hi(a) : lo + static_cast<double>(b + 1) * w;
          double p = interval_mass(mean(a), sigma(a), clo, chi);
          // Point masses on an inner face belong to the lower cell only.
          if (sigma(a) <= 0.0 && b > 0 && mean(a) == clo) p = 0.0;
          if (p > options.drop_threshold) am.emplace_back(b, p);
        }
      }
      // Tensor product over axes.
      std::vector<std::pair<std::size_t, double>> acc{{0, 1.0}};
      for (Eigen::Index a = 0; a < ns; ++a) {
        std::vector<std::pair<std::size_t, double>> next;
        next.reserve(acc.size() * axis_mass[a].size());
        for (const auto& [idx, p] : acc) {
          for (const auto& [b, q] : axis_mass[a]) {
            const double pq = p * q;
            if (pq > options.drop_threshold) next.emplace_back(idx * grid.counts()[a] + b, pq);
          }
        }
        acc = std::move(next);
      }
      auto& row = rows[i][j];
      row.reserve(acc.size() + 1);
      double kept = 0.0;
      for (const auto& [idx, p] : acc) {
        row.push_back({static_cast<std::uint32_t>(idx), p});
        kept += p;
      }
      const double out = 1.0 - kept;
      if (out > 0.0) row.push_back({sink, out});
    }
  }, 8);

  FiniteAbstraction fa;
  fa.reduced = red;
  fa.grid = grid;
  fa.inputs = std::move(inputs);
  fa.kernel = Kernel(cells + 1, m);
  for (std::size_t i = 0; i < cells; ++i) {
    for (std::size_t j = 0; j < m; ++j) fa.kernel.append_row(rows[i][j]);
  }
  const Kernel::Entry self{sink, 1.0};
  for (std::size_t j = 0; j < m; ++j) fa.kernel.append_row(std::span(&self, 1));
  return fa;
}

std::vector<Eigen::VectorXd> input_grid(Eigen::Index input_dim, double input_bound, std::size_t per_axis) {
  if (input_dim < 1) throw DimensionError("input_grid: input dimension must be >= 1");
  if (input_bound < 0.0) throw Error("input_grid: input bound must be non-negative");
  if (per_axis == 0) throw Error("input_grid: per_axis must be >= 1");
  const double r = std::sqrt(input_bound);
  std::vector<double> axis(per_axis);
  for (std::size_t k = 0; k < per_axis; ++k) {
    axis[k] = per_axis == 1 ? 0.0 : -r + 2.0 * r * static_cast<double>(k) / static_cast<double>(per_axis - 1);
  }
  std::vector<Eigen::VectorXd> out;
  std::size_t total = 1;
  for (Eigen::Index a = 0; a < input_dim; ++a) total *= per_axis;
  for (std::size_t flat = 0; flat < total; ++flat) {
    Eigen::VectorXd u(input_dim);
    std::size_t rest = flat;
    for (Eigen::Index a = input_dim; a-- > 0;) {
      u(a) = axis[rest % per_axis];
      rest /= per_axis;
    }
    if (u.squaredNorm() <= input_bound * (1.0 + 1e-12)) out.push_back(std::move(u));
  }
  return out;
}

}  // namespace rosyn::abstraction
