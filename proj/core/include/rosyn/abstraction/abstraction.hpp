#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rosyn/abstraction/grid.hpp"
#include "rosyn/abstraction/kernel.hpp"
#include "rosyn/abstraction/reduction.hpp"

namespace rosyn::abstraction {

/// Gaussian mass of a rectangle for independent axes: the product over axes
/// of Phi((hi - mu)/sigma) - Phi((lo - mu)/sigma). Axes with zero variance are
/// point masses (factor 1 iff mu lies in [lo, hi]).
double cell_probability(const Eigen::VectorXd& mean, const Eigen::VectorXd& variances, const model::Box& cell);

/// Finite abstract model on the grid. States 0..l-1 are grid cells; state l
/// is an absorbing sink collecting the mass that leaves the grid box.
struct FiniteAbstraction {
  ReducedModel reduced;
  GridPartition grid;
  std::vector<Eigen::VectorXd> inputs;
  Kernel kernel;

  std::size_t num_cells() const { return grid.num_cells(); }
  std::size_t sink() const { return grid.num_cells(); }
  std::size_t num_states() const { return grid.num_cells() + 1; }
  Eigen::VectorXd representative(std::size_t state) const { return grid.center(state); }
  Eigen::VectorXd output(std::size_t state) const { return reduced.C1 * grid.center(state); }
};

struct AbstractionOptions {
  /// Entries below this are folded into the sink so rows stay stochastic.
  double drop_threshold = 1e-15;
};

/// Builds the transition tensor T[i][j][k] = Gaussian mass of cell k under
/// mean A1 z_i + B1 u_j and covariance Bw1 Bw1^T. Requires the covariance to
/// be diagonal (relative off-diagonal tolerance 1e-12); throws Error otherwise.
FiniteAbstraction build_abstraction(const ReducedModel& red, const GridPartition& grid,
                                    std::vector<Eigen::VectorXd> inputs, const AbstractionOptions& options = {});

/// Uniform grid of `per_axis` points per input axis on [-sqrt(c_u), sqrt(c_u)]^m,
/// restricted to the ball ||u||^2 <= c_u. per_axis == 1 gives the origin.
std::vector<Eigen::VectorXd> input_grid(Eigen::Index input_dim, double input_bound, std::size_t per_axis);

}  // namespace rosyn::abstraction
