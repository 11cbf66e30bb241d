#pragma once

#include "pflow/spatial_grid.hpp"

namespace pflow {

struct PoissonResult {
  int iterations = 0;
  double residual = 0.0;  ///< final ||r|| / ||rhs|| (0 for a zero right-hand side)
};

/// Conjugate gradients for the cell-centered 5-point Laplacian with homogeneous
/// Neumann data on walls and wrap-around in periodic directions.
///
/// The operator is singular (constants), so the right-hand side is projected to
/// mean zero and the solution is returned with mean zero.
class PoissonSolver {
 public:
  explicit PoissonSolver(const SpatialGrid& grid) : grid_(grid) {}

  /// Solves L p = rhs. `p` is the initial guess on entry. Throws SolverError when
  /// the relative residual stays above rel_tol after max_iter iterations.
  PoissonResult solve(const Field2D& rhs, Field2D& p, double rel_tol = 1e-12, int max_iter = 20000) const;

  /// out = L p
  void apply(const Field2D& p, Field2D& out) const;

 private:
  SpatialGrid grid_;
};

/// Subtracts the (fixed-order) mean.
void remove_mean(Field2D& f);

}  // namespace pflow
