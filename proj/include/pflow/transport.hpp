#pragma once

#include <span>

#include "pflow/fluid.hpp"
#include "pflow/spatial_grid.hpp"

namespace pflow {

/// Cell-centered scalar transport shared by the chain and monomer equations.
/// Data layout: value of component k in cell c at data[c * ncomp + k].

/// Conservative first-order upwind advection by the face velocities.
/// Positivity needs dt (|u|/dx + |w|/dy) <= 1 at each cell; the caller owns that check.
void advect_upwind(const SpatialGrid& g, const VelocityField& v, double dt, int ncomp,
                   std::span<const double> in, std::span<double> out);

/// dt * max over cells of the outflow rate; must stay <= 1 for positivity.
double advective_courant(const SpatialGrid& g, const VelocityField& v, double dt);

struct DiffusionInfo {
  int implicit_components = 0;
  int sweeps = 0;  ///< Gauss-Seidel sweeps spent on implicit components
};

/// Neumann/periodic diffusion with coefficient coeff[k] per component.
/// Components with dt coeff (2/dx^2 + 2/dy^2) <= 0.9 use the explicit monotone update;
/// the rest are solved with backward Euler by Gauss-Seidel, which keeps them
/// nonnegative. Throws SolverError if Gauss-Seidel stalls.
DiffusionInfo diffuse(const SpatialGrid& g, double dt, std::span<const double> coeff, std::span<double> data);

/// Explicit stability number dt * coeff * (2/dx^2 + 2/dy^2).
double diffusion_number(const SpatialGrid& g, double dt, double coeff);

}  // namespace pflow
