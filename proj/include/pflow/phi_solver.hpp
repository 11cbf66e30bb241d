#pragma once

#include "pflow/fluid.hpp"
#include "pflow/spatial_grid.hpp"
#include "pflow/transport.hpp"

namespace pflow {

struct PhiStepInfo {
  DiffusionInfo diffusion;
  double courant = 0.0;
};

/// Upwind advection and A0-diffusion of the monomer field.
PhiStepInfo transport_phi(const SpatialGrid& g, const VelocityField& v, double A0, double dt, Field2D& phi);

/// phi <- (phi + dt g) / (1 + dt s) per cell. Throws InvariantBreach if a sink
/// coefficient is negative or a gain is negative.
void react_phi(const Field2D& gain, const Field2D& sink, double dt, Field2D& phi);

/// Transport followed by the reaction update.
PhiStepInfo step_phi(const SpatialGrid& g, const VelocityField& v, double A0, const Field2D& gain,
                     const Field2D& sink, double dt, Field2D& phi);

/// T_k(s) = min(|s|, k) sign s applied cellwise; returns the number of cells
/// where the truncation was active. k <= 0 disables it.
int truncate_phi(double k, Field2D& phi);

}  // namespace pflow
