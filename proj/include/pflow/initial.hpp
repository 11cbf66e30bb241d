#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pflow/config.hpp"
#include "pflow/fluid.hpp"
#include "pflow/psi_solver.hpp"

namespace pflow {

/// Velocity sampled from a nodal streamfunction, so the discrete divergence is
/// zero to roundoff and the wall-normal components vanish.
/// taylor_green: U (sin kx x cos ky y, -(kx/ky) cos kx x sin ky y), k = 2 pi / L;
/// cellular: the same with doubled wavenumbers; random: a few low modes scaled
/// to max |v| = U.
VelocityField initial_velocity(const SpatialGrid& g, VelocityInit kind, double amplitude, std::uint64_t seed);

/// Spatial modulation in [0, 1]: 0 for constant, a centered Gaussian bump, or a
/// smoothed random field.
Field2D spatial_pattern(const SpatialGrid& g, Pattern kind, std::uint64_t seed);

Field2D initial_phi(const SpatialGrid& g, const InitialConfig& init);

/// Chain-length profile with unit integral over (r0, inf).
std::function<double(double)> psi_profile(const InitialConfig& init, double r0);

/// Cell averages of psi_number * profile(r), without spatial modulation.
std::vector<double> initial_psi_profile(const ChainGrid& chain, const InitialConfig& init);
/// Cell averages of psi_number (1 + psi_amplitude P(x)) * profile(r).
PsiField initial_psi(const SpatialGrid& g, const ChainGrid& chain, const InitialConfig& init);

/// Tail rule: smallest r_inf (on a 5% ladder) with
/// int_{r_inf/2}^{r_inf} r^theta1 f < 1e-8 int r^theta1 f for the initial profile f.
double select_r_inf(const InitialConfig& init, double r0, double theta1);

}  // namespace pflow
