#pragma once

#include "pflow/model.hpp"
#include "pflow/poisson.hpp"
#include "pflow/spatial_grid.hpp"

namespace pflow {

struct VelocityField {
  Field2D u;  ///< x-faces, (nx+1) x ny
  Field2D w;  ///< y-faces, nx x (ny+1)
};

VelocityField make_velocity(const SpatialGrid& g);

struct PressureField {
  Field2D q;  ///< cell centers, mean zero
};

struct BodyForce {
  enum class Kind { none, uniform, cellular };
  Kind kind = Kind::none;
  double fx = 0.0;  ///< uniform x-component, or cellular amplitude
  double fy = 0.0;  ///< uniform y-component (unused for cellular)

  /// Cellular forcing is the divergence-free field
  /// (F sin(kx x) cos(ky y), -F (kx/ky) cos(kx x) sin(ky y)), k = 2 pi / L.
  Vec2 at(const SpatialGrid& g, double x, double y) const;

  friend bool operator==(const BodyForce&, const BodyForce&) = default;
};

/// Strain, viscosity and stress samples on the staggered grid.
///
/// D_xx, D_yy, S_xx, S_yy and nu_c live at centers; D_xy, S_xy and nu_n at
/// nodes. On slip walls the nodal shear uses a ghost tangential velocity u_w
/// with nu (u_0 - u_w) / (h/2) = 2 alpha* u_w, i.e. S_xy = +-alpha* u_w.
struct StressField {
  Field2D dxx, dyy, sxx, syy, nu_c, shear_c;
  Field2D dxy, sxy, nu_n;
  double dissipation = 0.0;  ///< sum S:D dA
  double wall = 0.0;         ///< wall friction power, alpha* |u_w|^2 ds
  double nu_max = 0.0;
};

StressField compute_stress_field(const SpatialGrid& g, const ModelCoefficients& coeffs,
                                 const Field2D& psi_tilde, const VelocityField& v);

struct EnergyLedgerEntry {
  double kinetic = 0.0;
  double dissipation = 0.0;
  double wall = 0.0;
  double power = 0.0;
  double residual = 0.0;  ///< dKE/dt + dissipation + wall - power, time-centered
};

/// Adams-Bashforth history of the explicit right-hand side.
struct FluidHistory {
  Field2D fu, fw;
  double dt = 0.0;
  bool valid = false;
};

struct FluidStepResult {
  int poisson_iterations = 0;
  double poisson_residual = 0.0;
  double divergence = 0.0;  ///< relative post-projection divergence
  EnergyLedgerEntry energy;
  StressField stress;        ///< stress at the new velocity
};

double kinetic_energy(const SpatialGrid& g, const VelocityField& v);
double force_power(const SpatialGrid& g, const BodyForce& f, const VelocityField& v);
double max_speed(const SpatialGrid& g, const VelocityField& v);
/// max |div v| h_min / max|v|; zero for a velocity at rest.
double relative_divergence(const SpatialGrid& g, const VelocityField& v);
void divergence(const SpatialGrid& g, const VelocityField& v, Field2D& out);
/// Velocity interpolated to cell center (i, j).
Vec2 center_velocity(const SpatialGrid& g, const VelocityField& v, int i, int j);

/// One projection step: explicit AB2 (Euler on the first step) for advection,
/// stress divergence and body force, then pressure projection.
/// `stress_old` must be compute_stress_field(psi_tilde, v) for the incoming v.
FluidStepResult step_fluid(const SpatialGrid& g, const ModelCoefficients& coeffs, const Field2D& psi_tilde,
                           const BodyForce& force, double dt, const StressField& stress_old,
                           VelocityField& v, PressureField& p, FluidHistory& hist,
                           double poisson_tol = 1e-12);

}  // namespace pflow
