#pragma once

#include <cstdint>
#include <string>

#include "pflow/fluid.hpp"
#include "pflow/fragmentation.hpp"
#include "pflow/model.hpp"
#include "pflow/spatial_grid.hpp"

namespace pflow {

enum class Splitting {
  phi_first,  ///< fluid -> monomers (old psi) -> chains (new phi); exact discrete mass balance
  psi_first,  ///< fluid -> chains (old phi) -> monomers (new psi)
};

enum class VelocityInit { rest, cellular, taylor_green, random };
enum class Pattern { constant, gaussian, random };
enum class PsiShape { exponential, gamma, box };

struct GridConfig {
  int nx = 32;
  int ny = 32;
  double lx = 6.283185307179586;
  double ly = 6.283185307179586;
  Boundary bc_x = Boundary::periodic;
  Boundary bc_y = Boundary::slip_wall;
  int nr = 128;
  double r_inf = 0.0;  ///< 0 selects the tail rule
  Stretching r_stretch = Stretching::geometric;

  friend bool operator==(const GridConfig&, const GridConfig&) = default;
};

struct InitialConfig {
  VelocityInit velocity = VelocityInit::cellular;
  double velocity_amplitude = 0.5;
  Pattern phi = Pattern::gaussian;
  double phi_level = 1.0;
  double phi_amplitude = 0.5;
  double psi_number = 1.0;  ///< chains per unit area before modulation
  Pattern psi_pattern = Pattern::constant;
  double psi_amplitude = 0.0;
  PsiShape psi_shape = PsiShape::gamma;
  double psi_scale = 1.0;
  std::uint64_t seed = 1;

  friend bool operator==(const InitialConfig&, const InitialConfig&) = default;
};

struct TimeConfig {
  double t_final = 1.0;
  double cfl_adv = 0.5;
  double cfl_r = 0.9;
  double cfl_diff = 0.1;
  double dt_max = 0.05;
  Splitting splitting = Splitting::phi_first;
  int max_retries = 5;
  double zero_dim_dt = 1e-3;

  friend bool operator==(const TimeConfig&, const TimeConfig&) = default;
};

struct OutputConfig {
  int snapshot_every = 0;  ///< steps between snapshots; 0 writes only the initial and final state
  int series_every = 1;    ///< steps between time-series rows

  friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct Tolerances {
  double tol_mass = 1e-4;     ///< relative total-mass drift
  double tol_max = 1e-8;      ///< relative slack on the monomer upper bound
  double tol_pos = 0.0;       ///< accepted negativity of psi and phi
  double tol_div = 1e-10;     ///< relative post-projection divergence
  double poisson_tol = 1e-12;
  double weighted_bound = 1e3;  ///< allowed growth factor of the r^3-weighted norm
  double phi_truncation_k = 0.0;  ///< T_k guard on phi in the growth term; 0 disables

  friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

struct RunConfig {
  GridConfig grid;
  CoefficientParams coefficients;
  double theta1_star = 1.5;  ///< moment order used by the tail rule and diagnostics
  double tau_const = 1.0;    ///< constant polymerization rate of the zero-dimensional model
  BodyForce force;
  InitialConfig initial;
  TimeConfig time;
  OutputConfig output;
  Tolerances tolerances;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parses the sectioned key = value format. Unknown sections or keys, duplicate
/// keys and malformed values raise ConfigError with the line number; constraint
/// violations name the broken rule.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Writes every key; parse_config(dump_config(c)) reproduces c exactly.
std::string dump_config(const RunConfig& config);

/// Throws ConfigError if a constraint is violated.
void check_config(const RunConfig& config);

}  // namespace pflow
