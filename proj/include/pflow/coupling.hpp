#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pflow/config.hpp"
#include "pflow/diagnostics.hpp"
#include "pflow/fluid.hpp"
#include "pflow/psi_solver.hpp"
#include "pflow/snapshot.hpp"

namespace pflow {

struct SimState {
  double t = 0.0;
  long step = 0;
  VelocityField v;
  PressureField p;
  Field2D phi;
  PsiField psi;
  Field2D psi_tilde;  ///< recomputed from psi after every accepted step
  FluidHistory history;
};

struct StepControl {
  double cfl_adv = 0.5;
  double cfl_r = 0.9;
  double cfl_diff = 0.1;
  double dt_max = 0.05;
  Splitting splitting = Splitting::phi_first;
  int max_retries = 5;
  double poisson_tol = 1e-12;
  double tol_div = 1e-10;
  double tol_pos = 0.0;
  double phi_truncation_k = 0.0;
  double theta1_star = 1.5;
};

StepControl step_control(const RunConfig& cfg);

/// Running count of soft-invariant breaches and worst observed slacks.
struct InvariantTally {
  long mass = 0;
  long max_principle = 0;
  long weighted = 0;
  double worst_mass_drift = 0.0;
  double worst_phi_ratio = 0.0;       ///< max phi / max(K^2, max phi0)
  double worst_divergence = 0.0;
  double worst_weighted_ratio = 0.0;  ///< (weighted_l2 + cumulative gradient) / initial weighted_l2
  double min_psi = 0.0;
  double min_phi = 0.0;
  long retries = 0;
  bool tail_warning = false;
};

/// Coupled fluid / chain / monomer integrator.
///
/// One step: psi~ from psi, fluid projection step, then (phi_first) the monomer
/// update with the chain field of the previous level followed by the chain
/// update with the new monomer field, or (psi_first) the reverse. A step that
/// breaks positivity or incompressibility, or a stability limit, is rejected and
/// retried with half the time step.
class Simulation {
 public:
  Simulation(const SpatialGrid& g, const ChainGrid& chain, const ModelCoefficients& coeffs, const BodyForce& force,
             const StepControl& control, SimState initial);

  static Simulation from_config(const RunConfig& cfg);

  const SimState& state() const { return state_; }
  const SpatialGrid& grid() const { return grid_; }
  const ChainGrid& chain() const { return chain_; }
  const ModelCoefficients& coefficients() const { return coeffs_; }
  const PsiSolver& psi_solver() const { return psi_solver_; }
  const StepControl& control() const { return control_; }
  const DiagnosticsRecord& diagnostics() const { return record_; }
  const InvariantTally& tally() const { return tally_; }
  double initial_mass() const { return e0_; }
  double phi_bound() const { return phi_bound_; }

  /// Stability-limited step size for the current state, capped by dt_max.
  double stable_dt(double dt_max) const;

  /// One accepted step of size <= min(dt_max, stable_dt). Throws InvariantBreach
  /// after max_retries rejected attempts.
  const DiagnosticsRecord& advance(double dt_max);

  /// Soft-invariant tolerances used for the tally.
  void set_tolerances(const Tolerances& tol) { tol_ = tol; }

  Snapshot snapshot() const;

 private:
  void attempt(double dt, int retries);
  void measure(double dt, const FluidStepResult* fluid, int implicit, int truncated, int retries);

  SpatialGrid grid_;
  ChainGrid chain_;
  ModelCoefficients coeffs_;
  BodyForce force_;
  StepControl control_;
  Tolerances tol_;
  PsiSolver psi_solver_;
  SimState state_;
  StressField stress_;   ///< at the current velocity and psi~
  KineticRates rates_;   ///< at the current velocity
  DiagnosticsRecord record_;
  InvariantTally tally_;
  double e0_ = 0.0;
  double phi_bound_ = 0.0;
  double weighted0_ = 0.0;
};

struct RunSummary {
  long steps = 0;
  double t = 0.0;
  bool invariants_ok = true;
  InvariantTally tally;
  std::string report;  ///< JSON text of the exit report
};

/// Integrates to t_final writing timeseries.csv, snapshot_NNNNNN.pflow and
/// report.json into out_dir. Outputs written so far are flushed before an abort.
RunSummary run(const RunConfig& cfg, const std::string& out_dir);

}  // namespace pflow
