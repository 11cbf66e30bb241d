#pragma once

#include <span>
#include <vector>

#include "pflow/fluid.hpp"
#include "pflow/fragmentation.hpp"
#include "pflow/model.hpp"
#include "pflow/spatial_grid.hpp"
#include "pflow/transport.hpp"

namespace pflow {

/// Chain-length distribution, psi[cell][k] with the chain index fastest.
struct PsiField {
  int cells = 0;
  int nr = 0;
  std::vector<double> values;

  PsiField() = default;
  PsiField(int cells_, int nr_, double value = 0.0)
      : cells(cells_), nr(nr_), values(static_cast<std::size_t>(cells_) * static_cast<std::size_t>(nr_), value) {}

  std::span<double> slice(std::size_t c) { return {values.data() + c * static_cast<std::size_t>(nr), static_cast<std::size_t>(nr)}; }
  std::span<const double> slice(std::size_t c) const {
    return {values.data() + c * static_cast<std::size_t>(nr), static_cast<std::size_t>(nr)};
  }
};

/// Per-step reaction data shared by the chain and monomer updates.
struct KineticRates {
  std::vector<double> beta;  ///< beta(r_k, v_c, D_c), layout as PsiField
};

struct PsiTransportInfo {
  DiffusionInfo diffusion;
  double courant = 0.0;
};

/// Grid-dependent operators of the chain equation.
class PsiSolver {
 public:
  PsiSolver(const SpatialGrid& g, const ChainGrid& chain, const ModelCoefficients& coeffs);

  const SpatialGrid& grid() const { return grid_; }
  const ChainGrid& chain() const { return chain_; }
  std::span<const double> growth_speeds() const { return speeds_; }
  std::span<const double> sink_weights() const { return sink_w_; }
  std::span<const double> diffusivity() const { return diff_; }
  std::span<const double> gamma_weights() const { return gamma_w_; }

  /// Fragmentation rates from the cell-centered velocity and strain of `stress`.
  KineticRates rates(const VelocityField& v, const StressField& stress) const;

  /// Largest dt with dt (phi a_k + beta_k) <= cfl in every cell.
  double kinetic_dt_limit(const Field2D& phi, const KineticRates& rates, double cfl) const;

  /// psi~ per cell.
  void average(const PsiField& psi, Field2D& psi_tilde) const;

  /// Monomer gain with the exponentially integrated rate (1 - e^{-beta dt})/dt and
  /// polymerization sink coefficient, per cell.
  void reaction_coefficients(const PsiField& psi, const KineticRates& rates, double dt, Field2D& gain,
                             Field2D& sink) const;

  /// Growth and fragmentation over dt with monomer level phi (per cell):
  /// psi+ = e^{-beta dt} psi - dt phi a (psi_k - psi_{k-1}) + dt gain(beta_eff psi).
  /// Throws CflViolation if dt (phi a_k + beta_k) > 1 anywhere.
  void kinetic_step(PsiField& psi, const Field2D& phi, const KineticRates& rates, double dt) const;

  /// x-advection by the face velocities, then x-diffusion with A(r_k).
  PsiTransportInfo transport_step(PsiField& psi, const VelocityField& v, double dt) const;

 private:
  SpatialGrid grid_;
  ChainGrid chain_;
  ModelCoefficients coeffs_;
  std::vector<double> speeds_, sink_w_, diff_, gamma_w_;
};

/// Throws InvariantBreach if any value is below -tol (or not finite).
void check_nonnegative(std::span<const double> values, double tol, const char* what);

/// Full chain update in the kinetic-then-transport order.
PsiTransportInfo step_psi(const PsiSolver& solver, PsiField& psi, const Field2D& phi, const KineticRates& rates,
                          const VelocityField& v, double dt);

}  // namespace pflow
