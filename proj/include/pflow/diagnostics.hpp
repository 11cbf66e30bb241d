#pragma once

#include <span>
#include <string>
#include <vector>

#include "pflow/fluid.hpp"
#include "pflow/psi_solver.hpp"

namespace pflow {

/// Per-step invariant readouts.
struct DiagnosticsRecord {
  long step = 0;
  double t = 0.0;
  double dt = 0.0;
  double total_mass = 0.0;
  double mass_drift = 0.0;  ///< |E - E0| / E0
  double kinetic = 0.0;
  double dissipation = 0.0;
  double wall = 0.0;
  double power = 0.0;
  double energy_residual = 0.0;
  double m0 = 0.0, m1 = 0.0, m2 = 0.0, m3 = 0.0, m_theta = 0.0;
  double phi_min = 0.0, phi_max = 0.0;
  double psi_min = 0.0, psi_max = 0.0;
  double psi_tilde_min = 0.0, psi_tilde_mean = 0.0, psi_tilde_max = 0.0;
  double weighted_l2 = 0.0;        ///< int int r^3 psi^2
  double weighted_grad_cum = 0.0;  ///< cumulative int int int r^3 A |grad_x psi|^2
  double grad_phi_cum = 0.0;       ///< cumulative int int |grad phi|^2
  double divergence = 0.0;
  int poisson_iterations = 0;
  int implicit_diffusion = 0;  ///< 1 if any diffusion sub-step ran implicitly
  int retries = 0;
  double phi_bound = 0.0;      ///< max(K^2, max phi0)
  double tail_fraction = 0.0;  ///< share of M1 in the last 10% of (r0, r_inf)
  int truncation_active = 0;
};

/// Fixed column order of the time-series file.
const std::vector<std::string>& diagnostics_columns();
std::vector<double> diagnostics_values(const DiagnosticsRecord& r);
DiagnosticsRecord diagnostics_from_values(std::span<const double> values);

/// E = int phi + int int r psi, summed cell by cell.
double total_mass(const SpatialGrid& g, const ChainGrid& chain, const Field2D& phi, const PsiField& psi);
/// Same quantity through the moment operator: per-r totals first, then moment weights.
double total_mass_by_moment(const SpatialGrid& g, const ChainGrid& chain, const Field2D& phi, const PsiField& psi);

/// Domain-integrated M_alpha.
double total_moment(const SpatialGrid& g, const ChainGrid& chain, const PsiField& psi, double alpha);

struct WeightedL2 {
  double norm = 0.0;      ///< int int r^3 psi^2 dr dx
  double gradient = 0.0;  ///< int int r^3 A |grad_x psi|^2 dr dx (rate, not integrated in time)
};
WeightedL2 weighted_l2_audit(const SpatialGrid& g, const ChainGrid& chain, std::span<const double> diffusivity,
                             const PsiField& psi);

/// int |grad phi|^2 over the face differences.
double grad_phi_squared(const SpatialGrid& g, const Field2D& phi);

/// Share of M1 carried by cells with r >= r0 + 0.9 (r_inf - r0).
double tail_fraction(const ChainGrid& chain, const PsiField& psi);

/// Gronwall constant of the moment bound, C(alpha, K) = K (max(0, (1-alpha)/(1+alpha)) + 1 + alpha).
double gronwall_constant(double alpha, double K);

struct MomentAudit {
  double rate = 0.0;       ///< least-squares slope of log M(t)
  double max_excess = 0.0; ///< max of log(M(t)/M(0)) - C t; positive means the bound was exceeded
  bool flagged = false;
};

/// Fits the exponential growth rate of a moment series and compares it with
/// exp(c_ledger t). Needs at least 10 samples; an all-zero series has rate 0.
MomentAudit moment_growth_audit(std::span<const double> t, std::span<const double> m, double c_ledger);

}  // namespace pflow
