#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "pflow/fragmentation.hpp"

namespace pflow {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// Symmetric 2x2 tensor stored as (xx, xy, yy).
struct SymTensor2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;
};

/// Full contraction a:b of two symmetric tensors.
inline double contract(const SymTensor2& a, const SymTensor2& b) {
  return a.xx * b.xx + 2.0 * a.xy * b.xy + a.yy * b.yy;
}
double frobenius(const SymTensor2& a);

enum class ViscosityClosure {
  flory,      ///< nu_ref exp(c_F min(sqrt(psi~), cap)) (delta^2+|D|^2)^((p-2)/2) + nu_inf
  crossover,  ///< (nu_inf + (nu_ref - nu_inf)/(1 + psi~)) (delta^2+|D|^2)^((p-2)/2)
};

struct ViscosityParams {
  ViscosityClosure closure = ViscosityClosure::flory;
  double p = 2.0;
  double nu_ref = 0.25;
  double nu_inf = 0.05;
  double c_flory = 0.1;
  double flory_cap = 10.0;
  double delta_nu = 1e-4;

  friend bool operator==(const ViscosityParams&, const ViscosityParams&) = default;
};

/// Scalar parameters of the default coefficient family.
struct CoefficientParams {
  double r0 = 1.0;
  double K = 4.0;
  double A_max = 0.1;   ///< A(r) = A_max / (1 + (r - r0))
  double A0 = 0.1;      ///< monomer diffusivity
  double tau_max = 1.0; ///< tau(r) = tau_max (1 - exp(-k_tau (r - r0)))
  double k_tau = 1.0;
  double beta0 = 0.5;   ///< beta = beta0 r/(1+r) (1 + b1 |D|^2/(1+|D|^2) + b_v |v|^2/(1+|v|^2))
  double b1 = 1.0;
  double b_v = 0.0;
  double theta = 1.0;   ///< gamma(r) = r^theta
  ViscosityParams viscosity;
  double alpha_star = 0.0;

  friend bool operator==(const CoefficientParams&, const CoefficientParams&) = default;
};

using ScalarFn = std::function<double(double)>;
using BetaFn = std::function<double(double r, const Vec2& v, const SymTensor2& D)>;
using ViscosityFn = std::function<double(double psi_tilde, double shear)>;
using KernelFn = std::function<double(double r, double r_tilde, double r0)>;

/// All coefficient functions and constants of the coupled model.
struct ModelCoefficients {
  double r0 = 1.0;
  ScalarFn A;        ///< chain diffusivity A(r)
  double A0 = 0.1;   ///< monomer diffusivity
  ScalarFn tau;      ///< polymerization rate tau(r)
  ScalarFn dtau;     ///< tau'(r); optional, finite differences are used when empty
  BetaFn beta;       ///< fragmentation rate beta(r, v, D)
  ScalarFn eta;      ///< envelope sup d_r beta / beta
  ScalarFn gamma;    ///< averaging weight
  double theta = 1.0;
  ViscosityFn nu;
  double p = 2.0;
  double alpha_star = 0.0;
  double K = 4.0;
};

ModelCoefficients make_default_coefficients(const CoefficientParams& params);

/// Viscosity closure selected by `params.closure`.
double closure_viscosity(const ViscosityParams& params, double psi_tilde, double shear);

/// nu(psi~, |D|); throws std::invalid_argument for non-finite or negative arguments
/// and pflow::Error for a non-finite or non-positive result.
double viscosity(const ModelCoefficients& coeffs, double psi_tilde, double shear);
/// S = nu(psi~, |D|) D
SymTensor2 stress(const ModelCoefficients& coeffs, double psi_tilde, const SymTensor2& D);

/// psi~ = int gamma psi dr (midpoint rule on the chain grid).
double weighted_average(const ChainGrid& grid, std::span<const double> psi, const ScalarFn& gamma);
double weighted_average(std::span<const double> psi, std::span<const double> gamma_weights);
/// gamma(r_j) * dr_j, for repeated evaluation of weighted_average.
std::vector<double> gamma_weights(const ChainGrid& grid, const ScalarFn& gamma);

struct SamplingPlan {
  int r_points = 512;
  double r_max_factor = 1e3;  ///< samples cover (r0, r_max_factor * max(1, r0)]
  double r_far = 1e6;         ///< used for decay and envelope-integral checks
  int tensor_pairs = 50;
  int velocity_probes = 4;
  std::uint64_t seed = 20240531;
};

struct AssumptionResult {
  std::string id;
  std::string description;
  bool pass = true;
  std::string worst;  ///< the most violated sampled inequality, if any
};

struct ValidationReport {
  std::array<AssumptionResult, 6> assumptions;
  bool all_pass() const;
  const AssumptionResult& operator[](const std::string& id) const;
};

/// Samples every structural assumption on the coefficients (A1..A6) and marks each
/// pass/fail. Inequalities use a relative slack of 1e-12. The kernel check defaults
/// to the model kernel. Throws pflow::Error on r0 <= 0 or non-finite evaluations.
ValidationReport validate_coefficients(const ModelCoefficients& coeffs, const SamplingPlan& plan = {},
                                       const KernelFn& kernel_fn = kernel);

std::string format_report(const ValidationReport& report);

}  // namespace pflow
