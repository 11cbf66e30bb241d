#pragma once

#include <functional>
#include <span>
#include <vector>

#include "pflow/fragmentation.hpp"
#include "pflow/model.hpp"

namespace pflow {

/// Spatially homogeneous chain/monomer state.
struct ZeroDimState {
  std::vector<double> psi;
  double phi = 0.0;
  double t = 0.0;
};

struct ZeroDimSample {
  double t = 0.0;
  double phi = 0.0;
  double m0 = 0.0;
  double m1 = 0.0;
  double mass = 0.0;  ///< phi + M1
};

/// Growth with constant rate tau_const and fragmentation with beta(r, 0, 0):
///   d psi/dt = -tau phi d_r psi - beta psi + 2 int beta kappa psi,  psi(r0) = 0
///   d phi/dt = r0^2 int beta psi / r~ - tau phi M0
class ZeroDimModel {
 public:
  ZeroDimModel(const ChainGrid& chain, double tau_const, const std::function<double(double)>& beta);
  ZeroDimModel(const ChainGrid& chain, double tau_const, const ModelCoefficients& coeffs);

  const ChainGrid& chain() const { return chain_; }
  double tau() const { return tau_; }

  void rhs(std::span<const double> psi, double phi, std::span<double> dpsi, double& dphi) const;

  /// phi + M1
  double invariant(const ZeroDimState& s) const;
  ZeroDimSample sample(const ZeroDimState& s) const;

  /// Largest stable step for monomer level phi: cfl / (phi max_k a_k).
  double dt_limit(double phi, double cfl) const;

  /// One classical RK4 step.
  void step(ZeroDimState& s, double dt) const;

  /// RK4 from s.t to s.t + t_final with steps of at most dt (the last one is
  /// shortened). Samples every `every` steps plus the endpoints. Throws
  /// CflViolation if dt exceeds dt_limit(phi, cfl) at any step.
  std::vector<ZeroDimSample> integrate(ZeroDimState& s, double t_final, double dt, int every = 1,
                                       double cfl = 0.9) const;

 private:
  ChainGrid chain_;
  double tau_;
  std::vector<double> beta_, speeds_, sink_w_, m0_w_, m1_w_;
};

}  // namespace pflow
