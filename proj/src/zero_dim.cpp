#include "pflow/zero_dim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pflow/errors.hpp"

namespace pflow {

ZeroDimModel::ZeroDimModel(const ChainGrid& chain, double tau_const, const std::function<double(double)>& beta)
    : chain_(chain), tau_(tau_const) {
  if (!(tau_const > 0.0)) throw std::invalid_argument("ZeroDimModel: tau_const must be positive");
  const auto tau = [t = tau_const](double) { return t; };
  speeds_ = growth_speeds(chain_, tau);
  sink_w_ = sink_weights(chain_, tau);
  m0_w_ = moment_weights(chain_, 0.0);
  m1_w_ = moment_weights(chain_, 1.0);
  beta_.resize(static_cast<std::size_t>(chain_.size()));
  for (int k = 0; k < chain_.size(); ++k) beta_[static_cast<std::size_t>(k)] = beta(chain_.center(k));
}

ZeroDimModel::ZeroDimModel(const ChainGrid& chain, double tau_const, const ModelCoefficients& coeffs)
    : ZeroDimModel(chain, tau_const, [&coeffs](double r) { return coeffs.beta(r, Vec2{}, SymTensor2{}); }) {}

void ZeroDimModel::rhs(std::span<const double> psi, double phi, std::span<double> dpsi, double& dphi) const {
  frag_apply(chain_, psi, beta_, dpsi);
  double prev = 0.0;  // psi(r0) = 0
  for (std::size_t k = 0; k < psi.size(); ++k) {
    dpsi[k] -= phi * speeds_[k] * (psi[k] - prev);
    prev = psi[k];
  }
  dphi = monomer_gain(chain_, psi, beta_) - phi * polymer_sink_coefficient(psi, sink_w_);
}

double ZeroDimModel::invariant(const ZeroDimState& s) const { return s.phi + moment(s.psi, m1_w_); }

ZeroDimSample ZeroDimModel::sample(const ZeroDimState& s) const {
  const double m1 = moment(s.psi, m1_w_);
  return {s.t, s.phi, moment(s.psi, m0_w_), m1, s.phi + m1};
}

double ZeroDimModel::dt_limit(double phi, double cfl) const {
  const double a = *std::max_element(speeds_.begin(), speeds_.end());
  return phi * a > 0.0 ? cfl / (phi * a) : INFINITY;
}

void ZeroDimModel::step(ZeroDimState& s, double dt) const {
  const std::size_t n = s.psi.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  double p1, p2, p3, p4;
  rhs(s.psi, s.phi, k1, p1);
  for (std::size_t k = 0; k < n; ++k) tmp[k] = s.psi[k] + 0.5 * dt * k1[k];
  rhs(tmp, s.phi + 0.5 * dt * p1, k2, p2);
  for (std::size_t k = 0; k < n; ++k) tmp[k] = s.psi[k] + 0.5 * dt * k2[k];
  rhs(tmp, s.phi + 0.5 * dt * p2, k3, p3);
  for (std::size_t k = 0; k < n; ++k) tmp[k] = s.psi[k] + dt * k3[k];
  rhs(tmp, s.phi + dt * p3, k4, p4);
  for (std::size_t k = 0; k < n; ++k) s.psi[k] += dt / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
  s.phi += dt / 6.0 * (p1 + 2.0 * p2 + 2.0 * p3 + p4);
  s.t += dt;
}

std::vector<ZeroDimSample> ZeroDimModel::integrate(ZeroDimState& s, double t_final, double dt, int every,
                                                   double cfl) const {
  if (!(dt > 0.0)) throw std::invalid_argument("ZeroDimModel::integrate: dt must be positive");
  if (s.psi.size() != static_cast<std::size_t>(chain_.size()))
    throw std::invalid_argument("ZeroDimModel::integrate: psi does not match the chain grid");
  std::vector<ZeroDimSample> out{sample(s)};
  const double t_end = s.t + t_final;
  const auto steps = static_cast<long>(std::ceil(t_final / dt - 1e-9));
  for (long n = 0; n < steps; ++n) {
    const double h = std::min(dt, t_end - s.t);
    const double limit = dt_limit(s.phi, cfl);
    if (h > limit) {
      std::ostringstream os;
      os << "zero-dim RK4: dt=" << h << " exceeds the growth CFL limit " << limit << " at t=" << s.t;
      throw CflViolation(os.str(), limit);
    }
    step(s, h);
    if ((n + 1) % every == 0 || n + 1 == steps) out.push_back(sample(s));
  }
  return out;
}

}  // namespace pflow
