#include "pflow/psi_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pflow/errors.hpp"

namespace pflow {

PsiSolver::PsiSolver(const SpatialGrid& g, const ChainGrid& chain, const ModelCoefficients& coeffs)
    : grid_(g), chain_(chain), coeffs_(coeffs) {
  speeds_ = pflow::growth_speeds(chain_, coeffs_.tau);
  sink_w_ = pflow::sink_weights(chain_, coeffs_.tau);
  gamma_w_ = pflow::gamma_weights(chain_, coeffs_.gamma);
  diff_.resize(static_cast<std::size_t>(chain_.size()));
  for (int k = 0; k < chain_.size(); ++k) diff_[static_cast<std::size_t>(k)] = coeffs_.A(chain_.center(k));
}

KineticRates PsiSolver::rates(const VelocityField& v, const StressField& s) const {
  const auto nr = static_cast<std::size_t>(chain_.size());
  KineticRates out;
  out.beta.resize(static_cast<std::size_t>(grid_.cells()) * nr);
  const auto r = chain_.centers();
#pragma omp parallel for schedule(static)
  for (int j = 0; j < grid_.ny(); ++j)
    for (int i = 0; i < grid_.nx(); ++i) {
      const Vec2 vc = center_velocity(grid_, v, i, j);
      const double dxy = 0.25 * (s.dxy(i, j) + s.dxy(i + 1, j) + s.dxy(i, j + 1) + s.dxy(i + 1, j + 1));
      const SymTensor2 d{s.dxx(i, j), dxy, s.dyy(i, j)};
      double* b = &out.beta[grid_.cell(i, j) * nr];
      for (std::size_t k = 0; k < nr; ++k) b[k] = coeffs_.beta(r[k], vc, d);
    }
  return out;
}

double PsiSolver::kinetic_dt_limit(const Field2D& phi, const KineticRates& rates, double cfl) const {
  const auto nr = static_cast<std::size_t>(chain_.size());
  double rate = 0.0;
  for (std::size_t c = 0; c < phi.size(); ++c) {
    const double f = phi.data[c];
    const double* b = &rates.beta[c * nr];
    for (std::size_t k = 0; k < nr; ++k) rate = std::max(rate, f * speeds_[k] + b[k]);
  }
  return rate > 0.0 ? cfl / rate : INFINITY;
}

void PsiSolver::average(const PsiField& psi, Field2D& psi_tilde) const {
#pragma omp parallel for schedule(static)
  for (int c = 0; c < psi.cells; ++c)
    psi_tilde.data[static_cast<std::size_t>(c)] =
        weighted_average(psi.slice(static_cast<std::size_t>(c)), gamma_w_);
}

void PsiSolver::reaction_coefficients(const PsiField& psi, const KineticRates& rates, double dt, Field2D& gain,
                                      Field2D& sink) const {
  const auto nr = static_cast<std::size_t>(chain_.size());
#pragma omp parallel for schedule(static)
  for (int ci = 0; ci < psi.cells; ++ci) {
    const auto c = static_cast<std::size_t>(ci);
    std::vector<double> be(nr);
    for (std::size_t k = 0; k < nr; ++k) be[k] = -std::expm1(-rates.beta[c * nr + k] * dt) / dt;
    gain.data[c] = monomer_gain(chain_, psi.slice(c), be);
    sink.data[c] = polymer_sink_coefficient(psi.slice(c), sink_w_);
  }
}

void PsiSolver::kinetic_step(PsiField& psi, const Field2D& phi, const KineticRates& rates, double dt) const {
  const auto nr = static_cast<std::size_t>(chain_.size());
  const double limit = kinetic_dt_limit(phi, rates, 1.0);
  if (dt > limit) {
    std::ostringstream os;
    os << "chain growth/fragmentation: dt=" << dt << " exceeds the positivity limit " << limit;
    throw CflViolation(os.str(), limit);
  }
#pragma omp parallel for schedule(static)
  for (int ci = 0; ci < psi.cells; ++ci) {
    const auto c = static_cast<std::size_t>(ci);
    std::vector<double> be(nr), gain(nr);
    const double* b = &rates.beta[c * nr];
    for (std::size_t k = 0; k < nr; ++k) be[k] = -std::expm1(-b[k] * dt) / dt;
    auto p = psi.slice(c);
    frag_gain(chain_, p, be, gain);
    const double f = phi.data[c];
    double prev = 0.0;  // zero inflow at r0
    for (std::size_t k = 0; k < nr; ++k) {
      const double cur = p[k];
      p[k] = std::exp(-b[k] * dt) * cur - dt * f * speeds_[k] * (cur - prev) + dt * gain[k];
      prev = cur;
    }
  }
}

PsiTransportInfo PsiSolver::transport_step(PsiField& psi, const VelocityField& v, double dt) const {
  PsiTransportInfo info;
  info.courant = advective_courant(grid_, v, dt);
  if (info.courant > 1.0) {
    std::ostringstream os;
    os << "chain advection: Courant number " << info.courant << " > 1";
    throw CflViolation(os.str(), dt / info.courant);
  }
  std::vector<double> tmp(psi.values.size());
  advect_upwind(grid_, v, dt, psi.nr, psi.values, tmp);
  psi.values.swap(tmp);
  info.diffusion = diffuse(grid_, dt, diff_, psi.values);
  return info;
}

void check_nonnegative(std::span<const double> values, double tol, const char* what) {
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!std::isfinite(values[k]) || values[k] < -tol) {
      std::ostringstream os;
      os << what << ": value " << values[k] << " at index " << k << " violates the minimum principle";
      throw InvariantBreach(os.str());
    }
  }
}

PsiTransportInfo step_psi(const PsiSolver& solver, PsiField& psi, const Field2D& phi, const KineticRates& rates,
                          const VelocityField& v, double dt) {
  check_nonnegative(psi.values, 1e-14, "psi");
  solver.kinetic_step(psi, phi, rates, dt);
  return solver.transport_step(psi, v, dt);
}

}  // namespace pflow
