#include "pflow/phi_solver.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "pflow/errors.hpp"

namespace pflow {

PhiStepInfo transport_phi(const SpatialGrid& g, const VelocityField& v, double A0, double dt, Field2D& phi) {
  PhiStepInfo info;
  info.courant = advective_courant(g, v, dt);
  if (info.courant > 1.0) {
    std::ostringstream os;
    os << "monomer advection: Courant number " << info.courant << " > 1";
    throw CflViolation(os.str(), dt / info.courant);
  }
  std::vector<double> tmp(phi.size());
  advect_upwind(g, v, dt, 1, phi.data, tmp);
  phi.data.swap(tmp);
  const double coeff[1] = {A0};
  info.diffusion = diffuse(g, dt, coeff, phi.data);
  return info;
}

void react_phi(const Field2D& gain, const Field2D& sink, double dt, Field2D& phi) {
  for (std::size_t c = 0; c < phi.size(); ++c) {
    if (!(sink.data[c] >= 0.0) || !(gain.data[c] >= 0.0)) {
      std::ostringstream os;
      os << "monomer reaction: negative rate in cell " << c << " (gain " << gain.data[c] << ", sink "
         << sink.data[c] << ")";
      throw InvariantBreach(os.str());
    }
    phi.data[c] = (phi.data[c] + dt * gain.data[c]) / (1.0 + dt * sink.data[c]);
  }
}

PhiStepInfo step_phi(const SpatialGrid& g, const VelocityField& v, double A0, const Field2D& gain,
                     const Field2D& sink, double dt, Field2D& phi) {
  auto info = transport_phi(g, v, A0, dt, phi);
  react_phi(gain, sink, dt, phi);
  return info;
}

int truncate_phi(double k, Field2D& phi) {
  if (!(k > 0.0)) return 0;
  int active = 0;
  for (double& x : phi.data) {
    if (std::abs(x) > k) {
      x = std::copysign(k, x);
      ++active;
    }
  }
  return active;
}

}  // namespace pflow
