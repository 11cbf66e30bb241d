#include "pflow/transport.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "pflow/errors.hpp"

namespace pflow {

namespace {
// margin below the monotonicity limit 1 so the center weight stays clear of roundoff
constexpr double kExplicitDiffusionLimit = 0.9;
}  // namespace

void advect_upwind(const SpatialGrid& g, const VelocityField& v, double dt, int ncomp,
                   std::span<const double> in, std::span<double> out) {
  const int nx = g.nx(), ny = g.ny();
  const double cx = dt / g.dx(), cy = dt / g.dy();
  const auto n = static_cast<std::size_t>(ncomp);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t c = g.cell(i, j) * n;
      const double* pc = &in[c];
      double* po = &out[c];
      for (std::size_t k = 0; k < n; ++k) po[k] = pc[k];

      const bool east = g.periodic_x() || i < nx - 1;
      const bool west = g.periodic_x() || i > 0;
      const bool north = g.periodic_y() || j < ny - 1;
      const bool south = g.periodic_y() || j > 0;
      if (east) {
        const double ue = v.u(i + 1, j);
        const double* pe = &in[g.cell(g.wrap_x(i + 1), j) * n];
        const double a = std::max(ue, 0.0) * cx, b = std::min(ue, 0.0) * cx;
        for (std::size_t k = 0; k < n; ++k) po[k] -= a * pc[k] + b * pe[k];
      }
      if (west) {
        const double uw = v.u(i, j);
        const double* pw = &in[g.cell(g.wrap_x(i - 1), j) * n];
        const double a = std::max(uw, 0.0) * cx, b = std::min(uw, 0.0) * cx;
        for (std::size_t k = 0; k < n; ++k) po[k] += a * pw[k] + b * pc[k];
      }
      if (north) {
        const double wn = v.w(i, j + 1);
        const double* pn = &in[g.cell(i, g.wrap_y(j + 1)) * n];
        const double a = std::max(wn, 0.0) * cy, b = std::min(wn, 0.0) * cy;
        for (std::size_t k = 0; k < n; ++k) po[k] -= a * pc[k] + b * pn[k];
      }
      if (south) {
        const double ws = v.w(i, j);
        const double* ps = &in[g.cell(i, g.wrap_y(j - 1)) * n];
        const double a = std::max(ws, 0.0) * cy, b = std::min(ws, 0.0) * cy;
        for (std::size_t k = 0; k < n; ++k) po[k] += a * ps[k] + b * pc[k];
      }
    }
  }
}

double advective_courant(const SpatialGrid& g, const VelocityField& v, double dt) {
  double m = 0.0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const double out = (std::max(v.u(i + 1, j), 0.0) - std::min(v.u(i, j), 0.0)) / g.dx() +
                         (std::max(v.w(i, j + 1), 0.0) - std::min(v.w(i, j), 0.0)) / g.dy();
      m = std::max(m, out);
    }
  return dt * m;
}

double diffusion_number(const SpatialGrid& g, double dt, double coeff) {
  return dt * coeff * (2.0 / (g.dx() * g.dx()) + 2.0 / (g.dy() * g.dy()));
}

namespace {

// neighbor list for cell (i, j); has[d] is false across a wall
struct Neighbors {
  std::size_t c;
  std::size_t nb[4];
  bool has[4];
};

std::vector<Neighbors> neighbor_table(const SpatialGrid& g) {
  std::vector<Neighbors> t(static_cast<std::size_t>(g.cells()));
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      auto& e = t[g.cell(i, j)];
      e.c = g.cell(i, j);
      e.has[0] = g.periodic_x() || i > 0;
      e.has[1] = g.periodic_x() || i < g.nx() - 1;
      e.has[2] = g.periodic_y() || j > 0;
      e.has[3] = g.periodic_y() || j < g.ny() - 1;
      e.nb[0] = g.cell(g.wrap_x(i - 1), j);
      e.nb[1] = g.cell(g.wrap_x(i + 1), j);
      e.nb[2] = g.cell(i, g.wrap_y(j - 1));
      e.nb[3] = g.cell(i, g.wrap_y(j + 1));
    }
  return t;
}

}  // namespace

DiffusionInfo diffuse(const SpatialGrid& g, double dt, std::span<const double> coeff, std::span<double> data) {
  const auto n = coeff.size();
  const double ix2 = 1.0 / (g.dx() * g.dx()), iy2 = 1.0 / (g.dy() * g.dy());
  const double inv[4] = {ix2, ix2, iy2, iy2};
  const auto nbs = neighbor_table(g);

  std::vector<char> implicit(n, 0);
  DiffusionInfo info;
  for (std::size_t k = 0; k < n; ++k)
    if (diffusion_number(g, dt, coeff[k]) > kExplicitDiffusionLimit) {
      implicit[k] = 1;
      ++info.implicit_components;
    }

  const std::vector<double> old(data.begin(), data.end());
#pragma omp parallel for schedule(static)
  for (std::size_t e = 0; e < nbs.size(); ++e) {
    const auto& cell = nbs[e];
    const double* pc = &old[cell.c * n];
    double* po = &data[cell.c * n];
    for (int d = 0; d < 4; ++d) {
      if (!cell.has[d]) continue;
      const double* pn = &old[cell.nb[d] * n];
      for (std::size_t k = 0; k < n; ++k)
        if (!implicit[k]) po[k] += dt * coeff[k] * inv[d] * (pn[k] - pc[k]);
    }
  }
  if (info.implicit_components == 0) return info;

  // backward Euler for the stiff components, Gauss-Seidel from the old values
  for (std::size_t k = 0; k < n; ++k) {
    if (!implicit[k]) continue;
    const double a = dt * coeff[k];
    double scale = 0.0;
    for (const auto& cell : nbs) scale = std::max(scale, std::abs(old[cell.c * n + k]));
    if (scale == 0.0) continue;
    int sweep = 0;
    for (;; ++sweep) {
      double change = 0.0;
      for (const auto& cell : nbs) {
        double diag = 1.0, off = 0.0;
        for (int d = 0; d < 4; ++d) {
          if (!cell.has[d]) continue;
          diag += a * inv[d];
          off += a * inv[d] * data[cell.nb[d] * n + k];
        }
        const double x = (old[cell.c * n + k] + off) / diag;
        change = std::max(change, std::abs(x - data[cell.c * n + k]));
        data[cell.c * n + k] = x;
      }
      if (change <= 1e-15 * scale) break;
      if (sweep > 200000) throw SolverError("implicit diffusion: Gauss-Seidel stalled", sweep, change / scale);
    }
    info.sweeps += sweep + 1;
  }
  return info;
}

}  // namespace pflow
