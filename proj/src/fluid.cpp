#include "pflow/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pflow/errors.hpp"

namespace pflow {

VelocityField make_velocity(const SpatialGrid& g) { return {make_u_field(g), make_w_field(g)}; }

Vec2 BodyForce::at(const SpatialGrid& g, double x, double y) const {
  switch (kind) {
    case Kind::none:
      return {};
    case Kind::uniform:
      return {fx, fy};
    case Kind::cellular: {
      const double kx = 2.0 * std::numbers::pi / g.lx();
      const double ky = 2.0 * std::numbers::pi / g.ly();
      return {fx * std::sin(kx * x) * std::cos(ky * y), -fx * (kx / ky) * std::cos(kx * x) * std::sin(ky * y)};
    }
  }
  return {};
}

namespace {

// Average of a center quantity over the cells touching node (i, j).
template <class F>
double node_average(const SpatialGrid& g, int i, int j, F&& val) {
  double sum = 0.0;
  int count = 0;
  for (int jj = j - 1; jj <= j; ++jj) {
    int cj = jj;
    if (cj < 0 || cj >= g.ny()) {
      if (!g.periodic_y()) continue;
      cj = g.wrap_y(cj);
    }
    for (int ii = i - 1; ii <= i; ++ii) {
      int ci = ii;
      if (ci < 0 || ci >= g.nx()) {
        if (!g.periodic_x()) continue;
        ci = g.wrap_x(ci);
      }
      sum += val(ci, cj);
      ++count;
    }
  }
  return sum / count;
}

bool on_wall_x(const SpatialGrid& g, int i) { return !g.periodic_x() && (i == 0 || i == g.nx()); }
bool on_wall_y(const SpatialGrid& g, int j) { return !g.periodic_y() && (j == 0 || j == g.ny()); }

// Unique-node weight (fraction of a full cell area) for energy sums.
double node_weight(const SpatialGrid& g, int i, int j) {
  if (g.periodic_x() && i == g.nx()) return 0.0;
  if (g.periodic_y() && j == g.ny()) return 0.0;
  double w = 1.0;
  if (on_wall_x(g, i)) w *= 0.5;
  if (on_wall_y(g, j)) w *= 0.5;
  return w;
}

}  // namespace

StressField compute_stress_field(const SpatialGrid& g, const ModelCoefficients& coeffs,
                                 const Field2D& psi_tilde, const VelocityField& v) {
  const int nx = g.nx(), ny = g.ny();
  const double dx = g.dx(), dy = g.dy();
  const double alpha = coeffs.alpha_star;
  StressField s;
  s.dxx = make_center_field(g);
  s.dyy = make_center_field(g);
  s.sxx = make_center_field(g);
  s.syy = make_center_field(g);
  s.nu_c = make_center_field(g);
  s.shear_c = make_center_field(g);
  s.dxy = make_node_field(g);
  s.sxy = make_node_field(g);
  s.nu_n = make_node_field(g);
  Field2D wall_n = make_node_field(g);
  const auto& u = v.u;
  const auto& w = v.w;

#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      s.dxx(i, j) = (u(i + 1, j) - u(i, j)) / dx;
      s.dyy(i, j) = (w(i, j + 1) - w(i, j)) / dy;
    }

#pragma omp parallel for schedule(static)
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const double psi_n = node_average(g, i, j, [&](int a, int b) { return psi_tilde(a, b); });
      const double cen2 = node_average(g, i, j, [&](int a, int b) {
        return s.dxx(a, b) * s.dxx(a, b) + s.dyy(a, b) * s.dyy(a, b);
      });
      const bool wx = on_wall_x(g, i), wy = on_wall_y(g, j);
      double d = 0.0, nu = 0.0, wall = 0.0;
      if (wx && wy) {
        nu = viscosity(coeffs, psi_n, std::sqrt(cen2));
      } else if (wx || wy) {
        // ghost tangential velocity for Navier slip
        const double h = wy ? dy : dx;
        const double t0 = wy ? u(i, j == 0 ? 0 : ny - 1) : w(i == 0 ? 0 : nx - 1, j);
        const double sign = (wy ? j == 0 : i == 0) ? 1.0 : -1.0;  // +1 on the low wall
        double tw = t0;
        nu = viscosity(coeffs, psi_n, std::sqrt(cen2));
        if (alpha > 0.0) {
          for (int it = 0; it < 4; ++it) {
            tw = t0 * nu / (nu + alpha * h);
            d = sign * (t0 - tw) / h;
            nu = viscosity(coeffs, psi_n, std::sqrt(cen2 + 2.0 * d * d));
          }
          tw = t0 * nu / (nu + alpha * h);
          d = sign * (t0 - tw) / h;
        }
        wall = sign * nu * d * tw * (wy ? dx : dy);
      } else {
        const int ju = g.wrap_y(j), jd = g.wrap_y(j - 1);
        const int iw = g.wrap_x(i), iwm = g.wrap_x(i - 1);
        d = 0.5 * ((u(i, ju) - u(i, jd)) / dy + (w(iw, j) - w(iwm, j)) / dx);
        nu = viscosity(coeffs, psi_n, std::sqrt(cen2 + 2.0 * d * d));
      }
      s.dxy(i, j) = d;
      s.nu_n(i, j) = nu;
      s.sxy(i, j) = nu * d;
      wall_n(i, j) = wall;
    }
  }

#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double n2 = 0.25 * (s.dxy(i, j) * s.dxy(i, j) + s.dxy(i + 1, j) * s.dxy(i + 1, j) +
                                s.dxy(i, j + 1) * s.dxy(i, j + 1) + s.dxy(i + 1, j + 1) * s.dxy(i + 1, j + 1));
      const double shear =
          std::sqrt(s.dxx(i, j) * s.dxx(i, j) + s.dyy(i, j) * s.dyy(i, j) + 2.0 * n2);
      const double nu = viscosity(coeffs, psi_tilde(i, j), shear);
      s.shear_c(i, j) = shear;
      s.nu_c(i, j) = nu;
      s.sxx(i, j) = nu * s.dxx(i, j);
      s.syy(i, j) = nu * s.dyy(i, j);
    }

  const double da = g.cell_area();
  double diss = 0.0, wall = 0.0, nu_max = 0.0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      diss += (s.sxx(i, j) * s.dxx(i, j) + s.syy(i, j) * s.dyy(i, j)) * da;
      nu_max = std::max(nu_max, s.nu_c(i, j));
    }
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      const double wgt = node_weight(g, i, j);
      if (wgt == 0.0) continue;
      diss += 2.0 * s.sxy(i, j) * s.dxy(i, j) * wgt * da;
      wall += wall_n(i, j);
      nu_max = std::max(nu_max, s.nu_n(i, j));
    }
  s.dissipation = diss;
  s.wall = wall;
  s.nu_max = nu_max;
  return s;
}

double kinetic_energy(const SpatialGrid& g, const VelocityField& v) {
  double e = 0.0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < u_faces_x(g); ++i) e += v.u(i, j) * v.u(i, j);
  for (int j = 0; j < w_faces_y(g); ++j)
    for (int i = 0; i < g.nx(); ++i) e += v.w(i, j) * v.w(i, j);
  return 0.5 * e * g.cell_area();
}

double force_power(const SpatialGrid& g, const BodyForce& f, const VelocityField& v) {
  if (f.kind == BodyForce::Kind::none) return 0.0;
  const double dx = g.dx(), dy = g.dy();
  double p = 0.0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < u_faces_x(g); ++i) p += f.at(g, i * dx, (j + 0.5) * dy).x * v.u(i, j);
  for (int j = 0; j < w_faces_y(g); ++j)
    for (int i = 0; i < g.nx(); ++i) p += f.at(g, (i + 0.5) * dx, j * dy).y * v.w(i, j);
  return p * g.cell_area();
}

double max_speed(const SpatialGrid&, const VelocityField& v) {
  double m = 0.0;
  for (double x : v.u.data) m = std::max(m, std::abs(x));
  for (double x : v.w.data) m = std::max(m, std::abs(x));
  return m;
}

void divergence(const SpatialGrid& g, const VelocityField& v, Field2D& out) {
  const double dx = g.dx(), dy = g.dy();
#pragma omp parallel for schedule(static)
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i)
      out(i, j) = (v.u(i + 1, j) - v.u(i, j)) / dx + (v.w(i, j + 1) - v.w(i, j)) / dy;
}

double relative_divergence(const SpatialGrid& g, const VelocityField& v) {
  const double vmax = max_speed(g, v);
  if (vmax == 0.0) return 0.0;
  Field2D d = make_center_field(g);
  divergence(g, v, d);
  double m = 0.0;
  for (double x : d.data) m = std::max(m, std::abs(x));
  return m * g.h_min() / vmax;
}

Vec2 center_velocity(const SpatialGrid&, const VelocityField& v, int i, int j) {
  return {0.5 * (v.u(i, j) + v.u(i + 1, j)), 0.5 * (v.w(i, j) + v.w(i, j + 1))};
}

namespace {

// -div(v (x) v) + div S + f on the independent interior faces.
void explicit_rhs(const SpatialGrid& g, const StressField& s, const BodyForce& force, const VelocityField& v,
                  Field2D& fu, Field2D& fw) {
  const int nx = g.nx(), ny = g.ny();
  const double dx = g.dx(), dy = g.dy();
  const auto& u = v.u;
  const auto& w = v.w;

  // u w at nodes
  Field2D uw = make_node_field(g);
#pragma omp parallel for schedule(static)
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      if (on_wall_x(g, i) || on_wall_y(g, j)) continue;
      const double ub = 0.5 * (u(i, g.wrap_y(j - 1)) + u(i, g.wrap_y(j)));
      const double wb = 0.5 * (w(g.wrap_x(i - 1), j) + w(g.wrap_x(i), j));
      uw(i, j) = ub * wb;
    }

  const int i0 = g.periodic_x() ? 0 : 1;
  const int j0 = g.periodic_y() ? 0 : 1;
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j)
    for (int i = i0; i < nx; ++i) {
      const int il = g.wrap_x(i - 1);
      const double ur = 0.5 * (u(i, j) + u(i + 1, j));
      const double ul = 0.5 * (u(il, j) + u(il + 1, j));
      const double adv = (ur * ur - ul * ul) / dx + (uw(i, j + 1) - uw(i, j)) / dy;
      const double divs = (s.sxx(i, j) - s.sxx(il, j)) / dx + (s.sxy(i, j + 1) - s.sxy(i, j)) / dy;
      fu(i, j) = -adv + divs + force.at(g, i * dx, (j + 0.5) * dy).x;
    }
#pragma omp parallel for schedule(static)
  for (int j = j0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int jb = g.wrap_y(j - 1);
      const double wt = 0.5 * (w(i, j) + w(i, j + 1));
      const double wbm = 0.5 * (w(i, jb) + w(i, jb + 1));
      const double adv = (uw(i + 1, j) - uw(i, j)) / dx + (wt * wt - wbm * wbm) / dy;
      const double divs = (s.sxy(i + 1, j) - s.sxy(i, j)) / dx + (s.syy(i, j) - s.syy(i, jb)) / dy;
      fw(i, j) = -adv + divs + force.at(g, (i + 0.5) * dx, j * dy).y;
    }
}

}  // namespace

FluidStepResult step_fluid(const SpatialGrid& g, const ModelCoefficients& coeffs, const Field2D& psi_tilde,
                           const BodyForce& force, double dt, const StressField& stress_old, VelocityField& v,
                           PressureField& p, FluidHistory& hist, double poisson_tol) {
  const int nx = g.nx(), ny = g.ny();
  const double dx = g.dx(), dy = g.dy();

  const double vmax = max_speed(g, v);
  const double dt_adv = vmax > 0.0 ? g.h_min() / vmax : INFINITY;
  const double lam = 0.5 * stress_old.nu_max * (4.0 / (dx * dx) + 4.0 / (dy * dy));
  const double dt_visc = lam > 0.0 ? 1.0 / lam : INFINITY;
  if (dt > dt_adv || dt > dt_visc) {
    std::ostringstream os;
    os << "fluid step: dt=" << dt << " exceeds the stability limit " << std::min(dt_adv, dt_visc);
    throw CflViolation(os.str(), std::min(dt_adv, dt_visc));
  }

  const double ke_old = kinetic_energy(g, v);
  const double pow_old = force_power(g, force, v);

  Field2D fu = make_u_field(g), fw = make_w_field(g);
  explicit_rhs(g, stress_old, force, v, fu, fw);

  double c1 = 1.0, c0 = 0.0;
  if (hist.valid) {
    c0 = 0.5 * dt / hist.dt;
    c1 = 1.0 + c0;
  }
  VelocityField vs = v;
  for (std::size_t k = 0; k < fu.size(); ++k)
    vs.u.data[k] += dt * (c1 * fu.data[k] - (hist.valid ? c0 * hist.fu.data[k] : 0.0));
  for (std::size_t k = 0; k < fw.size(); ++k)
    vs.w.data[k] += dt * (c1 * fw.data[k] - (hist.valid ? c0 * hist.fw.data[k] : 0.0));
  sync_periodic_u(g, vs.u);
  sync_periodic_w(g, vs.w);

  // projection
  Field2D rhs = make_center_field(g);
  divergence(g, vs, rhs);
  for (double& x : rhs.data) x /= dt;
  if (p.q.size() != rhs.size()) p.q = make_center_field(g);
  PoissonSolver solver(g);
  const PoissonResult pr = solver.solve(rhs, p.q, poisson_tol);
  const auto& q = p.q;
  const int i0 = g.periodic_x() ? 0 : 1;
  const int j0 = g.periodic_y() ? 0 : 1;
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j)
    for (int i = i0; i < nx; ++i) vs.u(i, j) -= dt * (q(i, j) - q(g.wrap_x(i - 1), j)) / dx;
#pragma omp parallel for schedule(static)
  for (int j = j0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) vs.w(i, j) -= dt * (q(i, j) - q(i, g.wrap_y(j - 1))) / dy;
  sync_periodic_u(g, vs.u);
  sync_periodic_w(g, vs.w);
  v = std::move(vs);

  hist.fu = std::move(fu);
  hist.fw = std::move(fw);
  hist.dt = dt;
  hist.valid = true;

  FluidStepResult res;
  res.poisson_iterations = pr.iterations;
  res.poisson_residual = pr.residual;
  res.divergence = relative_divergence(g, v);
  res.stress = compute_stress_field(g, coeffs, psi_tilde, v);
  auto& e = res.energy;
  e.kinetic = kinetic_energy(g, v);
  e.dissipation = res.stress.dissipation;
  e.wall = res.stress.wall;
  e.power = force_power(g, force, v);
  e.residual = (e.kinetic - ke_old) / dt + 0.5 * (stress_old.dissipation + e.dissipation) +
               0.5 * (stress_old.wall + e.wall) - 0.5 * (pow_old + e.power);
  return res;
}

}  // namespace pflow
