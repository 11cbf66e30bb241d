#include "pflow/initial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "pflow/errors.hpp"

namespace pflow {

namespace {

constexpr std::array<double, 5> kNodes = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                          0.9061798459386640};
constexpr std::array<double, 5> kWeights = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                            0.4786286704993665, 0.2369268850561891};

template <class F>
double integrate(F&& f, double a, double b, int panels) {
  double sum = 0.0;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (std::size_t q = 0; q < kNodes.size(); ++q) sum += 0.5 * h * kWeights[q] * f(mid + 0.5 * h * kNodes[q]);
  }
  return sum;
}

double wavenumber(double L, Boundary bc, int m) {
  return (bc == Boundary::periodic ? 2.0 : 1.0) * std::numbers::pi * m / L;
}

}  // namespace

VelocityField initial_velocity(const SpatialGrid& g, VelocityInit kind, double amplitude, std::uint64_t seed) {
  VelocityField v = make_velocity(g);
  if (kind == VelocityInit::rest || amplitude == 0.0) return v;
  const int nx = g.nx(), ny = g.ny();
  const double dx = g.dx(), dy = g.dy();
  Field2D s = make_node_field(g);

  if (kind == VelocityInit::random) {
    std::mt19937_64 rng(seed ^ 0x5eedf1e1dULL);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int m = 1; m <= 3; ++m)
      for (int n = 1; n <= 3; ++n) {
        const double a = uni(rng) / (m * m + n * n);
        const double kx = wavenumber(g.lx(), g.bx(), m), ky = wavenumber(g.ly(), g.by(), n);
        for (int j = 0; j <= ny; ++j)
          for (int i = 0; i <= nx; ++i) s(i, j) += a * std::sin(kx * i * dx) * std::sin(ky * j * dy) / ky;
      }
  } else {
    const int m = kind == VelocityInit::cellular ? 2 : 1;
    const double kx = 2.0 * std::numbers::pi * m / g.lx(), ky = 2.0 * std::numbers::pi * m / g.ly();
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i) s(i, j) = std::sin(kx * i * dx) * std::sin(ky * j * dy) / ky;
  }

  for (int j = 0; j < ny; ++j)
    for (int i = 0; i <= nx; ++i) v.u(i, j) = (s(i, j + 1) - s(i, j)) / dy;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i < nx; ++i) v.w(i, j) = -(s(i + 1, j) - s(i, j)) / dx;
  // walls: the streamfunction vanishes there, so normal components are zero up to roundoff
  if (!g.periodic_x())
    for (int j = 0; j < ny; ++j) v.u(0, j) = v.u(nx, j) = 0.0;
  if (!g.periodic_y())
    for (int i = 0; i < nx; ++i) v.w(i, 0) = v.w(i, ny) = 0.0;
  sync_periodic_u(g, v.u);
  sync_periodic_w(g, v.w);

  double scale = amplitude;
  if (kind == VelocityInit::random) {
    const double m = max_speed(g, v);
    scale = m > 0.0 ? amplitude / m : 0.0;
  }
  for (double& x : v.u.data) x *= scale;
  for (double& x : v.w.data) x *= scale;
  return v;
}

Field2D spatial_pattern(const SpatialGrid& g, Pattern kind, std::uint64_t seed) {
  Field2D p = make_center_field(g);
  const double dx = g.dx(), dy = g.dy();
  switch (kind) {
    case Pattern::constant:
      break;
    case Pattern::gaussian: {
      const double sigma = 0.15 * std::min(g.lx(), g.ly());
      for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
          const double x = (i + 0.5) * dx - 0.5 * g.lx(), y = (j + 0.5) * dy - 0.5 * g.ly();
          p(i, j) = std::exp(-(x * x + y * y) / (2.0 * sigma * sigma));
        }
      break;
    }
    case Pattern::random: {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> uni(0.0, 1.0);
      for (double& x : p.data) x = uni(rng);
      for (int pass = 0; pass < 3; ++pass) {
        Field2D q = p;
        for (int j = 0; j < g.ny(); ++j)
          for (int i = 0; i < g.nx(); ++i) {
            double s = 4.0 * p(i, j);
            int n = 4;
            if (g.periodic_x() || i > 0) s += p(g.wrap_x(i - 1), j), ++n;
            if (g.periodic_x() || i < g.nx() - 1) s += p(g.wrap_x(i + 1), j), ++n;
            if (g.periodic_y() || j > 0) s += p(i, g.wrap_y(j - 1)), ++n;
            if (g.periodic_y() || j < g.ny() - 1) s += p(i, g.wrap_y(j + 1)), ++n;
            q(i, j) = s / n;
          }
        p = std::move(q);
      }
      const auto [lo, hi] = std::minmax_element(p.data.begin(), p.data.end());
      const double a = *lo, b = *hi;
      for (double& x : p.data) x = b > a ? (x - a) / (b - a) : 0.0;
      break;
    }
  }
  return p;
}

Field2D initial_phi(const SpatialGrid& g, const InitialConfig& init) {
  Field2D p = spatial_pattern(g, init.phi, init.seed);
  for (double& x : p.data) x = init.phi_level + init.phi_amplitude * x;
  return p;
}

std::function<double(double)> psi_profile(const InitialConfig& init, double r0) {
  const double s = init.psi_scale;
  switch (init.psi_shape) {
    case PsiShape::exponential:
      return [=](double r) { return r < r0 ? 0.0 : std::exp(-(r - r0) / s) / s; };
    case PsiShape::gamma:
      return [=](double r) { return r < r0 ? 0.0 : (r - r0) / s * std::exp(-(r - r0) / s) / s; };
    case PsiShape::box:
      return [=](double r) { return r < r0 || r > r0 + s ? 0.0 : 1.0 / s; };
  }
  return [](double) { return 0.0; };
}

std::vector<double> initial_psi_profile(const ChainGrid& chain, const InitialConfig& init) {
  const auto f = psi_profile(init, chain.r0());
  std::vector<double> shape(static_cast<std::size_t>(chain.size()));
  for (int k = 0; k < chain.size(); ++k) {
    const double a = chain.edge(k), b = chain.edge(k + 1);
    double avg;
    if (init.psi_shape == PsiShape::box) {
      const double top = chain.r0() + init.psi_scale;
      avg = std::max(0.0, std::min(b, top) - a) / (init.psi_scale * (b - a));
    } else {
      avg = integrate(f, a, b, 2) / (b - a);
    }
    shape[static_cast<std::size_t>(k)] = init.psi_number * avg;
  }
  return shape;
}

PsiField initial_psi(const SpatialGrid& g, const ChainGrid& chain, const InitialConfig& init) {
  const auto shape = initial_psi_profile(chain, init);
  const Field2D pat = spatial_pattern(g, init.psi_pattern, init.seed + 1);
  PsiField psi(g.cells(), chain.size());
  for (std::size_t c = 0; c < pat.size(); ++c) {
    const double n = 1.0 + init.psi_amplitude * pat.data[c];
    auto sl = psi.slice(c);
    for (std::size_t k = 0; k < shape.size(); ++k) sl[k] = n * shape[k];
  }
  return psi;
}

double select_r_inf(const InitialConfig& init, double r0, double theta1) {
  const auto f = psi_profile(init, r0);
  auto weighted = [&](double r) { return std::pow(r, theta1) * f(r); };
  const double far = r0 + 400.0 * init.psi_scale;
  const double total = init.psi_shape == PsiShape::box ? integrate(weighted, r0, r0 + init.psi_scale, 200)
                                                       : integrate(weighted, r0, far, 4000);
  for (double R = 1.05 * std::max(r0, 1e-300); R < 1e9; R *= 1.05) {
    const double a = std::max(0.5 * R, r0);
    if (a >= R) continue;
    double tail;
    if (init.psi_shape == PsiShape::box) {
      const double top = r0 + init.psi_scale;
      tail = a >= top ? 0.0 : integrate(weighted, a, std::min(R, top), 200);
    } else {
      tail = integrate(weighted, a, R, 400);
    }
    if (R > r0 + init.psi_scale && tail < 1e-8 * total) return R;
  }
  throw ConfigError("r_inf selection failed: initial chain profile has no negligible tail");
}

}  // namespace pflow
