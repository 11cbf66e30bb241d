#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "pflow/errors.hpp"
#include "pflow/initial.hpp"
#include "pflow/phi_solver.hpp"
#include "pflow/psi_solver.hpp"
#include "pflow/transport.hpp"

using namespace pflow;

namespace {

struct Setup {
  SpatialGrid g;
  ChainGrid chain;
  ModelCoefficients coeffs;
  PsiSolver solver;
  Setup(int nx, int ny, Boundary bx, Boundary by, const CoefficientParams& p = {}, int nr = 48)
      : g(nx, ny, 1.0, 1.0, bx, by),
        chain(p.r0, 30.0, nr, Stretching::geometric),
        coeffs(make_default_coefficients(p)),
        solver(g, chain, coeffs) {}

  PsiField random_psi(std::uint64_t seed, bool uniform_in_x = false) const {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    PsiField psi(g.cells(), chain.size());
    for (int c = 0; c < g.cells(); ++c)
      for (int k = 0; k < chain.size(); ++k) {
        const double v = uniform_in_x && c > 0 ? psi.slice(0)[static_cast<std::size_t>(k)] : u(rng);
        psi.slice(static_cast<std::size_t>(c))[static_cast<std::size_t>(k)] = v;
      }
    return psi;
  }

  KineticRates constant_rates(double beta) const {
    return {std::vector<double>(static_cast<std::size_t>(g.cells() * chain.size()), beta)};
  }

  KineticRates model_rates(const VelocityField& v) const {
    const auto s = compute_stress_field(g, coeffs, make_center_field(g), v);
    return solver.rates(v, s);
  }
};

Field2D random_field(const SpatialGrid& g, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Field2D f = make_center_field(g);
  for (double& x : f.data) x = u(rng);
  return f;
}

VelocityField uniform_velocity(const SpatialGrid& g, double ux, double uy) {
  VelocityField v = make_velocity(g);
  std::fill(v.u.data.begin(), v.u.data.end(), ux);
  std::fill(v.w.data.begin(), v.w.data.end(), uy);
  return v;
}

}  // namespace

TEST_CASE("chain field is unchanged without generators") {
  CoefficientParams p;
  p.beta0 = 0.0;
  const Setup s(6, 5, Boundary::periodic, Boundary::slip_wall, p);
  PsiField psi = s.random_psi(1, true);
  const PsiField before = psi;
  const Field2D phi = make_center_field(s.g, 0.0);
  for (int n = 0; n < 5; ++n) step_psi(s.solver, psi, phi, s.constant_rates(0.0), make_velocity(s.g), 0.05);
  CHECK(psi.values == before.values);
}

TEST_CASE("growth step moves M1 by phi times the sink coefficient") {
  CoefficientParams p;
  p.beta0 = 0.0;
  const Setup s(3, 3, Boundary::periodic, Boundary::periodic, p);
  PsiField psi = s.random_psi(2);
  const Field2D phi = random_field(s.g, 3, 0.5, 2.0);
  const auto rates = s.constant_rates(0.0);
  const double dt = 0.5 * s.solver.kinetic_dt_limit(phi, rates, 1.0);
  const auto m1w = moment_weights(s.chain, 1.0);
  std::vector<double> before(static_cast<std::size_t>(s.g.cells())), expected(before.size());
  for (std::size_t c = 0; c < before.size(); ++c) {
    const auto sl = psi.slice(c);
    before[c] = moment(sl, m1w);
    const double outflow = s.chain.r_inf() * s.coeffs.tau(s.chain.r_inf()) * sl.back();
    expected[c] = dt * phi.data[c] * (polymer_sink_coefficient(sl, s.solver.sink_weights()) - outflow);
  }
  s.solver.kinetic_step(psi, phi, rates, dt);
  for (std::size_t c = 0; c < before.size(); ++c)
    CHECK(moment(psi.slice(c), m1w) - before[c] == doctest::Approx(expected[c]).epsilon(1e-11));
}

TEST_CASE("uniform translation of an x-uniform chain field is exact") {
  const Setup s(8, 8, Boundary::periodic, Boundary::periodic);
  PsiField psi = s.random_psi(4, true);
  const PsiField before = psi;
  const auto v = uniform_velocity(s.g, 0.7, -0.4);
  for (int n = 0; n < 10; ++n) s.solver.transport_step(psi, v, 0.05);
  for (std::size_t k = 0; k < psi.values.size(); ++k)
    CHECK(std::abs(psi.values[k] - before.values[k]) <= 1e-13 * before.values[k] + 1e-300);
}

TEST_CASE("x-advection conserves every r-slice") {
  const Setup s(12, 10, Boundary::slip_wall, Boundary::slip_wall);
  PsiField psi = s.random_psi(5);
  const auto v = initial_velocity(s.g, VelocityInit::random, 1.0, 9);
  const double dt = 0.9 / advective_courant(s.g, v, 1.0);
  std::vector<double> out(psi.values.size());
  advect_upwind(s.g, v, dt, psi.nr, psi.values, out);
  for (int k = 0; k < psi.nr; ++k) {
    double a = 0.0, b = 0.0;
    for (int c = 0; c < psi.cells; ++c) {
      a += psi.values[static_cast<std::size_t>(c * psi.nr + k)];
      b += out[static_cast<std::size_t>(c * psi.nr + k)];
    }
    CHECK(b == doctest::Approx(a).epsilon(1e-13));
  }
  for (double x : out) CHECK(x >= 0.0);
}

TEST_CASE("diffusion obeys the discrete maximum principle in both regimes") {
  const SpatialGrid g(10, 10, 1.0, 1.0, Boundary::slip_wall, Boundary::periodic);
  for (double dt : {1e-3, 1.0}) {
    Field2D f = random_field(g, 6, 0.2, 3.0);
    const auto [lo, hi] = std::minmax_element(f.data.begin(), f.data.end());
    const double mn = *lo, mx = *hi;
    double sum0 = 0.0;
    for (double x : f.data) sum0 += x;
    const std::vector<double> coeff{0.1};
    const auto info = diffuse(g, dt, coeff, f.data);
    CHECK(info.implicit_components == (diffusion_number(g, dt, 0.1) > 0.9 ? 1 : 0));
    double sum1 = 0.0;
    for (double x : f.data) {
      CHECK(x >= mn - 1e-14);
      CHECK(x <= mx + 1e-14);
      sum1 += x;
    }
    CHECK(sum1 == doctest::Approx(sum0).epsilon(1e-12));
  }
}

TEST_CASE("full chain step preserves positivity at admissible dt") {
  const Setup s(8, 8, Boundary::periodic, Boundary::slip_wall);
  PsiField psi = s.random_psi(7);
  // sparse data stresses the upwind and fragmentation updates
  for (std::size_t k = 0; k < psi.values.size(); k += 3) psi.values[k] = 0.0;
  const Field2D phi = random_field(s.g, 8, 0.0, 20.0);
  const auto v = initial_velocity(s.g, VelocityInit::random, 1.0, 4);
  const auto rates = s.model_rates(v);
  double dt = s.solver.kinetic_dt_limit(phi, rates, 1.0);
  dt = std::min(dt, 1.0 / advective_courant(s.g, v, 1.0));
  for (int n = 0; n < 20; ++n) step_psi(s.solver, psi, phi, rates, v, dt);
  for (double x : psi.values) CHECK(x >= 0.0);
}

TEST_CASE("chain step rejects unstable or invalid input") {
  const Setup s(4, 4, Boundary::periodic, Boundary::periodic);
  PsiField psi = s.random_psi(9);
  const Field2D phi = make_center_field(s.g, 5.0);
  const auto rates = s.constant_rates(0.3);
  const double limit = s.solver.kinetic_dt_limit(phi, rates, 1.0);
  try {
    s.solver.kinetic_step(psi, phi, rates, 2.0 * limit);
    FAIL("expected CflViolation");
  } catch (const CflViolation& e) {
    CHECK(e.required_dt() == doctest::Approx(limit));
  }
  CHECK_THROWS_AS(s.solver.transport_step(psi, uniform_velocity(s.g, 10.0, 0.0), 1.0), CflViolation);
  psi.values[5] = -1e-10;
  CHECK_THROWS_AS(step_psi(s.solver, psi, phi, rates, make_velocity(s.g), 0.1 * limit), InvariantBreach);
  CHECK_NOTHROW(check_nonnegative(std::vector<double>{0.0, -1e-15}, 1e-14, "x"));
  CHECK_THROWS_AS(check_nonnegative(std::vector<double>{0.0, std::nan("")}, 1.0, "x"), InvariantBreach);
}

TEST_CASE("monomer field without chains stays constant") {
  const SpatialGrid g(6, 6, 1.0, 1.0, Boundary::slip_wall, Boundary::slip_wall);
  Field2D phi = make_center_field(g, 2.5);
  const Field2D zero = make_center_field(g);
  for (int n = 0; n < 10; ++n) step_phi(g, make_velocity(g), 0.1, zero, zero, 0.01, phi);
  for (double x : phi.data) CHECK(x == 2.5);
}

TEST_CASE("reaction update matches the linear ODE to first order") {
  const SpatialGrid g(2, 2, 1.0, 1.0, Boundary::periodic, Boundary::periodic);
  const double gain = 0.8, sink = 2.0, phi0 = 3.0, T = 1.0;
  const double exact = (phi0 - gain / sink) * std::exp(-sink * T) + gain / sink;
  std::vector<double> err;
  for (int steps : {50, 100, 200}) {
    Field2D phi = make_center_field(g, phi0);
    const Field2D gf = make_center_field(g, gain), sf = make_center_field(g, sink);
    for (int n = 0; n < steps; ++n) step_phi(g, make_velocity(g), 0.1, gf, sf, T / steps, phi);
    err.push_back(std::abs(phi.data[0] - exact));
  }
  // backward Euler leading term: (dt / 2) T s^2 (phi0 - g/s) e^{-sT}
  const double lead = 0.5 * (T / 200) * T * sink * sink * (phi0 - gain / sink) * std::exp(-sink * T);
  CHECK(err[2] == doctest::Approx(lead).epsilon(0.05));
  CHECK(err[0] / err[1] == doctest::Approx(2.0).epsilon(0.05));
  CHECK(err[1] / err[2] == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("reaction update is positive for any dt and rejects bad coefficients") {
  const SpatialGrid g(3, 3, 1.0, 1.0, Boundary::periodic, Boundary::periodic);
  Field2D phi = random_field(g, 10, 0.0, 1.0);
  const Field2D gain = random_field(g, 11, 0.0, 1.0), sink = random_field(g, 12, 0.0, 50.0);
  react_phi(gain, sink, 1e6, phi);
  for (double x : phi.data) CHECK(x >= 0.0);
  Field2D bad = sink;
  bad.data[4] = -1.0;
  CHECK_THROWS_AS(react_phi(gain, bad, 0.1, phi), InvariantBreach);
  bad = gain;
  bad.data[0] = -1e-3;
  CHECK_THROWS_AS(react_phi(bad, sink, 0.1, phi), InvariantBreach);
}

TEST_CASE("monomer maximum principle with phi0 above K^2") {
  const Setup s(8, 8, Boundary::periodic, Boundary::slip_wall);
  const double level = 25.0;  // above K^2 = 16
  Field2D phi = make_center_field(s.g, level);
  PsiField psi = s.random_psi(13);
  for (double& x : psi.values) x *= 5.0;
  const auto v = initial_velocity(s.g, VelocityInit::random, 1.0, 2);
  const auto rates = s.model_rates(v);
  Field2D gain = make_center_field(s.g), sink = make_center_field(s.g);
  for (int n = 0; n < 30; ++n) {
    const double dt = 0.9 * std::min(s.solver.kinetic_dt_limit(phi, rates, 1.0), 1.0 / advective_courant(s.g, v, 1.0));
    s.solver.reaction_coefficients(psi, rates, dt, gain, sink);
    for (std::size_t c = 0; c < gain.size(); ++c) CHECK(gain.data[c] <= 16.0 * sink.data[c] * (1.0 + 1e-12));
    step_phi(s.g, v, s.coeffs.A0, gain, sink, dt, phi);
    step_psi(s.solver, psi, phi, rates, v, dt);
    for (double x : phi.data) {
      CHECK(x <= level);
      CHECK(x >= 0.0);
    }
  }
}

TEST_CASE("truncation guard") {
  const SpatialGrid g(2, 2, 1.0, 1.0, Boundary::periodic, Boundary::periodic);
  Field2D phi = make_center_field(g);
  phi.data = {0.5, 2.0, 3.0, 1.0};
  Field2D copy = phi;
  CHECK(truncate_phi(0.0, copy) == 0);
  CHECK(copy.data == phi.data);
  CHECK(truncate_phi(1.5, copy) == 2);
  CHECK(copy.data == std::vector<double>{0.5, 1.5, 1.5, 1.0});
}
