#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "pflow/diagnostics.hpp"
#include "pflow/psi_solver.hpp"

using namespace pflow;

namespace {

PsiField random_psi(const SpatialGrid& g, const ChainGrid& chain, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PsiField psi(g.cells(), chain.size());
  for (double& x : psi.values) x = u(rng);
  return psi;
}

}  // namespace

TEST_CASE("total mass examples") {
  const SpatialGrid g(4, 4, 1.0, 1.0, Boundary::periodic, Boundary::slip_wall);
  const ChainGrid chain(1.0, 10.0, 30);
  CHECK(total_mass(g, chain, make_center_field(g, 1.0), PsiField(g.cells(), chain.size())) ==
        doctest::Approx(1.0).epsilon(1e-15));

  // unit point mass at r^ in one cell: total = r^ (cell area a times density 1/a)
  PsiField psi(g.cells(), chain.size());
  const int hat = 17;
  psi.slice(g.cell(2, 1))[hat] = 1.0 / (chain.width(hat) * g.cell_area());
  const double e = total_mass(g, chain, make_center_field(g), psi);
  CHECK(e == doctest::Approx(chain.center(hat)).epsilon(1e-14));
  CHECK(e == doctest::Approx(total_moment(g, chain, psi, 1.0)).epsilon(1e-14));
}

TEST_CASE("two independent mass reductions agree") {
  const SpatialGrid g(9, 7, 2.0, 1.5, Boundary::slip_wall, Boundary::periodic);
  const ChainGrid chain(0.5, 40.0, 64, Stretching::geometric);
  const PsiField psi = random_psi(g, chain, 1);
  Field2D phi = make_center_field(g);
  std::mt19937_64 rng(2);
  for (double& x : phi.data) x = std::uniform_real_distribution<double>(0.0, 3.0)(rng);
  const double a = total_mass(g, chain, phi, psi);
  const double b = total_mass_by_moment(g, chain, phi, psi);
  CHECK(std::abs(a - b) <= 1e-13 * a);
  // fixed reduction order: repeated evaluation is bit-identical
  CHECK(total_mass(g, chain, phi, psi) == a);
}

TEST_CASE("moment growth audit") {
  std::vector<double> t(20), m(20);
  for (int k = 0; k < 20; ++k) t[static_cast<std::size_t>(k)] = 0.1 * k;

  SUBCASE("frozen series has zero rate") {
    std::fill(m.begin(), m.end(), 3.0);
    const auto a = moment_growth_audit(t, m, 1.0);
    CHECK(a.rate == 0.0);
    CHECK_FALSE(a.flagged);
  }
  SUBCASE("all-zero series has zero rate") {
    std::fill(m.begin(), m.end(), 0.0);
    CHECK(moment_growth_audit(t, m, 1.0).rate == 0.0);
  }
  SUBCASE("exponential series recovers its rate and is flagged above the ledger") {
    for (std::size_t k = 0; k < m.size(); ++k) m[k] = 2.0 * std::exp(0.7 * t[k]);
    const auto a = moment_growth_audit(t, m, 1.0);
    CHECK(a.rate == doctest::Approx(0.7).epsilon(1e-12));
    CHECK_FALSE(a.flagged);
    CHECK(moment_growth_audit(t, m, 0.5).flagged);
    CHECK(moment_growth_audit(t, m, 0.5).max_excess > 0.0);
  }
  SUBCASE("too few samples") {
    CHECK_THROWS_AS(moment_growth_audit(std::span(t).first(9), std::span(m).first(9), 1.0), std::invalid_argument);
  }
}

TEST_CASE("gronwall constant") {
  CHECK(gronwall_constant(1.0, 4.0) == doctest::Approx(8.0));
  CHECK(gronwall_constant(2.0, 4.0) == doctest::Approx(12.0));
  CHECK(gronwall_constant(0.5, 2.0) == doctest::Approx(2.0 * (1.0 / 3.0 + 1.5)));
}

TEST_CASE("pure polymerization: M1 grows no faster than K max phi") {
  // single spatial cell of a 2x2 periodic grid with identical cells, beta = 0
  CoefficientParams p;
  auto coeffs = make_default_coefficients(p);
  coeffs.beta = [](double, const Vec2&, const SymTensor2&) { return 0.0; };
  const SpatialGrid g(2, 2, 1.0, 1.0, Boundary::periodic, Boundary::periodic);
  const ChainGrid chain(1.0, 200.0, 256, Stretching::geometric);
  const PsiSolver solver(g, chain, coeffs);
  PsiField psi(g.cells(), chain.size());
  for (int c = 0; c < g.cells(); ++c)
    for (int k = 0; k < chain.size(); ++k) {
      const double r = chain.center(k);
      psi.slice(static_cast<std::size_t>(c))[static_cast<std::size_t>(k)] = (r - 1.0) * std::exp(-(r - 1.0));
    }
  const Field2D phi = make_center_field(g, 2.0);
  const KineticRates rates{std::vector<double>(psi.values.size(), 0.0)};
  const double dt = 0.5 * solver.kinetic_dt_limit(phi, rates, 1.0);
  std::vector<double> t, m0, m1;
  double time = 0.0;
  for (int n = 0; n <= 400; ++n) {
    if (n % 20 == 0) {
      t.push_back(time);
      m0.push_back(total_moment(g, chain, psi, 0.0));
      m1.push_back(total_moment(g, chain, psi, 1.0));
    }
    solver.kinetic_step(psi, phi, rates, dt);
    time += dt;
  }
  const auto a = moment_growth_audit(t, m1, p.K * 2.0);
  CHECK(a.rate > 0.0);
  CHECK_FALSE(a.flagged);

  // single-cell ODE oracle: dM1/dt = phi int d_r(r tau) psi, checked on the first step
  PsiField one = psi;
  const double before = total_moment(g, chain, one, 1.0);
  double sink = 0.0;
  for (int c = 0; c < g.cells(); ++c)
    sink += polymer_sink_coefficient(one.slice(static_cast<std::size_t>(c)), solver.sink_weights());
  solver.kinetic_step(one, phi, rates, dt);
  CHECK((total_moment(g, chain, one, 1.0) - before) / dt ==
        doctest::Approx(2.0 * sink * g.cell_area()).epsilon(1e-6));
}

TEST_CASE("pure fragmentation: M1 plus released monomers is conserved to quadrature order, M0 grows") {
  auto coeffs = make_default_coefficients(CoefficientParams{});
  coeffs.tau = [](double) { return 0.0; };
  const SpatialGrid g(2, 2, 1.0, 1.0, Boundary::periodic, Boundary::periodic);
  std::vector<double> rel;
  for (int nr : {128, 256}) {
    const ChainGrid chain(1.0, 60.0, nr, Stretching::geometric);
    const PsiSolver solver(g, chain, coeffs);
    PsiField psi(g.cells(), chain.size());
    for (int c = 0; c < g.cells(); ++c)
      for (int k = 0; k < chain.size(); ++k) {
        const double r = chain.center(k);
        psi.slice(static_cast<std::size_t>(c))[static_cast<std::size_t>(k)] = std::exp(-0.5 * (r - 10.0) * (r - 10.0));
      }
    const KineticRates rates = solver.rates(make_velocity(g),
                                            compute_stress_field(g, coeffs, make_center_field(g), make_velocity(g)));
    const Field2D phi0 = make_center_field(g);
    Field2D gain = make_center_field(g), sink = make_center_field(g);
    const double dt = 0.05;
    double released = 0.0, m0_prev = total_moment(g, chain, psi, 0.0);
    const double e0 = total_moment(g, chain, psi, 1.0);
    for (int n = 0; n < 40; ++n) {
      solver.reaction_coefficients(psi, rates, dt, gain, sink);
      for (double x : gain.data) released += dt * x * g.cell_area();
      solver.kinetic_step(psi, phi0, rates, dt);
      const double m0 = total_moment(g, chain, psi, 0.0);
      CHECK(m0 >= m0_prev);
      m0_prev = m0;
    }
    rel.push_back(std::abs(total_moment(g, chain, psi, 1.0) + released - e0) / e0);
  }
  CHECK(rel[1] < 1e-4);
  CHECK(std::log2(rel[0] / rel[1]) >= 1.0);
}

TEST_CASE("weighted L2 audit") {
  const SpatialGrid g(5, 4, 1.0, 1.0, Boundary::slip_wall, Boundary::periodic);
  const ChainGrid chain(1.0, 20.0, 16);
  const std::vector<double> a(16, 0.1);
  const auto zero = weighted_l2_audit(g, chain, a, PsiField(g.cells(), chain.size()));
  CHECK(zero.norm == 0.0);
  CHECK(zero.gradient == 0.0);

  PsiField uniform(g.cells(), chain.size(), 0.5);
  const auto u = weighted_l2_audit(g, chain, a, uniform);
  CHECK(u.gradient == 0.0);
  CHECK(u.norm == doctest::Approx(0.25 * (std::pow(20.0, 4) - 1.0) / 4.0).epsilon(1e-13));

  PsiField varied = random_psi(g, chain, 3);
  CHECK(weighted_l2_audit(g, chain, a, varied).gradient > 0.0);
}

TEST_CASE("gradient energy of phi and tail fraction") {
  const SpatialGrid g(4, 4, 1.0, 1.0, Boundary::periodic, Boundary::periodic);
  CHECK(grad_phi_squared(g, make_center_field(g, 3.0)) == 0.0);
  Field2D phi = make_center_field(g);
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) phi(i, j) = i % 2;
  // every x-face jumps by 1: 16 faces * (1/dx)^2 * area
  CHECK(grad_phi_squared(g, phi) == doctest::Approx(16.0 * 16.0 / 16.0));

  const ChainGrid chain(1.0, 11.0, 10);
  PsiField psi(g.cells(), chain.size());
  CHECK(tail_fraction(chain, psi) == 0.0);
  psi.slice(0)[9] = 1.0;
  psi.slice(1)[0] = 1.0;
  const double w_tail = chain.center(9), w_head = chain.center(0);
  CHECK(tail_fraction(chain, psi) == doctest::Approx(w_tail / (w_tail + w_head)));
}

TEST_CASE("diagnostics columns round-trip") {
  DiagnosticsRecord r;
  r.step = 12;
  r.t = 0.25;
  r.total_mass = 3.5;
  r.poisson_iterations = 41;
  r.truncation_active = 2;
  const auto v = diagnostics_values(r);
  CHECK(v.size() == diagnostics_columns().size());
  CHECK(diagnostics_columns().front() == "step");
  const auto back = diagnostics_from_values(v);
  CHECK(diagnostics_values(back) == v);
  CHECK_THROWS_AS(diagnostics_from_values(std::span(v).first(3)), std::invalid_argument);
}
