#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "pflow/fragmentation.hpp"
#include "pflow/model.hpp"

using namespace pflow;

namespace {

std::vector<double> random_values(std::size_t n, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

// Cell-average gain of 2 int_r^{r_inf} beta kappa psi dr~ for piecewise-constant data,
// with 1/r~ taken at the cell centers, by a direct double loop.
std::vector<double> gain_double_loop(const ChainGrid& g, const std::vector<double>& psi,
                                     const std::vector<double>& beta) {
  const auto n = static_cast<std::size_t>(g.size());
  std::vector<double> out(n, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = j; i < n; ++i) {
      const double q = beta[i] * psi[i] * g.widths()[i] / g.centers()[i];
      out[j] += i == j ? q : 2.0 * q;
    }
  return out;
}

}  // namespace

TEST_CASE("chain grid partitions the interval") {
  for (auto s : {Stretching::uniform, Stretching::geometric}) {
    const ChainGrid g(0.5, 80.0, 97, s);
    CHECK(g.r0() == 0.5);
    CHECK(g.r_inf() == 80.0);
    double total = 0.0;
    for (int k = 0; k < g.size(); ++k) {
      CHECK(g.width(k) > 0.0);
      CHECK(g.edge(k + 1) > g.edge(k));
      CHECK(g.center(k) == doctest::Approx(0.5 * (g.edge(k) + g.edge(k + 1))));
      total += g.weights()[static_cast<std::size_t>(k)];
    }
    CHECK(total == doctest::Approx(80.0 - 0.5).epsilon(1e-14));
    CHECK(g.locate(0.5) == 0);
    CHECK(g.locate(80.0) == g.size() - 1);
    CHECK(g.locate(g.center(40)) == 40);
  }
  const ChainGrid geo(1.0, 100.0, 10, Stretching::geometric);
  CHECK(geo.edge(5) == doctest::Approx(10.0));
  CHECK_THROWS_AS(ChainGrid(0.0, 1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(ChainGrid(2.0, 1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(ChainGrid(1.0, 2.0, 0), std::invalid_argument);
}

TEST_CASE("kernel support and moments") {
  CHECK(kernel(0.5, 2.0, 1.0) == doctest::Approx(0.5));
  CHECK(kernel(2.5, 2.0, 1.0) == 0.0);
  CHECK(kernel(2.0, 2.0, 1.0) == 0.0);
  CHECK(kernel(0.5, 0.9, 1.0) == 0.0);
  CHECK(kernel_moment(1.0, 7.3, 1.0) == doctest::Approx(1.0));
  CHECK(kernel_moment(2.0, 4.0, 1.0) == doctest::Approx(2.0));
  CHECK(kernel_moment(3.0, 2.0, 1.0) == doctest::Approx(4.0 / 3.0));
  CHECK_THROWS_AS(kernel_moment(1.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(kernel_moment(0.0, 3.0, 1.0), std::invalid_argument);
}

TEST_CASE("frag_apply on a zero distribution") {
  const ChainGrid g(1.0, 10.0, 32);
  std::vector<double> psi(32, 0.0), beta(32, 0.4), out(32, 1.0);
  frag_apply(g, psi, beta, out);
  for (double x : out) CHECK(x == 0.0);
}

TEST_CASE("frag_apply for a unit mass in one cell") {
  const ChainGrid g(1.0, 11.0, 50, Stretching::uniform);
  const int hat = 30;
  const double beta0 = 0.7;
  std::vector<double> psi(50, 0.0), beta(50, beta0), out(50);
  psi[hat] = 1.0 / g.width(hat);
  frag_apply(g, psi, beta, out);
  const double rhat = g.center(hat);
  for (int k = 0; k < 50; ++k) {
    const auto j = static_cast<std::size_t>(k);
    if (k < hat) CHECK(out[j] == doctest::Approx(2.0 * beta0 / rhat).epsilon(1e-13));
    if (k > hat) CHECK(out[j] == 0.0);
  }
  // own cell: half of the gain density minus the loss
  CHECK(out[hat] == doctest::Approx(beta0 / rhat - beta0 * psi[hat]).epsilon(1e-13));
}

TEST_CASE("suffix sum matches the double-loop oracle") {
  for (auto s : {Stretching::uniform, Stretching::geometric}) {
    const ChainGrid g(1.0, 60.0, 300, s);
    const auto psi = random_values(300, 3);
    const auto beta = random_values(300, 4, 0.1, 2.0);
    std::vector<double> gain(300);
    frag_gain(g, psi, beta, gain);
    const auto oracle = gain_double_loop(g, psi, beta);
    for (std::size_t k = 0; k < gain.size(); ++k) {
      CHECK(gain[k] >= 0.0);
      CHECK(std::abs(gain[k] - oracle[k]) <= 1e-13 * std::abs(oracle[k]));
    }
  }
}

TEST_CASE("monomer_gain examples") {
  const ChainGrid g(2.0, 12.0, 40, Stretching::uniform);
  std::vector<double> psi(40, 0.0), beta(40, 0.3);
  CHECK(monomer_gain(g, psi, beta) == 0.0);
  psi[17] = 1.0 / g.width(17);
  CHECK(monomer_gain(g, psi, beta) == doctest::Approx(4.0 * 0.3 / g.center(17)).epsilon(1e-14));
  auto twice = psi;
  for (double& x : twice) x *= 2.0;
  CHECK(monomer_gain(g, twice, beta) == doctest::Approx(2.0 * monomer_gain(g, psi, beta)).epsilon(1e-15));
}

TEST_CASE("monomer_gain converges to the two-dimensional integral") {
  // 2 int_0^{r0} r int_{r0}^{r_inf} beta kappa psi dr~ dr with beta = r~/(1+r~) and
  // psi = exp(-(r~-1)), evaluated by brute force on a tensor grid
  const double r0 = 1.0, r_inf = 40.0;
  const auto beta_fn = [](double r) { return r / (1.0 + r); };
  const auto psi_fn = [r0](double r) { return std::exp(-(r - r0)); };
  double brute = 0.0;
  {
    const int nr = 100, nt = 40000;
    const double hr = r0 / nr, ht = (r_inf - r0) / nt;
    for (int a = 0; a < nr; ++a) {
      const double r = (a + 0.5) * hr;
      double inner = 0.0;
      for (int b = 0; b < nt; ++b) {
        const double rt = r0 + (b + 0.5) * ht;
        inner += beta_fn(rt) * kernel(r, rt, r0) * psi_fn(rt) * ht;
      }
      brute += 2.0 * r * inner * hr;
    }
  }
  std::vector<double> err;
  for (int n : {64, 128, 256}) {
    const ChainGrid g(r0, r_inf, n, Stretching::geometric);
    std::vector<double> psi(static_cast<std::size_t>(n)), beta(psi.size());
    for (int k = 0; k < n; ++k) {
      psi[static_cast<std::size_t>(k)] = psi_fn(g.center(k));
      beta[static_cast<std::size_t>(k)] = beta_fn(g.center(k));
    }
    err.push_back(std::abs(monomer_gain(g, psi, beta) - brute) / brute);
  }
  CHECK(err[2] < 1e-4);
  CHECK(err[1] < err[0]);
  CHECK(err[2] < err[1]);
}

TEST_CASE("polymer sink coefficient") {
  const CoefficientParams p;
  const auto c = make_default_coefficients(p);
  const ChainGrid g(p.r0, 21.0, 200, Stretching::uniform);
  std::vector<double> psi(200, 0.0);
  CHECK(polymer_sink_coefficient(g, psi, c.tau) == 0.0);

  SUBCASE("box on [a, b] integrates d(r tau) exactly") {
    // cells 40..99 cover [5, 11]
    for (int k = 40; k < 100; ++k) psi[static_cast<std::size_t>(k)] = 1.0;
    const double a = g.edge(40), b = g.edge(100);
    CHECK(polymer_sink_coefficient(g, psi, c.tau) == doctest::Approx(b * c.tau(b) - a * c.tau(a)).epsilon(1e-13));
  }

  SUBCASE("bounded by K^-1 r0 M0 and K M0") {
    const auto w = sink_weights(g, c.tau);
    for (int trial = 0; trial < 100; ++trial) {
      const auto rnd = random_values(200, 100 + static_cast<std::uint64_t>(trial));
      const double m0 = moment(g, rnd, 0.0);
      const double s = polymer_sink_coefficient(rnd, w);
      CHECK(s / m0 >= p.r0 / p.K);
      CHECK(s / m0 <= p.K);
    }
  }
}

TEST_CASE("moment examples") {
  const ChainGrid g(1.0, 9.0, 64, Stretching::geometric);
  std::vector<double> psi(64, 0.0);
  CHECK(moment(g, psi, 1.0) == 0.0);
  std::fill(psi.begin(), psi.end(), 1.0);
  CHECK(moment(g, psi, 0.0) == doctest::Approx(8.0).epsilon(1e-14));
  CHECK(moment(g, psi, 1.0) == doctest::Approx((81.0 - 1.0) / 2.0).epsilon(1e-14));
  CHECK(moment(g, psi, 2.5) == doctest::Approx((std::pow(9.0, 3.5) - 1.0) / 3.5).epsilon(1e-13));
  CHECK(moment(g, psi, -1.0) == doctest::Approx(std::log(9.0)).epsilon(1e-13));

  const ChainGrid u(1.0, 9.0, 80, Stretching::uniform);
  std::vector<double> box(80, 0.0);
  const double h = 3.0;
  for (int k = 10; k < 50; ++k) box[static_cast<std::size_t>(k)] = h;  // [2, 6]
  CHECK(moment(u, box, 1.0) == doctest::Approx(h * (36.0 - 4.0) / 2.0).epsilon(1e-13));
}

TEST_CASE("growth changes M1 by phi times the sink coefficient minus the outflow") {
  const auto c = make_default_coefficients(CoefficientParams{});
  const ChainGrid g(1.0, 30.0, 120, Stretching::geometric);
  const auto psi = random_values(120, 9);
  const auto speeds = growth_speeds(g, c.tau);
  const auto sink = sink_weights(g, c.tau);
  const double phi = 1.7;
  std::vector<double> rate(120);
  growth_apply(psi, speeds, phi, rate);
  const double dm1 = moment(g, rate, 1.0);
  const double outflow = phi * g.r_inf() * c.tau(g.r_inf()) * psi.back();
  const double expected = phi * polymer_sink_coefficient(psi, sink) - outflow;
  CHECK(std::abs(dm1 - expected) <= 1e-12 * std::abs(expected));
  for (double a : speeds) CHECK(a >= 0.0);
}

TEST_CASE("r-weighted fragmentation balance converges at second order") {
  const auto c = make_default_coefficients(CoefficientParams{});
  std::vector<double> res;
  for (int n : {128, 256, 512}) {
    const ChainGrid g(1.0, 40.0, n, Stretching::geometric);
    std::vector<double> psi(static_cast<std::size_t>(n)), beta(psi.size()), rate(psi.size());
    for (int k = 0; k < n; ++k) {
      const double r = g.center(k);
      psi[static_cast<std::size_t>(k)] = (r - 1.0) * std::exp(-(r - 1.0) / 2.0);
      beta[static_cast<std::size_t>(k)] = c.beta(r, Vec2{}, SymTensor2{});
    }
    frag_apply(g, psi, beta, rate);
    // analytic value of the discrete residual: sum beta psi dr^3 / (4 r)
    double oracle = 0.0;
    for (int k = 0; k < n; ++k) {
      const auto j = static_cast<std::size_t>(k);
      oracle += beta[j] * psi[j] * std::pow(g.width(k), 3) / (4.0 * g.center(k));
    }
    const double r = moment(g, rate, 1.0) + monomer_gain(g, psi, beta);
    CHECK(r == doctest::Approx(oracle).epsilon(1e-9));
    res.push_back(r);
  }
  CHECK(std::log2(res[0] / res[1]) >= 1.9);
  CHECK(std::log2(res[1] / res[2]) >= 1.9);
}
