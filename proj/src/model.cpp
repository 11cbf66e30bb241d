#include "pflow/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "pflow/errors.hpp"

namespace pflow {

double frobenius(const SymTensor2& a) { return std::sqrt(contract(a, a)); }

ModelCoefficients make_default_coefficients(const CoefficientParams& prm) {
  if (!(prm.r0 > 0.0)) throw ConfigError("r0 must be positive (A3/A4 require r0 > 0)");
  ModelCoefficients c;
  c.r0 = prm.r0;
  c.K = prm.K;
  c.A0 = prm.A0;
  c.theta = prm.theta;
  c.p = prm.viscosity.p;
  c.alpha_star = prm.alpha_star;

  const double r0 = prm.r0;
  c.A = [a = prm.A_max, r0](double r) { return a / (1.0 + (r - r0)); };
  c.tau = [t = prm.tau_max, k = prm.k_tau, r0](double r) {
    return t * -std::expm1(-k * (r - r0));
  };
  c.dtau = [t = prm.tau_max, k = prm.k_tau, r0](double r) { return t * k * std::exp(-k * (r - r0)); };
  c.beta = [b0 = prm.beta0, b1 = prm.b1, bv = prm.b_v](double r, const Vec2& v, const SymTensor2& D) {
    const double d2 = contract(D, D);
    const double v2 = v.x * v.x + v.y * v.y;
    return b0 * (r / (1.0 + r)) * (1.0 + b1 * d2 / (1.0 + d2) + bv * v2 / (1.0 + v2));
  };
  c.eta = [](double r) { return 1.0 / (r * (1.0 + r)); };
  c.gamma = [th = prm.theta](double r) { return th == 1.0 ? r : std::pow(r, th); };
  c.nu = [vp = prm.viscosity](double psi_tilde, double shear) {
    return closure_viscosity(vp, psi_tilde, shear);
  };
  return c;
}

double closure_viscosity(const ViscosityParams& vp, double psi_tilde, double shear) {
  const double shear_factor =
      vp.p == 2.0 ? 1.0 : std::pow(vp.delta_nu * vp.delta_nu + shear * shear, 0.5 * (vp.p - 2.0));
  switch (vp.closure) {
    case ViscosityClosure::flory:
      return vp.nu_ref * std::exp(vp.c_flory * std::min(std::sqrt(psi_tilde), vp.flory_cap)) *
                 shear_factor +
             vp.nu_inf;
    case ViscosityClosure::crossover:
      return (vp.nu_inf + (vp.nu_ref - vp.nu_inf) / (1.0 + psi_tilde)) * shear_factor;
  }
  return 0.0;
}

double viscosity(const ModelCoefficients& coeffs, double psi_tilde, double shear) {
  if (!std::isfinite(psi_tilde) || psi_tilde < 0.0)
    throw std::invalid_argument("viscosity: psi_tilde must be finite and nonnegative");
  if (!std::isfinite(shear) || shear < 0.0)
    throw std::invalid_argument("viscosity: shear rate must be finite and nonnegative");
  const double nu = coeffs.nu(psi_tilde, shear);
  if (!std::isfinite(nu) || !(nu > 0.0)) {
    std::ostringstream os;
    os << "viscosity: non-positive or non-finite value " << nu << " at psi~=" << psi_tilde
       << " |D|=" << shear;
    throw Error(os.str());
  }
  return nu;
}

SymTensor2 stress(const ModelCoefficients& coeffs, double psi_tilde, const SymTensor2& D) {
  const double nu = viscosity(coeffs, psi_tilde, frobenius(D));
  return {nu * D.xx, nu * D.xy, nu * D.yy};
}

std::vector<double> gamma_weights(const ChainGrid& grid, const ScalarFn& gamma) {
  std::vector<double> w(static_cast<std::size_t>(grid.size()));
  for (int j = 0; j < grid.size(); ++j)
    w[static_cast<std::size_t>(j)] = gamma(grid.center(j)) * grid.width(j);
  return w;
}

double weighted_average(std::span<const double> psi, std::span<const double> gamma_w) {
  double sum = 0.0;
  for (std::size_t k = 0; k < psi.size(); ++k) sum += gamma_w[k] * psi[k];
  return sum;
}

double weighted_average(const ChainGrid& grid, std::span<const double> psi, const ScalarFn& gamma) {
  const auto w = gamma_weights(grid, gamma);
  return weighted_average(psi, w);
}

// ---------------------------------------------------------------------------
// Assumption validation

namespace {

constexpr double kSlack = 1e-12;

// 5-point Gauss-Legendre on [-1, 1]
constexpr std::array<double, 5> kGlNodes = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                            0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> kGlWeights = {0.2369268850561891, 0.4786286704993665,
                                              0.5688888888888889, 0.4786286704993665,
                                              0.2369268850561891};

template <class F>
double gauss_legendre(F&& f, double a, double b, int panels) {
  double sum = 0.0;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    double s = 0.0;
    for (std::size_t q = 0; q < kGlNodes.size(); ++q) s += kGlWeights[q] * f(mid + 0.5 * h * kGlNodes[q]);
    sum += 0.5 * h * s;
  }
  return sum;
}

class Check {
 public:
  explicit Check(AssumptionResult& res) : res_(res) {}

  // lhs <= rhs with relative slack
  void le(double lhs, double rhs, const std::string& what, double scale = 0.0) {
    const double slack = kSlack * std::max({std::abs(lhs), std::abs(rhs), scale});
    const double excess = lhs - rhs - slack;
    if (excess > 0.0) fail(excess / std::max({std::abs(lhs), std::abs(rhs), 1e-300}), what, lhs, rhs);
  }
  void require(bool ok, const std::string& what) {
    if (!ok) fail(1.0, what, 0.0, 0.0);
  }

 private:
  void fail(double severity, const std::string& what, double lhs, double rhs) {
    res_.pass = false;
    if (severity > worst_) {
      worst_ = severity;
      std::ostringstream os;
      os.precision(6);
      os << what;
      if (lhs != 0.0 || rhs != 0.0) os << " (" << lhs << " vs " << rhs << ")";
      res_.worst = os.str();
    }
  }
  AssumptionResult& res_;
  double worst_ = -1.0;
};

double finite(double value, const char* name, double r) {
  if (!std::isfinite(value)) {
    std::ostringstream os;
    os << "validate_coefficients: non-finite " << name << " at r=" << r;
    throw Error(os.str());
  }
  return value;
}

std::string at(const char* what, double r) {
  std::ostringstream os;
  os.precision(6);
  os << what << " at r=" << r;
  return os.str();
}

SymTensor2 random_tensor(std::mt19937_64& rng, double log_min, double log_max) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uni(log_min, log_max);
  const double a = gauss(rng), b = gauss(rng), c = gauss(rng);
  const double n = std::sqrt(a * a + b * b + c * c);
  const double mag = std::pow(10.0, uni(rng));
  // |xi|^2 = xx^2 + 2 xy^2 + yy^2
  return {mag * a / n, mag * b / (n * std::sqrt(2.0)), mag * c / n};
}

}  // namespace

bool ValidationReport::all_pass() const {
  return std::all_of(assumptions.begin(), assumptions.end(), [](const auto& a) { return a.pass; });
}

const AssumptionResult& ValidationReport::operator[](const std::string& id) const {
  for (const auto& a : assumptions)
    if (a.id == id) return a;
  throw std::out_of_range("no assumption " + id);
}

ValidationReport validate_coefficients(const ModelCoefficients& c, const SamplingPlan& plan,
                                       const KernelFn& kernel_fn) {
  if (!(c.r0 > 0.0)) throw Error("validate_coefficients: r0 must be positive");
  if (!(c.K > 0.0)) throw Error("validate_coefficients: K must be positive");

  ValidationReport rep;
  rep.assumptions = {{
      {"A1", "chain diffusivity A: positive, nonincreasing, vanishing at infinity", true, ""},
      {"A2", "polymerization rate tau: tau(r0)=0, tau'(r0)>0, nondecreasing, bounded, two-sided K bounds", true, ""},
      {"A3", "fragmentation rate beta: 0<beta<=K, increasing in r, envelope eta bounds", true, ""},
      {"A4", "fragmentation kernel: uniform 1/r~ on 0<r<r~, moment identity", true, ""},
      {"A5", "averaging weight gamma <= K (1+r)^theta", true, ""},
      {"A6", "stress S = nu D: growth, coercivity, strict monotonicity", true, ""},
  }};
  const double K = c.K;
  const double r0 = c.r0;

  std::vector<double> rs(static_cast<std::size_t>(plan.r_points));
  const double r_max = plan.r_max_factor * std::max(1.0, r0);
  for (int i = 0; i < plan.r_points; ++i)
    rs[static_cast<std::size_t>(i)] =
        r0 * std::pow(r_max / r0, static_cast<double>(i) / (plan.r_points - 1));

  auto dtau = [&](double r) {
    if (c.dtau) return finite(c.dtau(r), "tau'", r);
    const double h = 1e-6 * std::max(1.0, r);
    if (r <= r0) return (finite(c.tau(r + h), "tau", r) - finite(c.tau(r), "tau", r)) / h;
    return (finite(c.tau(r + h), "tau", r) - finite(c.tau(r - h), "tau", r)) / (2.0 * h);
  };

  // A1
  {
    Check chk(rep.assumptions[0]);
    double prev = 0.0;
    for (std::size_t i = 1; i < rs.size(); ++i) {
      const double a = finite(c.A(rs[i]), "A", rs[i]);
      chk.require(a > 0.0, at("A not strictly positive", rs[i]));
      if (i > 1) chk.le(a, prev, at("A increasing", rs[i]));
      prev = a;
    }
    const double a_first = finite(c.A(rs[1]), "A", rs[1]);
    const double a_far = finite(c.A(plan.r_far), "A", plan.r_far);
    chk.le(a_far, 1e-3 * a_first, at("A does not decay", plan.r_far));
  }

  // A2
  {
    Check chk(rep.assumptions[1]);
    double tau_sup = 0.0;
    for (double r : rs) tau_sup = std::max(tau_sup, std::abs(finite(c.tau(r), "tau", r)));
    tau_sup = std::max(tau_sup, std::abs(finite(c.tau(plan.r_far), "tau", plan.r_far)));
    chk.le(std::abs(c.tau(r0)), 0.0, "tau(r0) != 0", 1.0 + tau_sup);
    chk.require(dtau(r0) > 0.0, "tau'(r0) not positive");
    double prev = c.tau(rs[0]);
    for (std::size_t i = 0; i < rs.size(); ++i) {
      const double r = rs[i];
      const double t = c.tau(r);
      const double dt = dtau(r);
      if (i > 0) chk.le(prev, t, at("tau decreasing", r));
      prev = t;
      chk.le(r0 / K, t + r * dt, at("lower bound tau + r tau' >= r0/K violated", r));
      chk.le(t + dt + r * dt + t / r, K, at("upper bound tau + tau' + r tau' + tau/r <= K violated", r));
    }
    chk.le(std::abs(c.tau(plan.r_far)), K, "tau unbounded");
  }

  std::mt19937_64 rng(plan.seed);

  // A3
  {
    Check chk(rep.assumptions[2]);
    std::vector<Vec2> vs{{0.0, 0.0}};
    std::uniform_real_distribution<double> uv(-10.0, 10.0);
    for (int i = 1; i < plan.velocity_probes; ++i) vs.push_back({uv(rng), uv(rng)});
    std::vector<SymTensor2> ds{{0.0, 0.0, 0.0}};
    for (int i = 0; i < 8; ++i) ds.push_back(random_tensor(rng, -3.0, 3.0));

    for (const auto& v : vs) {
      for (const auto& d : ds) {
        double prev = 0.0;
        for (std::size_t i = 1; i < rs.size(); ++i) {
          const double r = rs[i];
          const double b = finite(c.beta(r, v, d), "beta", r);
          chk.require(b > 0.0, at("beta not strictly positive", r));
          chk.le(b, K, at("beta > K", r));
          if (i > 1) chk.le(prev, b, at("beta decreasing in r", r));
          prev = b;
          const double h = 1e-5 * r;
          const double db = (c.beta(r + h, v, d) - c.beta(r - h, v, d)) / (2.0 * h);
          const double e = finite(c.eta(r), "eta", r);
          chk.le(db / b, e + 1e-6 * (std::abs(e) + 1.0 / r), at("eta is not an envelope of d_r beta/beta", r));
        }
      }
    }
    for (std::size_t i = 1; i < rs.size(); ++i) {
      const double e = c.eta(rs[i]);
      chk.le(0.0, e, at("eta negative", rs[i]));
      chk.le((1.0 + rs[i]) * e, K, at("(1+r) eta > K", rs[i]));
    }
    // int_{r0}^{r_far} eta on logarithmic panels
    const double lr0 = std::log(r0), lrf = std::log(plan.r_far);
    const double eta_int = gauss_legendre(
        [&](double s) {
          const double r = std::exp(s);
          return finite(c.eta(r), "eta", r) * r;
        },
        lr0, lrf, 400);
    chk.le(eta_int, K, "int eta > K");
  }

  // A4
  {
    Check chk(rep.assumptions[3]);
    const std::array<double, 4> alphas{1.0, 2.0, 2.5, 3.0};
    for (int i = 0; i < 20; ++i) {
      const double rt = r0 * std::pow(r_max / r0, (i + 0.5) / 20.0);
      for (double frac : {0.1, 0.5, 0.99}) {
        const double k = finite(kernel_fn(frac * rt, rt, r0), "kappa", rt);
        chk.le(0.0, k, at("kappa negative", rt));
      }
      for (double frac : {1.0, 1.5, 3.0})
        chk.le(std::abs(kernel_fn(frac * rt, rt, r0)), 0.0, at("kappa nonzero for r >= r~", rt), 1e-300);
      for (double alpha : alphas) {
        // r = rt s^2 removes the endpoint singularity of r^(alpha-1) near 0
        const double inner = gauss_legendre(
            [&](double s) {
              const double r = rt * s * s;
              return std::pow(r, alpha - 1.0) * kernel_fn(r, rt, r0) * 2.0 * rt * s;
            },
            0.0, 1.0, 200);
        const double outer = gauss_legendre(
            [&](double r) { return std::pow(r, alpha - 1.0) * kernel_fn(r, rt, r0); }, rt, 3.0 * rt, 20);
        const double exact = kernel_moment(alpha, rt, r0);
        chk.le(std::abs(inner + outer - exact), 1e-8 * exact, at("kernel moment identity fails", rt));
      }
    }
    for (double rt : {0.5 * r0, r0})
      chk.le(std::abs(kernel_fn(0.25 * rt, rt, r0)), 0.0, at("kappa nonzero for r~ <= r0", rt), 1e-300);
  }

  // A5
  {
    Check chk(rep.assumptions[4]);
    chk.require(c.theta > 0.0, "theta not positive");
    for (double r : rs) {
      const double g = finite(c.gamma(r), "gamma", r);
      chk.le(0.0, g, at("gamma negative", r));
      chk.le(g, K * std::pow(1.0 + r, c.theta), at("gamma > K (1+r)^theta", r));
    }
  }

  // A6
  {
    Check chk(rep.assumptions[5]);
    const double p_min = 2.0 * 2.0 / (2.0 + 2.0);  // 2d/(d+2), d = 2
    chk.require(c.p > p_min, "p <= 2d/(d+2)");
    const std::array<double, 8> psis{0.0, 0.25, 1.0, 4.0, 16.0, 100.0, 400.0, 1e4};
    std::vector<std::pair<SymTensor2, SymTensor2>> pairs;
    for (int i = 0; i < plan.tensor_pairs; ++i)
      pairs.emplace_back(random_tensor(rng, -3.0, 3.0), random_tensor(rng, -3.0, 3.0));
    auto S = [&](double pt, const SymTensor2& xi) {
      const double nu = finite(c.nu(pt, frobenius(xi)), "nu", pt);
      chk.require(nu > 0.0, "nu not positive");
      return SymTensor2{nu * xi.xx, nu * xi.xy, nu * xi.yy};
    };
    for (double pt : psis) {
      auto bounds = [&](const SymTensor2& xi) {
        const SymTensor2 s = S(pt, xi);
        const double mag = frobenius(xi);
        chk.le(frobenius(s), K * std::pow(1.0 + mag, c.p - 1.0), at("growth |S| <= K(1+|xi|)^(p-1) violated, |xi|", mag));
        chk.le(std::pow(mag, c.p) / K - K, contract(s, xi), at("coercivity S.xi >= |xi|^p/K - K violated, |xi|", mag));
      };
      bounds(SymTensor2{});
      for (const auto& [a, b] : pairs) {
        bounds(a);
        bounds(b);
        const SymTensor2 sa = S(pt, a), sb = S(pt, b);
        const SymTensor2 ds{sa.xx - sb.xx, sa.xy - sb.xy, sa.yy - sb.yy};
        const SymTensor2 dx{a.xx - b.xx, a.xy - b.xy, a.yy - b.yy};
        chk.require(contract(ds, dx) > 0.0, at("strict monotonicity violated, psi~", pt));
      }
    }
  }

  return rep;
}

std::string format_report(const ValidationReport& rep) {
  std::ostringstream os;
  for (const auto& a : rep.assumptions) {
    os << a.id << "  " << (a.pass ? "pass" : "FAIL") << "  " << a.description;
    if (!a.pass) os << "\n      worst: " << a.worst;
    os << '\n';
  }
  os << (rep.all_pass() ? "all assumptions hold on the sampled set\n"
                        : "one or more assumptions violated\n");
  return os.str();
}

}  // namespace pflow
