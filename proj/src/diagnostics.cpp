#include "pflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pflow {

#define PFLOW_DIAG_COLUMNS(X)                                                                            \
  X(step) X(t) X(dt) X(total_mass) X(mass_drift) X(kinetic) X(dissipation) X(wall) X(power)             \
  X(energy_residual) X(m0) X(m1) X(m2) X(m3) X(m_theta) X(phi_min) X(phi_max) X(psi_min) X(psi_max)     \
  X(psi_tilde_min) X(psi_tilde_mean) X(psi_tilde_max) X(weighted_l2) X(weighted_grad_cum)               \
  X(grad_phi_cum) X(divergence) X(poisson_iterations) X(implicit_diffusion) X(retries) X(phi_bound)      \
  X(tail_fraction) X(truncation_active)

const std::vector<std::string>& diagnostics_columns() {
#define NAME(f) #f,
  static const std::vector<std::string> cols = {PFLOW_DIAG_COLUMNS(NAME)};
#undef NAME
  return cols;
}

std::vector<double> diagnostics_values(const DiagnosticsRecord& r) {
#define VALUE(f) static_cast<double>(r.f),
  return {PFLOW_DIAG_COLUMNS(VALUE)};
#undef VALUE
}

DiagnosticsRecord diagnostics_from_values(std::span<const double> values) {
  if (values.size() != diagnostics_columns().size())
    throw std::invalid_argument("diagnostics row has the wrong number of columns");
  DiagnosticsRecord r;
  std::size_t k = 0;
#define ASSIGN(f) r.f = static_cast<decltype(r.f)>(values[k++]);
  PFLOW_DIAG_COLUMNS(ASSIGN)
#undef ASSIGN
  return r;
}

#undef PFLOW_DIAG_COLUMNS

double total_mass(const SpatialGrid& g, const ChainGrid& chain, const Field2D& phi, const PsiField& psi) {
  const auto w1 = moment_weights(chain, 1.0);
  double e = 0.0;
  for (std::size_t c = 0; c < phi.size(); ++c) {
    double cell = phi.data[c];
    const auto sl = psi.slice(c);
    for (std::size_t k = 0; k < sl.size(); ++k) cell += w1[k] * sl[k];
    e += cell;
  }
  return e * g.cell_area();
}

double total_mass_by_moment(const SpatialGrid& g, const ChainGrid& chain, const Field2D& phi,
                            const PsiField& psi) {
  std::vector<double> per_r(static_cast<std::size_t>(psi.nr), 0.0);
  for (std::size_t c = 0; c < phi.size(); ++c) {
    const auto sl = psi.slice(c);
    for (std::size_t k = 0; k < sl.size(); ++k) per_r[k] += sl[k];
  }
  double mono = 0.0;
  for (double x : phi.data) mono += x;
  return (mono + moment(chain, per_r, 1.0)) * g.cell_area();
}

double total_moment(const SpatialGrid& g, const ChainGrid& chain, const PsiField& psi, double alpha) {
  const auto w = moment_weights(chain, alpha);
  double m = 0.0;
  for (int c = 0; c < psi.cells; ++c) m += moment(psi.slice(static_cast<std::size_t>(c)), w);
  return m * g.cell_area();
}

WeightedL2 weighted_l2_audit(const SpatialGrid& g, const ChainGrid& chain, std::span<const double> diffusivity,
                             const PsiField& psi) {
  const auto w3 = moment_weights(chain, 3.0);
  const auto nr = static_cast<std::size_t>(psi.nr);
  WeightedL2 out;
  for (int c = 0; c < psi.cells; ++c) {
    const auto sl = psi.slice(static_cast<std::size_t>(c));
    for (std::size_t k = 0; k < nr; ++k) out.norm += w3[k] * sl[k] * sl[k];
  }
  const double ix2 = 1.0 / (g.dx() * g.dx()), iy2 = 1.0 / (g.dy() * g.dy());
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const auto a = psi.slice(g.cell(i, j));
      if (g.periodic_x() || i < g.nx() - 1) {
        const auto b = psi.slice(g.cell(g.wrap_x(i + 1), j));
        for (std::size_t k = 0; k < nr; ++k) out.gradient += w3[k] * diffusivity[k] * (b[k] - a[k]) * (b[k] - a[k]) * ix2;
      }
      if (g.periodic_y() || j < g.ny() - 1) {
        const auto b = psi.slice(g.cell(i, g.wrap_y(j + 1)));
        for (std::size_t k = 0; k < nr; ++k) out.gradient += w3[k] * diffusivity[k] * (b[k] - a[k]) * (b[k] - a[k]) * iy2;
      }
    }
  out.norm *= g.cell_area();
  out.gradient *= g.cell_area();
  return out;
}

double grad_phi_squared(const SpatialGrid& g, const Field2D& phi) {
  double s = 0.0;
  const double ix2 = 1.0 / (g.dx() * g.dx()), iy2 = 1.0 / (g.dy() * g.dy());
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      if (g.periodic_x() || i < g.nx() - 1) {
        const double d = phi(g.wrap_x(i + 1), j) - phi(i, j);
        s += d * d * ix2;
      }
      if (g.periodic_y() || j < g.ny() - 1) {
        const double d = phi(i, g.wrap_y(j + 1)) - phi(i, j);
        s += d * d * iy2;
      }
    }
  return s * g.cell_area();
}

double tail_fraction(const ChainGrid& chain, const PsiField& psi) {
  const auto w1 = moment_weights(chain, 1.0);
  const double cut = chain.r0() + 0.9 * (chain.r_inf() - chain.r0());
  double tail = 0.0, total = 0.0;
  for (int c = 0; c < psi.cells; ++c) {
    const auto sl = psi.slice(static_cast<std::size_t>(c));
    for (int k = 0; k < chain.size(); ++k) {
      const double m = w1[static_cast<std::size_t>(k)] * sl[static_cast<std::size_t>(k)];
      total += m;
      if (chain.edge(k + 1) > cut) tail += m;
    }
  }
  return total > 0.0 ? tail / total : 0.0;
}

double gronwall_constant(double alpha, double K) {
  return K * (std::max(0.0, (1.0 - alpha) / (1.0 + alpha)) + 1.0 + alpha);
}

MomentAudit moment_growth_audit(std::span<const double> t, std::span<const double> m, double c_ledger) {
  if (t.size() != m.size()) throw std::invalid_argument("moment_growth_audit: size mismatch");
  if (t.size() < 10) throw std::invalid_argument("moment_growth_audit: need at least 10 samples");
  MomentAudit a;
  if (std::all_of(m.begin(), m.end(), [](double x) { return x == 0.0; })) return a;
  if (!(m[0] > 0.0)) throw std::invalid_argument("moment_growth_audit: initial moment must be positive");
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  const double n = static_cast<double>(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double y = std::log(m[k] / m[0]);
    st += t[k];
    sy += y;
    stt += t[k] * t[k];
    sty += t[k] * y;
    a.max_excess = std::max(a.max_excess, y - c_ledger * (t[k] - t[0]));
  }
  const double den = n * stt - st * st;
  a.rate = den > 0.0 ? (n * sty - st * sy) / den : 0.0;
  a.flagged = a.max_excess > 0.0 || a.rate > c_ledger;
  return a;
}

}  // namespace pflow
