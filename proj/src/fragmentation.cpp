#include "pflow/fragmentation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pflow {

ChainGrid::ChainGrid(double r0, double r_inf, int cells, Stretching stretching)
    : stretching_(stretching) {
  if (!(r0 > 0.0)) throw std::invalid_argument("ChainGrid: r0 must be positive");
  if (!(r_inf > r0)) throw std::invalid_argument("ChainGrid: r_inf must exceed r0");
  if (cells < 1) throw std::invalid_argument("ChainGrid: need at least one cell");

  const auto n = static_cast<std::size_t>(cells);
  edges_.resize(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    const double s = static_cast<double>(j) / static_cast<double>(n);
    edges_[j] = stretching == Stretching::uniform ? r0 + (r_inf - r0) * s
                                                  : r0 * std::pow(r_inf / r0, s);
  }
  edges_.front() = r0;
  edges_.back() = r_inf;

  centers_.resize(n);
  widths_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    centers_[j] = 0.5 * (edges_[j] + edges_[j + 1]);
    widths_[j] = edges_[j + 1] - edges_[j];
  }
}

int ChainGrid::locate(double r) const {
  auto it = std::upper_bound(edges_.begin(), edges_.end(), r);
  const auto idx = static_cast<int>(it - edges_.begin()) - 1;
  return std::clamp(idx, 0, size() - 1);
}

double kernel(double r, double r_tilde, double r0) {
  if (r_tilde > r0 && r > 0.0 && r < r_tilde) return 1.0 / r_tilde;
  return 0.0;
}

double kernel_moment(double alpha, double r_tilde, double r0) {
  if (!(alpha > 0.0)) throw std::invalid_argument("kernel_moment: alpha must be positive");
  if (!(r_tilde > r0)) throw std::invalid_argument("kernel_moment: r_tilde must exceed r0");
  return std::pow(r_tilde, alpha - 1.0) / alpha;
}

void frag_gain(const ChainGrid& grid, std::span<const double> psi, std::span<const double> beta,
               std::span<double> out) {
  const auto r = grid.centers();
  const auto dr = grid.widths();
  double suffix = 0.0;  // sum of q_i over i > j
  for (int j = grid.size() - 1; j >= 0; --j) {
    const auto k = static_cast<std::size_t>(j);
    const double q = beta[k] * psi[k] * dr[k] / r[k];
    out[k] = 2.0 * suffix + q;
    suffix += q;
  }
}

void frag_apply(const ChainGrid& grid, std::span<const double> psi, std::span<const double> beta,
                std::span<double> out) {
  frag_gain(grid, psi, beta, out);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] -= beta[k] * psi[k];
}

double monomer_gain(const ChainGrid& grid, std::span<const double> psi,
                    std::span<const double> beta) {
  const auto r = grid.centers();
  const auto dr = grid.widths();
  double sum = 0.0;
  for (std::size_t k = 0; k < psi.size(); ++k) sum += beta[k] * psi[k] * dr[k] / r[k];
  return grid.r0() * grid.r0() * sum;
}

std::vector<double> sink_weights(const ChainGrid& grid, const std::function<double(double)>& tau) {
  const auto e = grid.edges();
  std::vector<double> w(static_cast<std::size_t>(grid.size()));
  double lower = e[0] * tau(e[0]);
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double upper = e[k + 1] * tau(e[k + 1]);
    w[k] = upper - lower;
    lower = upper;
  }
  return w;
}

double polymer_sink_coefficient(std::span<const double> psi, std::span<const double> weights) {
  double sum = 0.0;
  for (std::size_t k = 0; k < psi.size(); ++k) sum += weights[k] * psi[k];
  return sum;
}

double polymer_sink_coefficient(const ChainGrid& grid, std::span<const double> psi,
                                const std::function<double(double)>& tau) {
  const auto w = sink_weights(grid, tau);
  return polymer_sink_coefficient(psi, w);
}

std::vector<double> moment_weights(const ChainGrid& grid, double alpha) {
  const auto e = grid.edges();
  std::vector<double> w(static_cast<std::size_t>(grid.size()));
  if (std::abs(alpha + 1.0) < 1e-14) {
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::log(e[k + 1] / e[k]);
    return w;
  }
  if (alpha == 0.0) {
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = e[k + 1] - e[k];
    return w;
  }
  if (alpha == 1.0) {
    // (b^2 - a^2)/2 = midpoint * width, computed without cancellation
    const auto r = grid.centers();
    const auto dr = grid.widths();
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = r[k] * dr[k];
    return w;
  }
  const double a1 = alpha + 1.0;
  for (std::size_t k = 0; k < w.size(); ++k)
    w[k] = (std::pow(e[k + 1], a1) - std::pow(e[k], a1)) / a1;
  return w;
}

double moment(std::span<const double> psi, std::span<const double> weights) {
  double sum = 0.0;
  for (std::size_t k = 0; k < psi.size(); ++k) sum += weights[k] * psi[k];
  return sum;
}

double moment(const ChainGrid& grid, std::span<const double> psi, double alpha) {
  const auto w = moment_weights(grid, alpha);
  return moment(psi, w);
}

std::vector<double> growth_speeds(const ChainGrid& grid, const std::function<double(double)>& tau) {
  const auto e = grid.edges();
  const auto r = grid.centers();
  const auto dr = grid.widths();
  std::vector<double> a(static_cast<std::size_t>(grid.size()));
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = e[k] * tau(e[k]) / (r[k] * dr[k]);
  return a;
}

void growth_apply(std::span<const double> psi, std::span<const double> speeds, double phi,
                  std::span<double> out) {
  double left = 0.0;
  for (std::size_t k = 0; k < psi.size(); ++k) {
    out[k] = -phi * speeds[k] * (psi[k] - left);
    left = psi[k];
  }
}

}  // namespace pflow
