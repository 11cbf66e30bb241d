#pragma once

#include <functional>
#include <span>
#include <vector>

namespace pflow {

enum class Stretching { uniform, geometric };

/// Finite-volume discretization of the chain-length interval (r0, r_inf).
///
/// Cells partition the interval exactly; `centers()` are the midpoints of the
/// cell edges, so the midpoint rule integrates r * psi exactly for
/// piecewise-constant psi. Geometric stretching keeps width/center constant,
/// which concentrates resolution near r0 where the growth speed varies fastest.
class ChainGrid {
 public:
  ChainGrid(double r0, double r_inf, int cells, Stretching stretching = Stretching::uniform);

  double r0() const { return edges_.front(); }
  double r_inf() const { return edges_.back(); }
  int size() const { return static_cast<int>(centers_.size()); }
  Stretching stretching() const { return stretching_; }

  std::span<const double> edges() const { return edges_; }
  std::span<const double> centers() const { return centers_; }
  std::span<const double> widths() const { return widths_; }
  /// Midpoint quadrature weights (equal to the cell widths).
  std::span<const double> weights() const { return widths_; }

  double edge(int j) const { return edges_[static_cast<std::size_t>(j)]; }
  double center(int j) const { return centers_[static_cast<std::size_t>(j)]; }
  double width(int j) const { return widths_[static_cast<std::size_t>(j)]; }

  /// Index of the cell containing r (clamped to the grid).
  int locate(double r) const;

 private:
  Stretching stretching_;
  std::vector<double> edges_;
  std::vector<double> centers_;
  std::vector<double> widths_;
};

/// Uniform fragmentation kernel: 1/r_tilde for r_tilde > r0 and 0 < r < r_tilde.
double kernel(double r, double r_tilde, double r0);

/// Closed form of int_0^inf r^(alpha-1) kappa(r, r_tilde) dr = r_tilde^(alpha-1)/alpha.
/// Throws std::invalid_argument for alpha <= 0 or r_tilde <= r0.
double kernel_moment(double alpha, double r_tilde, double r0);

/// Fragmentation rate per cell: -beta*psi + 2 int_r^{r_inf} beta kappa psi dr~.
///
/// The gain integral is the cell average of the piecewise-constant integrand,
/// evaluated with a suffix sum of q_i = beta_i psi_i dr_i / r_i; a cell receives
/// the full contribution of every longer cell and half of its own.
void frag_apply(const ChainGrid& grid, std::span<const double> psi, std::span<const double> beta,
                std::span<double> out);

/// Gain part of frag_apply alone (nonnegative for nonnegative input).
void frag_gain(const ChainGrid& grid, std::span<const double> psi, std::span<const double> beta,
               std::span<double> out);

/// Monomers released by fragments shorter than r0:
/// 2 int_0^{r0} r int beta kappa psi = r0^2 int beta psi / r~ dr~.
double monomer_gain(const ChainGrid& grid, std::span<const double> psi,
                    std::span<const double> beta);

/// Per-cell integrals of d/dr(r tau(r)), i.e. [r tau] at the upper edge minus
/// the lower edge. Dotted with cell averages of psi this is the exact
/// polymerization sink for piecewise-constant psi.
std::vector<double> sink_weights(const ChainGrid& grid, const std::function<double(double)>& tau);

/// int d_r(r tau) psi dr using precomputed sink_weights.
double polymer_sink_coefficient(std::span<const double> psi, std::span<const double> weights);
double polymer_sink_coefficient(const ChainGrid& grid, std::span<const double> psi,
                                const std::function<double(double)>& tau);

/// Exact per-cell integrals of r^alpha.
std::vector<double> moment_weights(const ChainGrid& grid, double alpha);

/// M_alpha = int r^alpha psi dr, with r^alpha integrated exactly per cell.
double moment(const ChainGrid& grid, std::span<const double> psi, double alpha);
double moment(std::span<const double> psi, std::span<const double> weights);

/// Upwind coefficients for the polymerization transport tau(r) phi d_r psi.
///
/// speed_k = [r tau]_{k-1/2} / (r_k dr_k). With this choice the change of the
/// first moment produced by growth_apply is exactly phi times
/// polymer_sink_coefficient, up to the outflow through r_inf.
std::vector<double> growth_speeds(const ChainGrid& grid, const std::function<double(double)>& tau);

/// out_k = -phi * speed_k * (psi_k - psi_{k-1}) with zero inflow (psi_{-1} = 0).
void growth_apply(std::span<const double> psi, std::span<const double> speeds, double phi,
                  std::span<double> out);

}  // namespace pflow
