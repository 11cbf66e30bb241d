#include "pflow/poisson.hpp"

#include <cmath>
#include <sstream>

#include "pflow/errors.hpp"

namespace pflow {

namespace {

double dot(const Field2D& a, const Field2D& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a.data[k] * b.data[k];
  return s;
}

}  // namespace

void remove_mean(Field2D& f) {
  double s = 0.0;
  for (double v : f.data) s += v;
  const double mean = s / static_cast<double>(f.size());
  for (double& v : f.data) v -= mean;
}

void PoissonSolver::apply(const Field2D& p, Field2D& out) const {
  const int nx = grid_.nx(), ny = grid_.ny();
  const double ix2 = 1.0 / (grid_.dx() * grid_.dx());
  const double iy2 = 1.0 / (grid_.dy() * grid_.dy());
  const bool px = grid_.periodic_x(), py = grid_.periodic_y();
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double c = p(i, j);
      double s = 0.0;
      if (i > 0) s += (p(i - 1, j) - c) * ix2;
      else if (px) s += (p(nx - 1, j) - c) * ix2;
      if (i < nx - 1) s += (p(i + 1, j) - c) * ix2;
      else if (px) s += (p(0, j) - c) * ix2;
      if (j > 0) s += (p(i, j - 1) - c) * iy2;
      else if (py) s += (p(i, ny - 1) - c) * iy2;
      if (j < ny - 1) s += (p(i, j + 1) - c) * iy2;
      else if (py) s += (p(i, 0) - c) * iy2;
      out(i, j) = s;
    }
  }
}

PoissonResult PoissonSolver::solve(const Field2D& rhs_in, Field2D& p, double rel_tol, int max_iter) const {
  Field2D b = rhs_in;
  remove_mean(b);
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0) {
    for (double& v : p.data) v = 0.0;
    return {};
  }
  remove_mean(p);

  // CG on A = -L, positive definite on mean-zero fields: A p = -b
  Field2D r(b.nx, b.ny), d(b.nx, b.ny), q(b.nx, b.ny);
  apply(p, q);
  for (std::size_t k = 0; k < r.size(); ++k) r.data[k] = q.data[k] - b.data[k];
  remove_mean(r);
  d = r;
  double rr = dot(r, r);
  PoissonResult res;
  const double target = rel_tol * bnorm;
  int it = 0;
  while (std::sqrt(rr) > target && it < max_iter) {
    apply(d, q);
    for (double& v : q.data) v = -v;
    const double alpha = rr / dot(d, q);
    for (std::size_t k = 0; k < r.size(); ++k) {
      p.data[k] += alpha * d.data[k];
      r.data[k] -= alpha * q.data[k];
    }
    const double rr_new = dot(r, r);
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t k = 0; k < r.size(); ++k) d.data[k] = r.data[k] + beta * d.data[k];
    ++it;
  }
  remove_mean(p);
  res.iterations = it;
  res.residual = std::sqrt(rr) / bnorm;
  if (std::sqrt(rr) > target) {
    std::ostringstream os;
    os << "pressure Poisson did not converge: " << it << " iterations, relative residual " << res.residual;
    throw SolverError(os.str(), it, res.residual);
  }
  return res;
}

}  // namespace pflow
