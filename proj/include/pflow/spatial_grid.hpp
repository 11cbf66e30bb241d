#pragma once

#include <cstddef>
#include <vector>

namespace pflow {

enum class Boundary { periodic, slip_wall };

/// Uniform rectangular grid on [0, lx] x [0, ly] with a MAC (staggered) layout.
///
/// Scalars live at cell centers (nx x ny). The x-velocity u lives on x-faces
/// ((nx+1) x ny), the y-velocity w on y-faces (nx x (ny+1)); shear quantities
/// live on nodes ((nx+1) x (ny+1)). In a periodic direction the last face/node
/// column duplicates the first.
class SpatialGrid {
 public:
  SpatialGrid(int nx, int ny, double lx, double ly, Boundary bx, Boundary by);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double lx() const { return lx_; }
  double ly() const { return ly_; }
  double dx() const { return lx_ / nx_; }
  double dy() const { return ly_ / ny_; }
  double cell_area() const { return dx() * dy(); }
  double h_min() const { return dx() < dy() ? dx() : dy(); }
  Boundary bx() const { return bx_; }
  Boundary by() const { return by_; }
  bool periodic_x() const { return bx_ == Boundary::periodic; }
  bool periodic_y() const { return by_ == Boundary::periodic; }
  int cells() const { return nx_ * ny_; }

  /// Row-major center index, x fastest.
  std::size_t cell(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(i);
  }
  int wrap_x(int i) const { return (i % nx_ + nx_) % nx_; }
  int wrap_y(int j) const { return (j % ny_ + ny_) % ny_; }

 private:
  int nx_, ny_;
  double lx_, ly_;
  Boundary bx_, by_;
};

/// Dense 2D array, x fastest.
struct Field2D {
  int nx = 0;
  int ny = 0;
  std::vector<double> data;

  Field2D() = default;
  Field2D(int nx_, int ny_, double value = 0.0)
      : nx(nx_), ny(ny_), data(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_), value) {}

  double& operator()(int i, int j) { return data[index(i, j)]; }
  double operator()(int i, int j) const { return data[index(i, j)]; }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i);
  }
  std::size_t size() const { return data.size(); }
};

Field2D make_center_field(const SpatialGrid& g, double value = 0.0);
Field2D make_u_field(const SpatialGrid& g);
Field2D make_w_field(const SpatialGrid& g);
Field2D make_node_field(const SpatialGrid& g);

/// Copy face 0 onto face nx (x-periodic) and row 0 onto row ny (y-periodic).
void sync_periodic_u(const SpatialGrid& g, Field2D& u);
void sync_periodic_w(const SpatialGrid& g, Field2D& w);
void sync_periodic_nodes(const SpatialGrid& g, Field2D& n);

/// Independent faces/nodes: periodic duplicates are excluded.
int u_faces_x(const SpatialGrid& g);
int w_faces_y(const SpatialGrid& g);

}  // namespace pflow
