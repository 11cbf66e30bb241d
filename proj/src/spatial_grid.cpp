#include "pflow/spatial_grid.hpp"

#include <stdexcept>

namespace pflow {

SpatialGrid::SpatialGrid(int nx, int ny, double lx, double ly, Boundary bx, Boundary by)
    : nx_(nx), ny_(ny), lx_(lx), ly_(ly), bx_(bx), by_(by) {
  if (nx < 2 || ny < 2) throw std::invalid_argument("SpatialGrid: need at least 2 cells per direction");
  if (!(lx > 0.0) || !(ly > 0.0)) throw std::invalid_argument("SpatialGrid: lengths must be positive");
}

Field2D make_center_field(const SpatialGrid& g, double value) { return Field2D(g.nx(), g.ny(), value); }
Field2D make_u_field(const SpatialGrid& g) { return Field2D(g.nx() + 1, g.ny()); }
Field2D make_w_field(const SpatialGrid& g) { return Field2D(g.nx(), g.ny() + 1); }
Field2D make_node_field(const SpatialGrid& g) { return Field2D(g.nx() + 1, g.ny() + 1); }

void sync_periodic_u(const SpatialGrid& g, Field2D& u) {
  if (!g.periodic_x()) return;
  for (int j = 0; j < g.ny(); ++j) u(g.nx(), j) = u(0, j);
}

void sync_periodic_w(const SpatialGrid& g, Field2D& w) {
  if (!g.periodic_y()) return;
  for (int i = 0; i < g.nx(); ++i) w(i, g.ny()) = w(i, 0);
}

void sync_periodic_nodes(const SpatialGrid& g, Field2D& n) {
  if (g.periodic_x())
    for (int j = 0; j <= g.ny(); ++j) n(g.nx(), j) = n(0, j);
  if (g.periodic_y())
    for (int i = 0; i <= g.nx(); ++i) n(i, g.ny()) = n(i, 0);
}

int u_faces_x(const SpatialGrid& g) { return g.periodic_x() ? g.nx() : g.nx() + 1; }
int w_faces_y(const SpatialGrid& g) { return g.periodic_y() ? g.ny() : g.ny() + 1; }

}  // namespace pflow
