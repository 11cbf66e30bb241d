#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pflow {

struct SnapshotField {
  std::string name;
  std::vector<std::size_t> shape;  ///< row-major, last index fastest
  std::vector<double> data;
};

/// Binary field dump: the line "PFLOW1", one line of JSON header (grid
/// descriptors, chain-grid edges, time stamp, field list with shapes), then
/// little-endian 64-bit floats of every field in header order.
struct Snapshot {
  int nx = 0, ny = 0, nr = 0;
  double lx = 0.0, ly = 0.0;
  std::string bc_x, bc_y;
  std::vector<double> r_edges;
  double t = 0.0;
  long step = 0;
  std::vector<SnapshotField> fields;

  const SnapshotField& field(const std::string& name) const;
};

void write_snapshot(const std::string& path, const Snapshot& snap);
/// Throws pflow::Error on a bad magic line, malformed header, or truncated or
/// oversized payload.
Snapshot read_snapshot(const std::string& path);

}  // namespace pflow
