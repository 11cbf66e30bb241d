#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "pflow/config.hpp"
#include "pflow/diagnostics.hpp"

namespace pflow {

/// CSV writer; the header line is diagnostics_columns(), numbers use the
/// shortest round-trip representation.
class TimeSeriesWriter {
 public:
  explicit TimeSeriesWriter(const std::string& path);
  void write(const DiagnosticsRecord& rec);
  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
};

std::string format_row(const DiagnosticsRecord& rec);
std::vector<DiagnosticsRecord> read_timeseries(const std::string& path);

struct InvariantViolation {
  std::string invariant;  ///< e.g. "maximum principle for phi"
  long first_step = 0;
  long count = 0;
  double worst = 0.0;     ///< worst value of the violated quantity
};

/// Replays a series against the tolerances; empty result means all rows pass.
std::vector<InvariantViolation> check_invariants(const std::vector<DiagnosticsRecord>& rows, const Tolerances& tol);

}  // namespace pflow
