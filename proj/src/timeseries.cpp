#include "pflow/timeseries.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "pflow/errors.hpp"

namespace pflow {

namespace {

std::string join_header() {
  std::string s;
  for (const auto& c : diagnostics_columns()) s += (s.empty() ? "" : ",") + c;
  return s;
}

}  // namespace

TimeSeriesWriter::TimeSeriesWriter(const std::string& path) : out_(path) {
  if (!out_) throw Error("cannot open '" + path + "' for writing");
  out_ << join_header() << '\n';
}

void TimeSeriesWriter::write(const DiagnosticsRecord& rec) { out_ << format_row(rec) << '\n'; }

std::string format_row(const DiagnosticsRecord& rec) {
  std::string s;
  char buf[64];
  for (double x : diagnostics_values(rec)) {
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    if (!s.empty()) s += ',';
    s.append(buf, res.ptr);
  }
  return s;
}

std::vector<DiagnosticsRecord> read_timeseries(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open time series '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != join_header())
    throw Error("time series '" + path + "' has an unexpected header");
  std::vector<DiagnosticsRecord> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> vals;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const auto comma = std::min(line.find(',', pos), line.size());
      double x = 0.0;
      const auto res = std::from_chars(line.data() + pos, line.data() + comma, x);
      if (res.ec != std::errc() || res.ptr != line.data() + comma)
        throw Error("time series line " + std::to_string(lineno) + ": malformed number");
      vals.push_back(x);
      pos = comma + 1;
    }
    if (vals.size() != diagnostics_columns().size())
      throw Error("time series line " + std::to_string(lineno) + ": expected " +
                  std::to_string(diagnostics_columns().size()) + " columns");
    rows.push_back(diagnostics_from_values(vals));
  }
  return rows;
}

std::vector<InvariantViolation> check_invariants(const std::vector<DiagnosticsRecord>& rows, const Tolerances& tol) {
  std::vector<InvariantViolation> out;
  auto note = [&](const char* name, long step, double value, bool larger_is_worse) {
    for (auto& v : out)
      if (v.invariant == name) {
        ++v.count;
        v.worst = larger_is_worse ? std::max(v.worst, value) : std::min(v.worst, value);
        return;
      }
    out.push_back({name, step, 1, value});
  };
  const double w0 = rows.empty() ? 0.0 : rows.front().weighted_l2;
  for (const auto& r : rows) {
    if (!(r.psi_min >= -tol.tol_pos)) note("minimum principle for psi", r.step, r.psi_min, false);
    if (!(r.phi_min >= -tol.tol_pos)) note("minimum principle for phi", r.step, r.phi_min, false);
    if (!(r.phi_max <= r.phi_bound * (1.0 + tol.tol_max))) note("maximum principle for phi", r.step, r.phi_max, true);
    if (!(r.mass_drift <= tol.tol_mass)) note("conservation of total mass", r.step, r.mass_drift, true);
    if (!(r.divergence <= tol.tol_div)) note("discrete incompressibility", r.step, r.divergence, true);
    if (w0 > 0.0) {
      const double ratio = (r.weighted_l2 + r.weighted_grad_cum) / w0;
      if (!(ratio <= tol.weighted_bound)) note("weighted r^3 estimate", r.step, ratio, true);
    }
  }
  return out;
}

}  // namespace pflow
