#include "pflow/snapshot.hpp"

#include <bit>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "pflow/errors.hpp"

namespace pflow {

namespace {

constexpr const char* kMagic = "PFLOW1";

void put_le(std::ostream& out, double x) {
  auto bits = std::bit_cast<std::uint64_t>(x);
  unsigned char b[8];
  for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>((bits >> (8 * k)) & 0xffu);
  out.write(reinterpret_cast<const char*>(b), 8);
}

double get_le(const unsigned char* b) {
  std::uint64_t bits = 0;
  for (int k = 7; k >= 0; --k) bits = (bits << 8) | b[k];
  return std::bit_cast<double>(bits);
}

std::size_t element_count(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (auto s : shape) n *= s;
  return n;
}

}  // namespace

const SnapshotField& Snapshot::field(const std::string& name) const {
  for (const auto& f : fields)
    if (f.name == name) return f;
  throw Error("snapshot has no field '" + name + "'");
}

void write_snapshot(const std::string& path, const Snapshot& snap) {
  nlohmann::ordered_json h;
  h["nx"] = snap.nx;
  h["ny"] = snap.ny;
  h["nr"] = snap.nr;
  h["lx"] = snap.lx;
  h["ly"] = snap.ly;
  h["bc_x"] = snap.bc_x;
  h["bc_y"] = snap.bc_y;
  h["r_edges"] = snap.r_edges;
  h["t"] = snap.t;
  h["step"] = snap.step;
  h["fields"] = nlohmann::ordered_json::array();
  for (const auto& f : snap.fields) {
    if (element_count(f.shape) != f.data.size()) throw Error("snapshot field '" + f.name + "' does not match its shape");
    h["fields"].push_back({{"name", f.name}, {"shape", f.shape}});
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << kMagic << '\n' << h.dump() << '\n';
  for (const auto& f : snap.fields)
    for (double x : f.data) put_le(out, x);
  if (!out) throw Error("write failed for '" + path + "'");
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open snapshot '" + path + "'");
  std::string magic, header;
  if (!std::getline(in, magic) || magic != kMagic) throw Error("'" + path + "' is not a PFLOW1 snapshot");
  if (!std::getline(in, header)) throw Error("snapshot '" + path + "' has no header");
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(header);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("snapshot header is not valid JSON: ") + e.what());
  }
  Snapshot s;
  try {
    s.nx = h.at("nx").get<int>();
    s.ny = h.at("ny").get<int>();
    s.nr = h.at("nr").get<int>();
    s.lx = h.at("lx").get<double>();
    s.ly = h.at("ly").get<double>();
    s.bc_x = h.at("bc_x").get<std::string>();
    s.bc_y = h.at("bc_y").get<std::string>();
    s.r_edges = h.at("r_edges").get<std::vector<double>>();
    s.t = h.at("t").get<double>();
    s.step = h.at("step").get<long>();
    for (const auto& f : h.at("fields")) s.fields.push_back({f.at("name"), f.at("shape"), {}});
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("snapshot header is incomplete: ") + e.what());
  }
  const std::vector<unsigned char> payload((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t need = 0;
  for (const auto& f : s.fields) need += element_count(f.shape);
  if (payload.size() != need * 8)
    throw Error("snapshot payload has " + std::to_string(payload.size()) + " bytes, header declares " +
                std::to_string(need * 8));
  std::size_t off = 0;
  for (auto& f : s.fields) {
    f.data.resize(element_count(f.shape));
    for (auto& x : f.data) {
      x = get_le(&payload[off]);
      off += 8;
    }
  }
  return s;
}

}  // namespace pflow
