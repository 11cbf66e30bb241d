#include "pflow/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "pflow/errors.hpp"

namespace pflow {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out))
    throw std::invalid_argument("expected a finite number, got '" + v + "'");
  return out;
}

template <class T>
T parse_integer(const std::string& v) {
  T out{};
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw std::invalid_argument("expected an integer, got '" + v + "'");
  return out;
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

template <class E>
using NameTable = std::vector<std::pair<E, const char*>>;

template <class E>
E parse_enum(const std::string& v, const NameTable<E>& table) {
  for (const auto& [e, name] : table)
    if (v == name) return e;
  std::string opts;
  for (const auto& [e, name] : table) opts += std::string(opts.empty() ? "" : ", ") + name;
  throw std::invalid_argument("expected one of {" + opts + "}, got '" + v + "'");
}

template <class E>
std::string enum_name(E e, const NameTable<E>& table) {
  for (const auto& [x, name] : table)
    if (x == e) return name;
  return "?";
}

const NameTable<Boundary> kBoundary{{Boundary::periodic, "periodic"}, {Boundary::slip_wall, "slip"}};
const NameTable<Stretching> kStretch{{Stretching::uniform, "uniform"}, {Stretching::geometric, "geometric"}};
const NameTable<ViscosityClosure> kClosure{{ViscosityClosure::flory, "flory"},
                                           {ViscosityClosure::crossover, "crossover"}};
const NameTable<BodyForce::Kind> kForce{
    {BodyForce::Kind::none, "none"}, {BodyForce::Kind::uniform, "uniform"}, {BodyForce::Kind::cellular, "cellular"}};
const NameTable<VelocityInit> kVelocity{{VelocityInit::rest, "rest"},
                                        {VelocityInit::cellular, "cellular"},
                                        {VelocityInit::taylor_green, "taylor_green"},
                                        {VelocityInit::random, "random"}};
const NameTable<Pattern> kPattern{
    {Pattern::constant, "constant"}, {Pattern::gaussian, "gaussian"}, {Pattern::random, "random"}};
const NameTable<PsiShape> kShape{
    {PsiShape::exponential, "exponential"}, {PsiShape::gamma, "gamma"}, {PsiShape::box, "box"}};
const NameTable<Splitting> kSplitting{{Splitting::phi_first, "phi_first"}, {Splitting::psi_first, "psi_first"}};

struct Binding {
  std::string section;
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(RunConfig&)> get;
};

template <class Acc>
Binding real(const char* sec, const char* key, Acc acc) {
  return {sec, key, [acc](RunConfig& c, const std::string& v) { acc(c) = parse_double(v); },
          [acc](RunConfig& c) { return format_double(acc(c)); }};
}

template <class Acc>
Binding integer(const char* sec, const char* key, Acc acc) {
  return {sec, key,
          [acc](RunConfig& c, const std::string& v) {
            acc(c) = parse_integer<std::remove_reference_t<decltype(acc(c))>>(v);
          },
          [acc](RunConfig& c) { return std::to_string(acc(c)); }};
}

template <class Acc, class E>
Binding choice(const char* sec, const char* key, Acc acc, const NameTable<E>& table) {
  return {sec, key, [acc, &table](RunConfig& c, const std::string& v) { acc(c) = parse_enum(v, table); },
          [acc, &table](RunConfig& c) { return enum_name(acc(c), table); }};
}

#define ACC(expr) [](RunConfig& c) -> auto& { return c.expr; }

const std::vector<Binding>& bindings() {
  static const std::vector<Binding> b = {
      integer("grid", "nx", ACC(grid.nx)),
      integer("grid", "ny", ACC(grid.ny)),
      real("grid", "lx", ACC(grid.lx)),
      real("grid", "ly", ACC(grid.ly)),
      choice("grid", "bc_x", ACC(grid.bc_x), kBoundary),
      choice("grid", "bc_y", ACC(grid.bc_y), kBoundary),
      integer("grid", "nr", ACC(grid.nr)),
      real("grid", "r0", ACC(coefficients.r0)),
      {"grid", "r_inf",
       [](RunConfig& c, const std::string& v) { c.grid.r_inf = v == "auto" ? 0.0 : parse_double(v); },
       [](RunConfig& c) { return c.grid.r_inf == 0.0 ? std::string("auto") : format_double(c.grid.r_inf); }},
      choice("grid", "r_stretch", ACC(grid.r_stretch), kStretch),

      real("coefficients", "K", ACC(coefficients.K)),
      real("coefficients", "A_max", ACC(coefficients.A_max)),
      real("coefficients", "A0", ACC(coefficients.A0)),
      real("coefficients", "tau_max", ACC(coefficients.tau_max)),
      real("coefficients", "k_tau", ACC(coefficients.k_tau)),
      real("coefficients", "beta0", ACC(coefficients.beta0)),
      real("coefficients", "b1", ACC(coefficients.b1)),
      real("coefficients", "b_v", ACC(coefficients.b_v)),
      real("coefficients", "theta", ACC(coefficients.theta)),
      choice("coefficients", "closure", ACC(coefficients.viscosity.closure), kClosure),
      real("coefficients", "p", ACC(coefficients.viscosity.p)),
      real("coefficients", "nu_ref", ACC(coefficients.viscosity.nu_ref)),
      real("coefficients", "nu_inf", ACC(coefficients.viscosity.nu_inf)),
      real("coefficients", "c_F", ACC(coefficients.viscosity.c_flory)),
      real("coefficients", "flory_cap", ACC(coefficients.viscosity.flory_cap)),
      real("coefficients", "delta_nu", ACC(coefficients.viscosity.delta_nu)),
      real("coefficients", "alpha_star", ACC(coefficients.alpha_star)),
      real("coefficients", "theta1_star", ACC(theta1_star)),
      real("coefficients", "tau_const", ACC(tau_const)),
      choice("coefficients", "force", ACC(force.kind), kForce),
      real("coefficients", "force_x", ACC(force.fx)),
      real("coefficients", "force_y", ACC(force.fy)),

      choice("initial", "velocity", ACC(initial.velocity), kVelocity),
      real("initial", "velocity_amplitude", ACC(initial.velocity_amplitude)),
      choice("initial", "phi", ACC(initial.phi), kPattern),
      real("initial", "phi_level", ACC(initial.phi_level)),
      real("initial", "phi_amplitude", ACC(initial.phi_amplitude)),
      real("initial", "psi_number", ACC(initial.psi_number)),
      choice("initial", "psi_pattern", ACC(initial.psi_pattern), kPattern),
      real("initial", "psi_amplitude", ACC(initial.psi_amplitude)),
      choice("initial", "psi_shape", ACC(initial.psi_shape), kShape),
      real("initial", "psi_scale", ACC(initial.psi_scale)),
      integer("initial", "seed", ACC(initial.seed)),

      real("time", "t_final", ACC(time.t_final)),
      real("time", "cfl_adv", ACC(time.cfl_adv)),
      real("time", "cfl_r", ACC(time.cfl_r)),
      real("time", "cfl_diff", ACC(time.cfl_diff)),
      real("time", "dt_max", ACC(time.dt_max)),
      choice("time", "splitting", ACC(time.splitting), kSplitting),
      integer("time", "max_retries", ACC(time.max_retries)),
      real("time", "zero_dim_dt", ACC(time.zero_dim_dt)),

      integer("output", "snapshot_every", ACC(output.snapshot_every)),
      integer("output", "series_every", ACC(output.series_every)),

      real("tolerances", "tol_mass", ACC(tolerances.tol_mass)),
      real("tolerances", "tol_max", ACC(tolerances.tol_max)),
      real("tolerances", "tol_pos", ACC(tolerances.tol_pos)),
      real("tolerances", "tol_div", ACC(tolerances.tol_div)),
      real("tolerances", "poisson_tol", ACC(tolerances.poisson_tol)),
      real("tolerances", "weighted_bound", ACC(tolerances.weighted_bound)),
      real("tolerances", "phi_truncation_k", ACC(tolerances.phi_truncation_k)),
  };
  return b;
}

#undef ACC

const std::vector<std::string> kSections{"grid", "coefficients", "initial", "time", "output", "tolerances"};

void require(bool ok, const std::string& rule) {
  if (!ok) throw ConfigError(rule);
}

}  // namespace

void check_config(const RunConfig& c) {
  const auto& g = c.grid;
  const auto& k = c.coefficients;
  const auto& v = k.viscosity;
  require(g.nx >= 2 && g.ny >= 2, "grid: nx and ny must be at least 2");
  require(g.lx > 0.0 && g.ly > 0.0, "grid: lx and ly must be positive");
  require(g.nr >= 2, "grid: nr must be at least 2");
  require(k.r0 > 0.0, "grid: r0 must be positive (r0 = 0 is excluded)");
  require(g.r_inf == 0.0 || g.r_inf > k.r0, "grid: r_inf must exceed r0");
  require(k.K > 0.0, "coefficients: K must be positive");
  require(k.A_max > 0.0, "(A1) chain diffusivity: A_max must be positive");
  require(k.A0 > 0.0, "coefficients: monomer diffusivity A0 must be positive");
  require(k.tau_max > 0.0, "(A2) polymerization rate: tau_max must be positive");
  require(k.k_tau > 0.0, "(A2) polymerization rate: k_tau must be positive so that tau'(r0) > 0");
  require(k.beta0 > 0.0, "(A3) fragmentation rate: beta0 must be positive");
  require(k.b1 >= 0.0 && k.b_v >= 0.0, "(A3) fragmentation rate: b1 and b_v must be nonnegative");
  require(k.theta > 0.0, "(A5) averaging weight: theta must be positive");
  require(v.p > 1.0, "(A6) stress: p must exceed 2d/(d+2) = 1");
  require(v.nu_ref > 0.0 && v.nu_inf >= 0.0, "(A6) stress: nu_ref > 0 and nu_inf >= 0 required");
  require(v.c_flory >= 0.0 && v.flory_cap > 0.0, "(A6) stress: c_F >= 0 and flory_cap > 0 required");
  require(v.delta_nu > 0.0, "(A6) stress: delta_nu must be positive");
  if (v.closure == ViscosityClosure::crossover)
    require(v.nu_inf > 0.0, "(A6) stress: the crossover closure needs nu_inf > 0");
  require(k.alpha_star >= 0.0, "coefficients: alpha_star must be nonnegative");
  require(c.theta1_star > 0.0, "coefficients: theta1_star must be positive");
  require(c.tau_const > 0.0, "coefficients: tau_const must be positive");
  const auto& in = c.initial;
  require(in.velocity_amplitude >= 0.0, "initial: velocity_amplitude must be nonnegative");
  require(in.phi_level >= 0.0 && in.phi_amplitude >= 0.0, "initial: phi0 must be nonnegative");
  require(in.psi_number >= 0.0 && in.psi_amplitude >= 0.0, "initial: psi0 must be nonnegative");
  require(in.psi_scale > 0.0, "initial: psi_scale must be positive");
  const auto& t = c.time;
  require(t.t_final >= 0.0, "time: t_final must be nonnegative");
  require(t.cfl_adv > 0.0 && t.cfl_adv <= 1.0, "time: cfl_adv must lie in (0, 1]");
  require(t.cfl_r > 0.0 && t.cfl_r <= 1.0, "time: cfl_r must lie in (0, 1]");
  require(t.cfl_diff > 0.0, "time: cfl_diff must be positive");
  require(t.dt_max > 0.0, "time: dt_max must be positive");
  require(t.max_retries >= 0, "time: max_retries must be nonnegative");
  require(t.zero_dim_dt > 0.0, "time: zero_dim_dt must be positive");
  require(c.output.snapshot_every >= 0, "output: snapshot_every must be nonnegative");
  require(c.output.series_every >= 1, "output: series_every must be at least 1");
  const auto& tol = c.tolerances;
  require(tol.tol_mass > 0.0 && tol.tol_max > 0.0 && tol.tol_div > 0.0 && tol.poisson_tol > 0.0,
          "tolerances: tol_mass, tol_max, tol_div and poisson_tol must be positive");
  require(tol.tol_pos >= 0.0, "tolerances: tol_pos must be nonnegative");
  require(tol.weighted_bound > 1.0, "tolerances: weighted_bound must exceed 1");
  require(tol.phi_truncation_k >= 0.0, "tolerances: phi_truncation_k must be nonnegative");
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  std::set<std::string> seen;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header '" + line + "'", lineno);
      section = trim(line.substr(1, line.size() - 2));
      if (std::find(kSections.begin(), kSections.end(), section) == kSections.end())
        throw ConfigError("unknown section [" + section + "]", lineno);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", lineno);
    if (section.empty()) throw ConfigError("key outside of any section", lineno);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& bs = bindings();
    const auto it = std::find_if(bs.begin(), bs.end(),
                                 [&](const Binding& b) { return b.section == section && b.key == key; });
    if (it == bs.end()) throw ConfigError("unknown key '" + key + "' in [" + section + "]", lineno);
    if (!seen.insert(section + "." + key).second) throw ConfigError("duplicate key '" + key + "'", lineno);
    try {
      it->set(cfg, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key + ": " + e.what(), lineno);
    }
  }
  check_config(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const RunConfig& config) {
  RunConfig c = config;
  std::ostringstream os;
  std::string section;
  for (const auto& b : bindings()) {
    if (b.section != section) {
      if (!section.empty()) os << '\n';
      section = b.section;
      os << '[' << section << "]\n";
    }
    os << b.key << " = " << b.get(c) << '\n';
  }
  return os.str();
}

}  // namespace pflow
