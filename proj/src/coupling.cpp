#include "pflow/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "pflow/errors.hpp"
#include "pflow/initial.hpp"
#include "pflow/phi_solver.hpp"
#include "pflow/timeseries.hpp"

namespace pflow {

StepControl step_control(const RunConfig& cfg) {
  StepControl c;
  c.cfl_adv = cfg.time.cfl_adv;
  c.cfl_r = cfg.time.cfl_r;
  c.cfl_diff = cfg.time.cfl_diff;
  c.dt_max = cfg.time.dt_max;
  c.splitting = cfg.time.splitting;
  c.max_retries = cfg.time.max_retries;
  c.poisson_tol = cfg.tolerances.poisson_tol;
  c.tol_div = cfg.tolerances.tol_div;
  c.tol_pos = cfg.tolerances.tol_pos;
  c.phi_truncation_k = cfg.tolerances.phi_truncation_k;
  c.theta1_star = cfg.theta1_star;
  return c;
}

Simulation::Simulation(const SpatialGrid& g, const ChainGrid& chain, const ModelCoefficients& coeffs,
                       const BodyForce& force, const StepControl& control, SimState initial)
    : grid_(g),
      chain_(chain),
      coeffs_(coeffs),
      force_(force),
      control_(control),
      psi_solver_(g, chain, coeffs),
      state_(std::move(initial)) {
  if (state_.phi.size() != static_cast<std::size_t>(g.cells()) || state_.psi.cells != g.cells() ||
      state_.psi.nr != chain.size())
    throw std::invalid_argument("Simulation: initial state does not match the grids");
  check_nonnegative(state_.psi.values, control_.tol_pos, "initial psi");
  check_nonnegative(state_.phi.data, control_.tol_pos, "initial phi");
  if (state_.p.q.size() != state_.phi.size()) state_.p.q = make_center_field(g);
  state_.psi_tilde = make_center_field(g);
  psi_solver_.average(state_.psi, state_.psi_tilde);
  stress_ = compute_stress_field(grid_, coeffs_, state_.psi_tilde, state_.v);
  rates_ = psi_solver_.rates(state_.v, stress_);
  e0_ = total_mass(grid_, chain_, state_.phi, state_.psi);
  double phi0 = 0.0;
  for (double x : state_.phi.data) phi0 = std::max(phi0, x);
  phi_bound_ = std::max(coeffs_.K * coeffs_.K, phi0);
  weighted0_ = weighted_l2_audit(grid_, chain_, psi_solver_.diffusivity(), state_.psi).norm;
  measure(0.0, nullptr, 0, 0, 0);
}

Simulation Simulation::from_config(const RunConfig& cfg) {
  check_config(cfg);
  const SpatialGrid g(cfg.grid.nx, cfg.grid.ny, cfg.grid.lx, cfg.grid.ly, cfg.grid.bc_x, cfg.grid.bc_y);
  const double r0 = cfg.coefficients.r0;
  const double r_inf = cfg.grid.r_inf > 0.0 ? cfg.grid.r_inf : select_r_inf(cfg.initial, r0, cfg.theta1_star);
  const ChainGrid chain(r0, r_inf, cfg.grid.nr, cfg.grid.r_stretch);
  SimState s;
  s.v = initial_velocity(g, cfg.initial.velocity, cfg.initial.velocity_amplitude, cfg.initial.seed);
  s.p.q = make_center_field(g);
  s.phi = initial_phi(g, cfg.initial);
  s.psi = initial_psi(g, chain, cfg.initial);
  Simulation sim(g, chain, make_default_coefficients(cfg.coefficients), cfg.force, step_control(cfg), std::move(s));
  sim.set_tolerances(cfg.tolerances);
  return sim;
}

double Simulation::stable_dt(double dt_max) const {
  double dt = std::min(dt_max, control_.dt_max);
  const double adv_rate = advective_courant(grid_, state_.v, 1.0);
  if (adv_rate > 0.0) dt = std::min(dt, control_.cfl_adv / adv_rate);
  Field2D phi = state_.phi;
  truncate_phi(control_.phi_truncation_k, phi);
  dt = std::min(dt, psi_solver_.kinetic_dt_limit(phi, rates_, control_.cfl_r));
  double diff = std::max(coeffs_.A0, stress_.nu_max);
  for (double a : psi_solver_.diffusivity()) diff = std::max(diff, a);
  if (diff > 0.0) dt = std::min(dt, control_.cfl_diff * grid_.h_min() * grid_.h_min() / diff);
  return dt;
}

const DiagnosticsRecord& Simulation::advance(double dt_max) {
  double dt = stable_dt(dt_max);
  for (int attempt_no = 0;; ++attempt_no) {
    try {
      attempt(dt, attempt_no);
      tally_.retries += attempt_no;
      return record_;
    } catch (const CflViolation& e) {
      if (attempt_no >= control_.max_retries)
        throw InvariantBreach("step abandoned after " + std::to_string(attempt_no + 1) + " attempts: " + e.what());
      dt = std::min(0.5 * dt, control_.cfl_r * e.required_dt());
    } catch (const InvariantBreach& e) {
      if (attempt_no >= control_.max_retries)
        throw InvariantBreach("step abandoned after " + std::to_string(attempt_no + 1) + " attempts: " + e.what());
      dt *= 0.5;
    }
  }
}

void Simulation::attempt(double dt, int retries) {
  SimState next = state_;
  const FluidStepResult fr = step_fluid(grid_, coeffs_, next.psi_tilde, force_, dt, stress_, next.v, next.p,
                                        next.history, control_.poisson_tol);
  if (!(fr.divergence <= control_.tol_div)) {
    std::ostringstream os;
    os << "discrete incompressibility: relative divergence " << fr.divergence << " > " << control_.tol_div;
    throw InvariantBreach(os.str());
  }
  KineticRates rates = psi_solver_.rates(next.v, fr.stress);
  Field2D gain = make_center_field(grid_), sink = make_center_field(grid_);
  int implicit = 0, truncated = 0;
  auto growth_level = [&](const Field2D& phi) {
    Field2D f = phi;
    truncated += truncate_phi(control_.phi_truncation_k, f);
    return f;
  };

  if (control_.splitting == Splitting::phi_first) {
    psi_solver_.reaction_coefficients(next.psi, rates, dt, gain, sink);
    const auto pi = step_phi(grid_, next.v, coeffs_.A0, gain, sink, dt, next.phi);
    const auto si = step_psi(psi_solver_, next.psi, growth_level(next.phi), rates, next.v, dt);
    implicit = pi.diffusion.implicit_components + si.diffusion.implicit_components;
  } else {
    const auto si = step_psi(psi_solver_, next.psi, growth_level(next.phi), rates, next.v, dt);
    psi_solver_.reaction_coefficients(next.psi, rates, dt, gain, sink);
    const auto pi = step_phi(grid_, next.v, coeffs_.A0, gain, sink, dt, next.phi);
    implicit = pi.diffusion.implicit_components + si.diffusion.implicit_components;
  }
  check_nonnegative(next.psi.values, control_.tol_pos, "psi");
  check_nonnegative(next.phi.data, control_.tol_pos, "phi");

  next.t += dt;
  next.step += 1;
  psi_solver_.average(next.psi, next.psi_tilde);
  state_ = std::move(next);
  stress_ = compute_stress_field(grid_, coeffs_, state_.psi_tilde, state_.v);
  rates_ = std::move(rates);
  measure(dt, &fr, implicit > 0 ? 1 : 0, truncated, retries);
}

void Simulation::measure(double dt, const FluidStepResult* fluid, int implicit, int truncated, int retries) {
  DiagnosticsRecord r;
  const auto& s = state_;
  r.step = s.step;
  r.t = s.t;
  r.dt = dt;
  r.total_mass = total_mass(grid_, chain_, s.phi, s.psi);
  r.mass_drift = e0_ > 0.0 ? std::abs(r.total_mass - e0_) / e0_ : std::abs(r.total_mass);
  if (fluid) {
    r.kinetic = fluid->energy.kinetic;
    r.dissipation = fluid->energy.dissipation;
    r.wall = fluid->energy.wall;
    r.power = fluid->energy.power;
    r.energy_residual = fluid->energy.residual;
    r.divergence = fluid->divergence;
    r.poisson_iterations = fluid->poisson_iterations;
  } else {
    r.kinetic = kinetic_energy(grid_, s.v);
    r.dissipation = stress_.dissipation;
    r.wall = stress_.wall;
    r.power = force_power(grid_, force_, s.v);
    r.divergence = relative_divergence(grid_, s.v);
  }
  r.m0 = total_moment(grid_, chain_, s.psi, 0.0);
  r.m1 = total_moment(grid_, chain_, s.psi, 1.0);
  r.m2 = total_moment(grid_, chain_, s.psi, 2.0);
  r.m3 = total_moment(grid_, chain_, s.psi, 3.0);
  r.m_theta = total_moment(grid_, chain_, s.psi, control_.theta1_star);
  const auto [pmin, pmax] = std::minmax_element(s.phi.data.begin(), s.phi.data.end());
  r.phi_min = *pmin;
  r.phi_max = *pmax;
  const auto [smin, smax] = std::minmax_element(s.psi.values.begin(), s.psi.values.end());
  r.psi_min = *smin;
  r.psi_max = *smax;
  const auto [tmin, tmax] = std::minmax_element(s.psi_tilde.data.begin(), s.psi_tilde.data.end());
  r.psi_tilde_min = *tmin;
  r.psi_tilde_max = *tmax;
  double tsum = 0.0;
  for (double x : s.psi_tilde.data) tsum += x;
  r.psi_tilde_mean = tsum / static_cast<double>(s.psi_tilde.size());
  const WeightedL2 wl = weighted_l2_audit(grid_, chain_, psi_solver_.diffusivity(), s.psi);
  r.weighted_l2 = wl.norm;
  r.weighted_grad_cum = record_.weighted_grad_cum + dt * wl.gradient;
  r.grad_phi_cum = record_.grad_phi_cum + dt * grad_phi_squared(grid_, s.phi);
  r.implicit_diffusion = implicit;
  r.retries = retries;
  r.phi_bound = phi_bound_;
  r.tail_fraction = tail_fraction(chain_, s.psi);
  r.truncation_active = truncated;
  record_ = r;

  auto& t = tally_;
  t.worst_mass_drift = std::max(t.worst_mass_drift, r.mass_drift);
  if (r.mass_drift > tol_.tol_mass) ++t.mass;
  t.worst_phi_ratio = std::max(t.worst_phi_ratio, r.phi_max / phi_bound_);
  if (r.phi_max > phi_bound_ * (1.0 + tol_.tol_max)) ++t.max_principle;
  t.worst_divergence = std::max(t.worst_divergence, r.divergence);
  if (weighted0_ > 0.0) {
    const double ratio = (r.weighted_l2 + r.weighted_grad_cum) / weighted0_;
    t.worst_weighted_ratio = std::max(t.worst_weighted_ratio, ratio);
    if (ratio > tol_.weighted_bound) ++t.weighted;
  }
  t.min_psi = std::min(t.min_psi, r.psi_min);
  t.min_phi = std::min(t.min_phi, r.phi_min);
  if (r.tail_fraction > 1e-6 && !t.tail_warning) {
    t.tail_warning = true;
    std::cerr << "warning: " << r.tail_fraction << " of the chain mass lies within 10% of r_inf at t=" << r.t
              << "; increase r_inf\n";
  }
}

Snapshot Simulation::snapshot() const {
  Snapshot s;
  s.nx = grid_.nx();
  s.ny = grid_.ny();
  s.nr = chain_.size();
  s.lx = grid_.lx();
  s.ly = grid_.ly();
  s.bc_x = grid_.periodic_x() ? "periodic" : "slip";
  s.bc_y = grid_.periodic_y() ? "periodic" : "slip";
  s.r_edges.assign(chain_.edges().begin(), chain_.edges().end());
  s.t = state_.t;
  s.step = state_.step;
  const auto ny = static_cast<std::size_t>(s.ny), nx = static_cast<std::size_t>(s.nx);
  s.fields.push_back({"u", {ny, nx + 1}, state_.v.u.data});
  s.fields.push_back({"w", {ny + 1, nx}, state_.v.w.data});
  s.fields.push_back({"q", {ny, nx}, state_.p.q.data});
  s.fields.push_back({"phi", {ny, nx}, state_.phi.data});
  s.fields.push_back({"psi_tilde", {ny, nx}, state_.psi_tilde.data});
  s.fields.push_back({"psi", {ny, nx, static_cast<std::size_t>(s.nr)}, state_.psi.values});
  return s;
}

namespace {

std::string snapshot_name(long step) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "snapshot_%06ld.pflow", step);
  return buf;
}

std::string build_report(const Simulation& sim, const RunConfig& cfg, bool ok, const std::string& abort_reason) {
  const auto& t = sim.tally();
  const auto& r = sim.diagnostics();
  nlohmann::ordered_json j;
  j["status"] = abort_reason.empty() ? (ok ? "ok" : "invariant_failure") : "aborted";
  if (!abort_reason.empty()) j["abort_reason"] = abort_reason;
  j["steps"] = r.step;
  j["t"] = r.t;
  j["r_inf"] = sim.chain().r_inf();
  j["initial_mass"] = sim.initial_mass();
  j["final_mass"] = r.total_mass;
  j["phi_bound"] = sim.phi_bound();
  j["retries"] = t.retries;
  j["tail_warning"] = t.tail_warning;
  auto& inv = j["invariants"];
  inv["conservation of total mass"] = {{"worst", t.worst_mass_drift},
                                       {"tolerance", cfg.tolerances.tol_mass},
                                       {"slack", cfg.tolerances.tol_mass - t.worst_mass_drift},
                                       {"breaches", t.mass}};
  inv["maximum principle for phi"] = {{"worst_ratio", t.worst_phi_ratio},
                                      {"tolerance", cfg.tolerances.tol_max},
                                      {"slack", 1.0 + cfg.tolerances.tol_max - t.worst_phi_ratio},
                                      {"breaches", t.max_principle}};
  inv["minimum principle for psi"] = {{"min", t.min_psi}};
  inv["minimum principle for phi"] = {{"min", t.min_phi}};
  inv["discrete incompressibility"] = {{"worst", t.worst_divergence},
                                       {"tolerance", cfg.tolerances.tol_div},
                                       {"slack", cfg.tolerances.tol_div - t.worst_divergence}};
  inv["weighted r^3 estimate"] = {{"worst_ratio", t.worst_weighted_ratio},
                                  {"bound", cfg.tolerances.weighted_bound},
                                  {"breaches", t.weighted}};
  return j.dump(2) + "\n";
}

}  // namespace

RunSummary run(const RunConfig& cfg, const std::string& out_dir) {
  check_config(cfg);
  const auto report = validate_coefficients(make_default_coefficients(cfg.coefficients));
  if (!report.all_pass()) throw ConfigError("coefficients violate the structural assumptions:\n" + format_report(report));

  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  Simulation sim = Simulation::from_config(cfg);
  TimeSeriesWriter series((dir / "timeseries.csv").string());
  series.write(sim.diagnostics());
  write_snapshot((dir / snapshot_name(0)).string(), sim.snapshot());
  long last_snapshot = 0;

  RunSummary out;
  const double t_end = cfg.time.t_final;
  std::string abort_reason;
  try {
    while (sim.state().t < t_end * (1.0 - 1e-12)) {
      const auto& rec = sim.advance(t_end - sim.state().t);
      const bool last = !(sim.state().t < t_end * (1.0 - 1e-12));
      if (rec.step % cfg.output.series_every == 0 || last) series.write(rec);
      if (cfg.output.snapshot_every > 0 && rec.step % cfg.output.snapshot_every == 0) {
        write_snapshot((dir / snapshot_name(rec.step)).string(), sim.snapshot());
        last_snapshot = rec.step;
        series.flush();
      }
    }
  } catch (const Error& e) {
    abort_reason = e.what();
  }
  if (sim.state().step != last_snapshot) write_snapshot((dir / snapshot_name(sim.state().step)).string(), sim.snapshot());
  series.flush();

  const auto& t = sim.tally();
  out.steps = sim.state().step;
  out.t = sim.state().t;
  out.tally = t;
  out.invariants_ok = abort_reason.empty() && t.mass == 0 && t.max_principle == 0 && t.weighted == 0;
  out.report = build_report(sim, cfg, out.invariants_ok, abort_reason);
  std::ofstream(dir / "report.json") << out.report;
  if (!abort_reason.empty()) throw InvariantBreach(abort_reason);
  return out;
}

}  // namespace pflow
