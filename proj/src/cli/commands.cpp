#include "penudge/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <thread>

#include "penudge/detail/random.hpp"
#include "penudge/error.hpp"

namespace penudge::cli {
namespace fs = std::filesystem;
namespace {

using Clock = std::chrono::steady_clock;

std::ostream& log_of(const RunContext& ctx) { return ctx.log ? *ctx.log : std::cout; }

void say(const RunContext& ctx, const std::string& line) {
  if (!ctx.quiet) log_of(ctx) << line << "\n";
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

void write_timing(const fs::path& dir, Clock::time_point start) {
  Json j;
  j["wall_seconds"] = seconds_since(start);
  j["threads"] = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  write_json(dir / "timing.json", j);
}

Json config_block(const ExperimentConfig& c) {
  Json j;
  j["config"] = Json::parse(c.canonical_json());
  j["config_hash"] = c.hash();
  return j;
}

Json scheme_block(const ExperimentConfig& c) {
  Json j;
  j["time_stepping"] = "CNAB2 (Crank-Nicolson diffusion, Adams-Bashforth 2 advection)";
  j["horizontal"] = "Fourier pseudo-spectral, dealiased";
  j["vertical"] = "uniform nodes, second order";
  j["dt"] = c.sim.dt;
  j["projection_tolerance"] = ProjectedVelocity::kTolerance;
  j["cfl_max"] = c.sim.cfl_max;
  return j;
}

Json to_json(const GateConstants& g) {
  Json j;
  j["source"] = to_string(g.source);
  j["c0"] = g.c0;
  j["c1"] = g.c1;
  j["c_gate1"] = g.c_gate1;
  j["c_gate1_delta"] = g.c_gate1_delta;
  j["c_gate2"] = g.c_gate2;
  return j;
}

Json to_json(const GateReport& r) {
  Json j;
  j["sup_H2"] = r.sup_H2;
  j["mu"] = r.mu;
  j["delta"] = r.delta;
  j["pass"] = r.pass();
  j["pass_A"] = r.pass_A;
  j["pass_gate1"] = r.pass_gate1;
  j["pass_gate2"] = r.pass_gate2;
  j["margin_A"] = r.margin_A;
  j["margin_gate1"] = r.margin_gate1;
  j["margin_gate2"] = r.margin_gate2;
  return j;
}

Json to_json(const AxiomConstants& a) {
  Json j;
  j["c_bound"] = a.c_bound;
  j["c_approx"] = a.c_approx;
  j["n_probes"] = a.n_probes;
  return j;
}

Json to_json(const ObservationOp& J) {
  Json j;
  j["kind"] = to_string(J.kind);
  j["delta"] = J.delta();
  if (J.kind == ObservationKind::SpectralCutoff) j["K"] = J.cutoff;
  if (J.kind == ObservationKind::LocalAverage) j["h"] = J.cell;
  return j;
}

GateConstants gate_constants(const ExperimentConfig& c, const ProjectedVelocity& v,
                             const ObservationOp& J) {
  if (c.gates.mode == GateMode::Configured) {
    GateConstants g = c.gates.constants;
    g.source = GateSource::Configured;
    g.validate();
    return g;
  }
  ProbeSuite axiom = c.probes;
  return calibrate_gate_constants(v, J, c.gates.samples, detail::split_seed(c.seed, 2), axiom);
}

std::vector<double> or_default(const std::vector<double>& v, double d) {
  return v.empty() ? std::vector<double>{d} : v;
}

}  // namespace

SpinUpResult spin_up_reference(const ExperimentConfig& c) { return spin_up(c.sim, c.t_spin); }

TwinOutcome twin_experiment(const ExperimentConfig& c, const SpinUpResult& ref, double mu,
                            const ObservationOp& J, ForcingMode mode) {
  TwinOutcome o;
  o.mu = mu;
  o.J = J;
  o.delta = J.delta();
  o.mode = mode;
  const NudgeParams n = nudge_params(c, J, mu, mode, ref.state.v);
  n.validate(c.sim);

  TwinOptions opt;
  opt.t0_policy = c.nudge.t0_policy;
  opt.t0_window = c.nudge.t0_window;
  o.record = run_twin(ref.state, c.sim, n, opt);
  const TwinRecord& r = o.record;

  for (std::size_t i = 1; i < r.budget_residual.size(); ++i)
    o.budget_max_abs = std::max(o.budget_max_abs, std::abs(r.budget_residual[i]));

  try {
    auto [a, b] = default_decay_window(r.times, r.err_H1);
    a = std::max(a, r.t0);
    o.fit = fit_decay(r.times, r.err_H1, a, b);
  } catch (const Error& e) {
    o.fit_error = e.what();
  }
  if (r.times.size() >= 10) o.plateau = plateau(r.times, r.err_H1);

  o.axioms = estimate_constants(J, c.sim.grid, c.probes);
  o.constants = gate_constants(c, ref.state.v, J);
  double s = ref.tail_sup_h2;
  for (double h : r.ref_H2) s = std::max(s, h);
  o.gates = check_gates(s, mu, o.delta, o.constants);
  return o;
}

Json twin_summary(const ExperimentConfig& c, const TwinOutcome& o) {
  Json j = config_block(c);
  const TwinRecord& r = o.record;
  j["scheme"] = scheme_block(c);
  j["mu"] = o.mu;
  j["forcing_mode"] = to_string(o.mode);
  j["observation"] = to_json(o.J);
  j["t0"] = r.t0;
  j["samples"] = r.times.size();
  if (!r.times.empty()) {
    j["initial"] = {{"err_L2", r.err_L2.front()}, {"err_H1", r.err_H1.front()},
                    {"err_H2", r.err_H2.front()}};
    j["final"] = {{"t", r.times.back()},
                  {"err_L2", r.err_L2.back()},
                  {"err_H1", r.err_H1.back()},
                  {"err_H2", r.err_H2.back()}};
  }
  double ref_sup = 0.0;
  for (double h : r.ref_H2) ref_sup = std::max(ref_sup, h);
  j["reference_sup_H2"] = ref_sup;
  j["forcing_grad_sup"] = r.forcing_grad_sup;
  j["energy_budget_max_abs_residual"] = o.budget_max_abs;

  if (o.fit) {
    j["decay_fit"] = {{"norm", "H1"},
                      {"rate", o.fit->rate},
                      {"intercept", o.fit->intercept},
                      {"t_a", o.fit->t_a},
                      {"t_b", o.fit->t_b},
                      {"r_squared", o.fit->r_squared},
                      {"samples", o.fit->samples}};
  } else {
    j["decay_fit"] = nullptr;
    j["decay_fit_error"] = o.fit_error;
  }
  if (o.plateau) {
    Json p = {{"norm", "H1"},
              {"level", o.plateau->level},
              {"t_from", o.plateau->t_from},
              {"t_to", o.plateau->t_to},
              {"method", o.plateau->method}};
    const double denom = o.delta * r.forcing_grad_sup;
    p["C_empirical"] = denom > 0.0 ? Json(o.plateau->level / denom) : Json(nullptr);
    j["plateau"] = p;
  } else {
    j["plateau"] = nullptr;
  }
  j["axiom_constants"] = to_json(o.axioms);
  j["gate_constants"] = to_json(o.constants);
  j["gates"] = to_json(o.gates);
  return j;
}

int cmd_run_reference(const ExperimentConfig& c, const RunContext& ctx) {
  const auto start = Clock::now();
  const fs::path dir = c.output_dir;
  const SpinUpResult spin = spin_up_reference(c);
  write_checkpoint(dir / "checkpoint_spinup.bin", spin.state);
  say(ctx, "spin-up to t = " + fmt("%.6g", spin.state.t) + ", sup ||v||_H2 = " +
               fmt("%.6g", spin.sup_h2));

  std::vector<double> t, l2, h1, h2, div;
  const long steps = std::lround(std::ceil(c.sim.t_end / c.sim.dt - 1e-9));
  const long every = std::max(1L, std::lround(c.sim.sample_interval / c.sim.dt));
  StateSnapshot s = spin.state.restarted();
  auto record = [&] {
    t.push_back(s.t);
    l2.push_back(norm(s.v.velocity(), NormOrder::L2));
    h1.push_back(norm(s.v.velocity(), NormOrder::H1));
    h2.push_back(norm(s.v.velocity(), NormOrder::H2));
    div.push_back(check_div_constraint(s.v));
  };
  if (steps > 0) record();
  for (long k = 1; k <= steps; ++k) {
    s = step_reference(s, c.sim);
    if (k % every == 0 || k == steps) record();
  }
  write_csv(dir / "reference.csv",
            {{"t", t}, {"L2", l2}, {"H1", h1}, {"H2", h2}, {"div", div}});
  write_checkpoint(dir / "checkpoint_final.bin", s);

  Json j = config_block(c);
  j["scheme"] = scheme_block(c);
  j["spin_up"] = {{"t_spin", c.t_spin},
                  {"sup_H2", spin.sup_h2},
                  {"tail_sup_H2", spin.tail_sup_h2},
                  {"final_L2", spin.l2.empty() ? 0.0 : spin.l2.back()}};
  j["samples"] = t.size();
  j["sup_H2"] = h2.empty() ? 0.0 : *std::max_element(h2.begin(), h2.end());
  j["max_div_residual"] = div.empty() ? 0.0 : *std::max_element(div.begin(), div.end());
  if (!t.empty()) j["final"] = {{"t", t.back()}, {"L2", l2.back()}, {"H1", h1.back()},
                                {"H2", h2.back()}};
  write_json(dir / "summary.json", j);
  if (c.plot && !t.empty())
    write_svg(dir / "reference.svg", "reference norms", t, {{"L2", l2}, {"H1", h1}, {"H2", h2}});
  write_timing(dir, start);
  say(ctx, "reference run: " + std::to_string(t.size()) + " samples written to " + dir.string());
  return kExitOk;
}

int cmd_twin(const ExperimentConfig& c, const RunContext& ctx) {
  const auto start = Clock::now();
  const fs::path dir = c.output_dir;
  const SpinUpResult spin = spin_up_reference(c);
  const TwinOutcome o = twin_experiment(c, spin, c.nudge.mu, c.observation, c.nudge.forcing_mode);
  const TwinRecord& r = o.record;
  write_csv(dir / "twin.csv", {{"t", r.times},
                               {"err_L2", r.err_L2},
                               {"err_H1", r.err_H1},
                               {"err_H2", r.err_H2},
                               {"nudge_mag", r.nudge_mag},
                               {"budget_residual", r.budget_residual}});
  write_json(dir / "summary.json", twin_summary(c, o));
  if (c.plot)
    write_svg(dir / "twin.svg", "twin error", r.times,
              {{"err_L2", r.err_L2}, {"err_H1", r.err_H1}, {"err_H2", r.err_H2}});
  write_timing(dir, start);
  if (!r.times.empty())
    say(ctx, "twin: ||V||_H2 " + fmt("%.4g", r.err_H2.front()) + " -> " +
                 fmt("%.4g", r.err_H2.back()) +
                 (o.fit ? ", H1 decay rate " + fmt("%.4g", o.fit->rate) : std::string()) +
                 ", gates " + (o.gates.pass() ? "pass" : "fail"));
  return kExitOk;
}

int cmd_sweep(const ExperimentConfig& c, const RunContext& ctx) {
  const auto start = Clock::now();
  const fs::path dir = c.output_dir;
  const auto mus = or_default(c.sweep.mu, c.nudge.mu);
  const auto deltas = or_default(c.sweep.delta, c.observation.delta());
  const auto modes = c.sweep.forcing_mode.empty() ? std::vector<ForcingMode>{c.nudge.forcing_mode}
                                                  : c.sweep.forcing_mode;
  struct Cell {
    double mu, delta;
    ForcingMode mode;
    std::optional<TwinOutcome> outcome;
    std::string error;
  };
  std::vector<Cell> cells;
  for (double mu : mus)
    for (double d : deltas)
      for (ForcingMode m : modes) cells.push_back({mu, d, m, std::nullopt, {}});

  const SpinUpResult spin = spin_up_reference(c);
  say(ctx, "sweep: " + std::to_string(cells.size()) + " cells after spin-up to t = " +
               fmt("%.6g", spin.state.t));

  unsigned threads = c.sweep.threads > 0 ? static_cast<unsigned>(c.sweep.threads)
                                         : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(cells.size()));
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      Cell& cell = cells[i];
      char name[32];
      std::snprintf(name, sizeof name, "cell_%03zu", i);
      const fs::path cdir = dir / "cells" / name;
      try {
        const ObservationOp J = cell.delta > 0.0 ? observation_at(c, cell.delta)
                                                 : ObservationOp::identity();
        cell.outcome = twin_experiment(c, spin, cell.mu, J, cell.mode);
        const TwinRecord& r = cell.outcome->record;
        write_csv(cdir / "twin.csv", {{"t", r.times},
                                      {"err_L2", r.err_L2},
                                      {"err_H1", r.err_H1},
                                      {"err_H2", r.err_H2},
                                      {"nudge_mag", r.nudge_mag},
                                      {"budget_residual", r.budget_residual}});
        write_json(cdir / "summary.json", twin_summary(c, *cell.outcome));
      } catch (const std::exception& e) {
        cell.error = e.what();
        cell.outcome.reset();
      }
      std::lock_guard lock(log_mutex);
      say(ctx, std::string(name) + ": mu = " + fmt("%g", cell.mu) + ", delta = " +
                   fmt("%g", cell.delta) + ", " + to_string(cell.mode) +
                   (cell.outcome ? " ok" : " failed: " + cell.error));
    }
  };
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::vector<std::vector<std::string>> rows;
  Json jcells = Json::array();
  std::size_t failures = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Cell& cell = cells[i];
    Json jc = {{"cell", i}, {"mu", cell.mu}, {"delta", cell.delta},
               {"forcing_mode", to_string(cell.mode)}};
    std::vector<std::string> row = {std::to_string(i), format_csv_number(cell.mu),
                                    format_csv_number(cell.delta), to_string(cell.mode)};
    if (!cell.outcome) {
      ++failures;
      jc["status"] = "failed";
      jc["error"] = cell.error;
      row.insert(row.end(), {"failed", "", "", "", "", ""});
    } else {
      const TwinOutcome& o = *cell.outcome;
      const TwinRecord& r = o.record;
      const double ratio = r.err_H2.front() > 0.0 ? r.err_H2.back() / r.err_H2.front() : 0.0;
      jc["status"] = "ok";
      jc["rate"] = o.fit ? Json(o.fit->rate) : Json(nullptr);
      jc["r_squared"] = o.fit ? Json(o.fit->r_squared) : Json(nullptr);
      jc["plateau_H1"] = o.plateau ? Json(o.plateau->level) : Json(nullptr);
      jc["final_err_H2_ratio"] = ratio;
      jc["gates_pass"] = o.gates.pass();
      row.insert(row.end(),
                 {"ok", o.fit ? format_csv_number(o.fit->rate) : "",
                  o.fit ? format_csv_number(o.fit->r_squared) : "",
                  o.plateau ? format_csv_number(o.plateau->level) : "", format_csv_number(ratio),
                  o.gates.pass() ? "1" : "0"});
    }
    jcells.push_back(jc);
    rows.push_back(std::move(row));
  }
  write_csv_rows(dir / "index.csv",
                 {"cell", "mu", "delta", "forcing_mode", "status", "rate", "r_squared",
                  "plateau_H1", "final_err_H2_ratio", "gates_pass"},
                 rows);

  // Plateau against delta for every (mu, forcing mode).
  Json scaling = Json::array();
  for (double mu : mus)
    for (ForcingMode m : modes) {
      std::vector<std::pair<double, double>> pairs;
      for (const Cell& cell : cells)
        if (cell.mu == mu && cell.mode == m && cell.outcome && cell.outcome->plateau &&
            cell.delta > 0.0)
          pairs.emplace_back(cell.delta, cell.outcome->plateau->level);
      Json s = {{"mu", mu}, {"forcing_mode", to_string(m)}, {"points", pairs.size()}};
      try {
        s["slope"] = scaling_fit(pairs);
      } catch (const Error& e) {
        s["slope"] = nullptr;
        s["error"] = e.what();
      }
      scaling.push_back(s);
    }

  // Decay rate against mu for every (delta, forcing mode).
  Json rate_vs_mu = Json::array();
  for (double d : deltas)
    for (ForcingMode m : modes) {
      Json table = Json::array();
      for (const Cell& cell : cells)
        if (cell.delta == d && cell.mode == m)
          table.push_back({{"mu", cell.mu},
                           {"rate", cell.outcome && cell.outcome->fit
                                        ? Json(cell.outcome->fit->rate)
                                        : Json(nullptr)}});
      rate_vs_mu.push_back({{"delta", d}, {"forcing_mode", to_string(m)}, {"rows", table}});
    }

  Json index = config_block(c);
  index["cells"] = jcells;
  index["failures"] = failures;
  index["scaling_fit"] = scaling;
  index["rate_vs_mu"] = rate_vs_mu;
  write_json(dir / "index.json", index);
  write_timing(dir, start);
  say(ctx, "sweep: " + std::to_string(cells.size() - failures) + " of " +
               std::to_string(cells.size()) + " cells completed");
  return failures == cells.size() ? kExitNumerical : kExitOk;
}

int cmd_check(const ExperimentConfig& c, CheckKind which, const RunContext& ctx) {
  const fs::path dir = c.output_dir;
  Json j = config_block(c);
  bool pass = false;
  std::string name;
  switch (which) {
    case CheckKind::Observation: {
      name = "observation";
      const AxiomConstants a = estimate_constants(c.observation, c.sim.grid, c.probes);
      j["observation"] = to_json(c.observation);
      j["constants"] = to_json(a);
      // Both spectral kinds are contractions; the averaging operator is an
      // L2 projection. The approximation constant must be finite.
      pass = std::isfinite(a.c_bound) && std::isfinite(a.c_approx) && a.c_bound <= 1.0 + 1e-9;
      say(ctx, "observation " + std::string(to_string(c.observation.kind)) + ": C_bound = " +
                   fmt("%.6g", a.c_bound) + ", C_approx = " + fmt("%.6g", a.c_approx));
      break;
    }
    case CheckKind::Coercivity: {
      name = "coercivity";
      const SpinUpResult spin = spin_up_reference(c);
      const double margin = coercivity_probe(spin.state.v, c.nudge.mu, c.observation,
                                             c.coercivity_samples, detail::split_seed(c.seed, 3));
      j["mu"] = c.nudge.mu;
      j["sup_H2"] = spin.tail_sup_h2;
      j["samples"] = c.coercivity_samples;
      j["min_margin"] = margin;
      pass = margin >= 0.0;
      say(ctx, "coercivity at mu = " + fmt("%g", c.nudge.mu) + ": min margin = " +
                   fmt("%.6g", margin));
      break;
    }
    case CheckKind::Gates: {
      name = "gates";
      const SpinUpResult spin = spin_up_reference(c);
      const GateConstants gc = gate_constants(c, spin.state.v, c.observation);
      const double delta = c.observation.delta();
      const GateReport r = check_gates(spin.tail_sup_h2, c.nudge.mu, delta, gc);
      const auto mu_min = smallest_passing_mu(spin.tail_sup_h2, delta, gc);
      j["gate_constants"] = to_json(gc);
      j["report"] = to_json(r);
      j["smallest_passing_mu"] = mu_min ? Json(*mu_min) : Json(nullptr);
      pass = r.pass();
      say(ctx, "gates at mu = " + fmt("%g", c.nudge.mu) + ", delta = " + fmt("%g", delta) +
                   ", s = " + fmt("%.6g", spin.tail_sup_h2) + ": " + (pass ? "pass" : "fail") +
                   " (A " + fmt("%.4g", r.margin_A) + ", 1 " + fmt("%.4g", r.margin_gate1) +
                   ", 2 " + fmt("%.4g", r.margin_gate2) + ")");
      if (mu_min) say(ctx, "smallest passing mu: " + fmt("%.6g", *mu_min));
      break;
    }
  }
  j["pass"] = pass;
  write_json(dir / ("check_" + name + ".json"), j);
  return pass ? kExitOk : kExitCheckFailed;
}

int guarded(const std::function<int()>& f, std::ostream& err) {
  try {
    return f();
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const ConstraintError& e) {
    err << "constraint violated: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const SymmetryError& e) {
    err << "symmetry violated: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    err << "file error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace penudge::cli
