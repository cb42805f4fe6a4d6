#include <algorithm>
#include <cmath>
#include <sstream>

#include "hjm/cli.hpp"
#include "hjm/dynamics.hpp"

namespace hjm {

using nlohmann::json;

namespace {

std::vector<std::string> names(const std::vector<Symbol>& ss) {
  std::vector<std::string> out;
  for (const auto& s : ss) out.push_back(s.str());
  return out;
}

std::vector<std::string> rendered(const std::vector<Expr>& es) {
  std::vector<std::string> out;
  for (const auto& e : es) out.push_back(render(simplify(e)));
  return out;
}

json header(const Job& job, const char* command) {
  return {{"command", command}, {"problem", job.config.problem}, {"method", method_name(job.config.method)}};
}

json summary(const ResidualReport& r) {
  return {{"system", r.system}, {"samples", r.samples}, {"sup_norm", r.sup_norm}, {"tolerance", r.tolerance},
          {"pass", r.pass}};
}

const SimulationBlock& require_simulation(const Job& job) {
  if (!job.config.simulation) throw ConfigError("missing 'simulation' block");
  const auto& s = *job.config.simulation;
  if (!(s.h > 0)) throw ConfigError("simulation step h must be positive");
  return s;
}

Binding initial_binding(const Job& job, const ImplicitSystem& sys, const std::optional<ClosedOneForm>& gamma) {
  const auto& sim = require_simulation(job);
  Binding init = job.params;
  for (const auto& [k, v] : sim.initial) init[symbol_named(k)] = v;
  if (sim.lift) {
    if (!gamma) throw ConfigError("simulation.lift needs W or gamma");
    Binding base = job.params;
    for (const auto& x : gamma->coords) {
      auto it = init.find(x);
      if (it == init.end()) throw ConfigError("simulation.initial misses " + x.str());
      base[x] = it->second;
    }
    for (const auto& [s, v] : lift_point(*gamma, base)) init[s] = v;
  }
  std::vector<std::string> missing;
  for (const auto& s : sys.states)
    if (!init.count(s)) missing.push_back(s.str());
  if (!missing.empty()) {
    std::string m;
    for (const auto& s : missing) m += (m.empty() ? "" : ", ") + s;
    throw ConfigError("simulation.initial misses " + m);
  }
  return init;
}

double constraint_sup(const ImplicitSystem& sys, const Trajectory& tr) {
  double worst = 0;
  for (const auto& sample : tr.samples) {
    Binding b = tr.constants;
    for (const auto& [s, v] : sample) b[s] = v;
    for (const auto& c : sys.constraints) worst = std::max(worst, std::abs(eval(c, b)));
  }
  return worst;
}

/// Flow from the image of `on`, checked against `check`.
ResidualReport relatedness(const Job& job, const ClosedOneForm& on, const ClosedOneForm& check) {
  const auto& sim = require_simulation(job);
  auto sys = assemble(job.family);
  Binding base = job.params;
  for (const auto& x : on.coords) {
    auto it = sim.initial.find(x.str());
    if (it == sim.initial.end()) throw ConfigError("simulation.initial misses " + x.str());
    base[x] = it->second;
  }
  auto tr = integrate_rk4(sys, lift_point(on, base), sim.t0, sim.t1, sim.h);
  return gamma_relatedness(sys, check, tr, job.config.tolerances.relatedness);
}

void text_lines(std::ostringstream& os, const json& j, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * depth), ' ');
  auto scalar = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
  for (auto it = j.begin(); it != j.end(); ++it) {
    const json& v = it.value();
    if (it.key() == "values") continue;
    if (v.is_object()) {
      os << pad << it.key() << ":\n";
      text_lines(os, v, depth + 1);
    } else if (v.is_array()) {
      bool flat = std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_primitive(); });
      if (flat) {
        os << pad << it.key() << ":";
        if (v.empty()) os << " (none)";
        os << '\n';
        for (const auto& x : v) os << pad << "  " << scalar(x) << '\n';
      } else {
        os << pad << it.key() << ":\n";
        for (const auto& x : v) {
          os << pad << "  -\n";
          text_lines(os, x, depth + 2);
        }
      }
    } else {
      os << pad << it.key() << ": " << scalar(v) << '\n';
    }
  }
}

}  // namespace

std::string report_text(const json& report) {
  std::ostringstream os;
  text_lines(os, report, 0);
  return os.str();
}

CommandResult cmd_derive(const JobConfig& cfg) {
  Job job = build_job(cfg);
  json r = header(job, "derive");
  r["lagrangian"] = render(simplify(job.L.L));
  r["chart"] = space_name(job.family.base.space);
  if (job.gauge) r["gauge"] = render(simplify(*job.gauge));
  r["energy"] = render(simplify(job.family.E));
  r["fibers"] = names(job.family.fibers);
  if (cfg.method == Method::ostrogradsky) r["momenta"] = rendered(ostro_momenta(job.L));
  r["euler_lagrange"] = rendered(euler_lagrange(job.L));
  auto sys = assemble(job.family);
  json states = json::array();
  for (std::size_t i = 0; i < sys.states.size(); ++i)
    states.push_back(sys.states[i].str() + "' = " + render(simplify(sys.rhs[i])));
  r["implicit_system"] = {{"equations", states},
                          {"constraints", rendered(sys.constraints)},
                          {"multipliers", names(sys.multipliers)}};
  r["hamiltonian"] = job.hamiltonian ? json(render(simplify(*job.hamiltonian))) : json(nullptr);
  r["warnings"] = json::array();
  if (cfg.k == 2 || cfg.k == 3) {
    try {
      auto parts = affine_decompose(job.L);
      auto sym = affine_symmetry_check(parts.f, cfg.k - 1, job_sampling(job));
      r["affine_symmetry"] = summary(sym);
      if (!sym.pass)
        r["warnings"].push_back("affine symmetry check fails (sup " + json(sym.sup_norm).dump() + ")");
    } catch (const PreconditionError&) {
      r["affine_symmetry"] = "not affine in the top derivative";
    }
  }
  return {r, "", 0};
}

CommandResult cmd_simulate(const JobConfig& cfg) {
  Job job = build_job(cfg);
  const auto& sim = require_simulation(job);
  auto sys = assemble(job.family);
  auto gamma = job_gamma(job);
  Binding init = initial_binding(job, sys, gamma);
  json r = header(job, "simulate");
  r["t0"] = sim.t0;
  r["t1"] = sim.t1;
  r["h"] = sim.h;
  r["states"] = names(sys.states);
  r["multipliers"] = names(sys.multipliers);
  Trajectory tr;
  try {
    tr = integrate_rk4(sys, init, sim.t0, sim.t1, sim.h);
  } catch (const SingularJacobianError& e) {
    r["aborted"] = true;
    r["time"] = e.time();
    r["rank"] = e.rank();
    r["size"] = e.size();
    r["message"] = e.what();
    return {r, "", static_cast<int>(ExitCode::degenerate)};
  }
  if (gamma) tr = lift_trajectory(*gamma, tr);
  std::ostringstream csv;
  write_csv(csv, tr);
  r["aborted"] = false;
  r["steps"] = tr.times.empty() ? 0 : tr.times.size() - 1;
  r["energy_drift"] = energy_drift(tr);
  r["constraint_sup"] = constraint_sup(sys, tr);
  r["drift_tolerance"] = cfg.tolerances.drift;
  r["pass"] = energy_drift(tr) <= cfg.tolerances.drift;
  return {r, csv.str(), r["pass"].get<bool>() ? 0 : static_cast<int>(ExitCode::check_failed)};
}

CommandResult cmd_hjcheck(const JobConfig& cfg) {
  Job job = build_job(cfg);
  auto gamma = job_gamma(job);
  if (!gamma) throw ConfigError("hj-check needs W or gamma");
  auto opt = job_sampling(job);
  json r = header(job, "hj-check");
  r["equations"] = job.equations;
  auto rep = hj_residual(job.family, *gamma, opt);
  rep.system = job.equations;
  r["hj"] = rep.to_json();
  bool pass = rep.pass;
  if (job.hamiltonian) {
    try {
      r["hamiltonian_hj"] = summary(hj_residual_nondeg(*job.hamiltonian, *gamma, opt));
    } catch (const DomainExhaustedError& e) {
      r["hamiltonian_hj"] = e.what();
    }
  }
  if (cfg.simulation) {
    try {
      auto rel = relatedness(job, *gamma, *gamma);
      r["relatedness"] = rel.to_json();
      pass = pass && rel.pass;
      if (!cfg.perturb.empty()) r["relatedness_perturbed"] = summary(relatedness(job, *gamma, *job_gamma(job, cfg.perturb)));
    } catch (const DegeneracyError& e) {
      r["relatedness"] = {{"aborted", true}, {"rank", e.rank()}, {"size", e.size()}, {"message", e.what()}};
    }
  }
  r["pass"] = pass;
  return {r, "", pass ? 0 : static_cast<int>(ExitCode::check_failed)};
}

CommandResult cmd_solve_affine(const JobConfig& cfg) {
  Job job = build_job(cfg);
  auto parts = affine_decompose(job.L);
  auto opt = job_sampling(job);
  json r = header(job, "hj-solve-affine");
  r["f"] = rendered(parts.f);
  r["g"] = render(simplify(parts.g));
  auto sym = affine_symmetry_check(parts.f, parts.order - 1, opt);
  auto integ = affine_integrability_check(parts, opt);
  r["symmetry"] = summary(sym);
  r["integrability"] = summary(integ);
  if (!sym.pass || !integ.pass) {
    r["pass"] = false;
    return {r, "", static_cast<int>(ExitCode::check_failed)};
  }
  auto sol = affine_hj_solve(parts, opt);
  r["components"] = rendered(sol.components);
  r["closed"] = sol.closed;
  if (!sol.closed) {
    r["closure_pair"] = {sol.first, sol.second};
    r["closure_gap"] = sol.gap;
    r["pass"] = false;
    return {r, "", static_cast<int>(ExitCode::check_failed)};
  }
  r["W"] = sol.W ? json(render(*sol.W)) : json(nullptr);
  auto verify = hj_residual(ostro_energy(job.L), sol.form(), opt);
  r["verification"] = summary(verify);
  r["pass"] = verify.pass;
  return {r, "", verify.pass ? 0 : static_cast<int>(ExitCode::check_failed)};
}

CheckOutcome run_check(const Job& base_job, const Expectation& ex) {
  const json& a = ex.args;
  Job job = base_job;
  if (a.contains("W") || a.contains("gamma") || a.contains("params") || a.contains("method") || a.contains("gauge") ||
      a.contains("domain")) {
    JobConfig c = base_job.config;
    if (a.contains("W")) {
      c.W = a["W"].get<std::string>();
      c.gamma.clear();
    }
    if (a.contains("gamma")) {
      c.gamma = a["gamma"].get<std::vector<std::string>>();
      c.W.reset();
    }
    if (a.contains("params"))
      for (auto& [k, v] : a["params"].items()) c.params[k] = v.get<double>();
    if (a.contains("method")) c.method = method_from_name(a["method"].get<std::string>());
    if (a.contains("gauge")) c.gauge = a["gauge"].get<std::string>();
    if (a.contains("domain")) c.sample.domain = a["domain"].get<std::vector<std::string>>();
    job = build_job(c);
  }
  const auto opt = job_sampling(job);
  auto need_gamma = [&] {
    auto g = job_gamma(job);
    if (!g) throw ConfigError("check '" + ex.check + "' needs W or gamma");
    return *g;
  };
  CheckOutcome out;
  const std::string& k = ex.check;
  if (k == "derive") {
    auto r = cmd_derive(job.config).report;
    // each item is a constraint or an additive term of the energy
    Expr E = simplify(job.family.E);
    std::vector<Expr> terms = E.op() == Op::Add ? E.node().args : std::vector<Expr>{E};
    auto constraints = assemble(job.family).constraints;
    out.pass = true;
    for (const auto& s : a.value("contains", std::vector<std::string>{})) {
      Expr want = job_expr(job, s);
      bool found = std::any_of(terms.begin(), terms.end(), [&](const Expr& t) { return equal_numeric(t, want, 20, 1e-12); }) ||
                   std::any_of(constraints.begin(), constraints.end(),
                               [&](const Expr& c) { return equal_numeric(c, want, 20, 1e-12); });
      if (!found) out.pass = false;
    }
    out.detail = {{"energy", r["energy"]}, {"constraints", r["implicit_system"]["constraints"]}};
  } else if (k == "morse-rank") {
    auto rep = morse_rank_check(job.family, morse_sample_points(job.family, 20, job.config.seed, job.params));
    out.pass = rep.pass;
    out.detail = summary(rep);
  } else if (k == "hj") {
    auto rep = hj_residual(job.family, need_gamma(), opt);
    rep.system = job.equations;
    out.pass = rep.pass && rep.sup_norm <= a.value("max_sup", INFINITY);
    out.detail = summary(rep);
  } else if (k == "hj-nondeg") {
    std::optional<Expr> H = job.hamiltonian;
    if (a.value("hamiltonian", "") == "unscaled-pure-quadratic")
      H = unscaled_pure_quadratic_hamiltonian(Expr(Symbol::param("mu")));
    if (!H) throw ConfigError("no explicit Hamiltonian for " + job.config.problem);
    auto rep = hj_residual_nondeg(*H, need_gamma(), opt);
    out.pass = rep.pass;
    out.detail = summary(rep);
    out.detail["variation"] = rep.metrics.count("variation") ? rep.metrics.at("variation") : 0.0;
  } else if (k == "simulate") {
    auto res = cmd_simulate(job.config);
    const json& r = res.report;
    if (a.contains("abort_rank")) {
      out.pass = r["aborted"].get<bool>() && r["rank"] == a["abort_rank"] && r["size"] == a["abort_size"];
      out.detail = {{"aborted", r["aborted"]}};
      if (r["aborted"].get<bool>()) out.detail.update({{"rank", r["rank"]}, {"size", r["size"]}, {"time", r["time"]}});
    } else {
      out.pass = res.exit_code == 0 && r["energy_drift"].get<double>() <= a.value("max_drift", INFINITY);
      out.detail = {{"energy_drift", r["energy_drift"]}, {"constraint_sup", r["constraint_sup"]}};
    }
  } else if (k == "relatedness" || k == "relatedness-perturbed") {
    auto g = need_gamma();
    auto check = k == "relatedness" ? g : *job_gamma(job, job.config.perturb);
    auto rep = relatedness(job, g, check);
    out.pass = rep.pass;
    out.detail = summary(rep);
  } else if (k == "affine-symmetry") {
    auto parts = affine_decompose(job.L);
    auto rep = affine_symmetry_check(parts.f, parts.order - 1, opt);
    out.pass = rep.pass;
    out.detail = summary(rep);
  } else if (k == "affine-integrability") {
    auto rep = affine_integrability_check(affine_decompose(job.L), opt);
    out.pass = rep.pass;
    out.detail = summary(rep);
  } else if (k == "affine-solve") {
    auto res = cmd_solve_affine(job.config);
    out.pass = res.exit_code == 0;
    out.detail = {{"W", res.report.value("W", json(nullptr))},
                  {"verification", res.report.value("verification", json(nullptr))}};
  } else if (k == "pullback") {
    Expr F = job.gauge ? *job.gauge : solve_F_quadratic(job.L);
    out.pass = ostro_schmidt_pullback_check(job.L, F);
    out.detail = {{"gauge", render(simplify(F))}};
  } else {
    throw ConfigError("unknown check '" + k + "'");
  }
  return out;
}

}  // namespace hjm
