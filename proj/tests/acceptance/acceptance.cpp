#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "hjm/cli.hpp"
#include "hjm/dynamics.hpp"
#include "hjm/schmidt.hpp"
#include "oracle/discrete_action.hpp"
#include "oracle/random_expr.hpp"

using namespace hjm;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Expr P(const char* s) { return parse(s); }
bool same_value(const Expr& a, const Expr& b) { return equal_numeric(a, b, 100, 1e-10); }

Symbol param(const char* n) { return Symbol::param(n); }

LagrangianSpec beam() { return LagrangianSpec::make(1, 2, P("mu*q1_2^2/2 + rho*q1_0")); }
LagrangianSpec javelin() { return LagrangianSpec::make(1, 2, P("q1_1^2/2 - q1_2^2/2")); }

Outcome beam_derivation() {
  Outcome o;
  auto t0 = Clock::now();
  auto mf = ostro_energy(beam());
  auto sys = assemble(mf);
  double took = seconds_since(t0);
  o.require(same_value(mf.E, P("p1_0*q1_1 + p1_1*q1_2 - mu*q1_2^2/2 - rho*q1_0")), "energy function");
  o.require(same_value(sys.rhs_of(Symbol::q(1, 0)), P("q1_1")), "q0'");
  o.require(same_value(sys.rhs_of(Symbol::q(1, 1)), P("q1_2")), "q1'");
  o.require(same_value(sys.rhs_of(Symbol::p(1, 0)), P("rho")), "p0'");
  o.require(same_value(sys.rhs_of(Symbol::p(1, 1)), P("-p1_0")), "p1'");
  o.require(sys.constraints.size() == 1 && same_value(sys.constraints[0], P("p1_1 - mu*q1_2")), "constraint");
  o.require(took < 1.0, "runtime " + num(took) + " s");
  o.note("derivation " + num(took) + " s");
  return o;
}

Outcome beam_dynamics() {
  Outcome o;
  const double mu = 1.3, rho = 0.7, x0 = 0.2, v0 = -0.1, a0 = 0.4, j0 = -0.5;
  auto sys = assemble(ostro_energy(beam()));
  Binding init{{Symbol::q(1, 0), x0}, {Symbol::q(1, 1), v0}, {Symbol::p(1, 0), -mu * j0},
               {Symbol::p(1, 1), mu * a0}, {param("mu"), mu}, {param("rho"), rho}};
  auto exact = [&](double t) {
    return x0 + v0 * t + a0 * t * t / 2 + j0 * t * t * t / 6 - rho / mu * t * t * t * t / 24;
  };
  auto error = [&](double h, double* drift) {
    auto tr = integrate_rk4(sys, init, 0, 1, h);
    double worst = 0;
    for (std::size_t i = 0; i < tr.times.size(); ++i)
      worst = std::max(worst, std::abs(tr.samples[i].at(Symbol::q(1, 0)) - exact(tr.times[i])));
    if (drift) *drift = energy_drift(tr);
    return worst;
  };
  double drift = 0;
  double e1 = error(1e-3, &drift);
  double e2 = error(5e-4, nullptr);
  double ratio = e2 > 0 ? e1 / e2 : INFINITY;
  o.require(e1 <= 1e-8, "sup error " + num(e1));
  o.require(drift <= 1e-8, "energy drift " + num(drift));
  o.require(ratio >= 12 && ratio <= 20, "Richardson ratio " + num(ratio) + " (errors " + num(e1) + ", " + num(e2) + ")");
  if (o.pass) o.note("sup error " + num(e1) + ", drift " + num(drift) + ", ratio " + num(ratio));
  return o;
}

Outcome javelin_ostrogradsky_hj() {
  Outcome o;
  auto base = ChartSpec::standard(Space::TstarTk1Q, 1, 2);
  auto gamma = ClosedOneForm::from_components(base, {P("A"), P("2^(1/2)*(A*q1_1 - q1_1^2/2 - B)^(1/2)")});
  SampleOptions opt;
  opt.tol = 1e-9;
  opt.fixed = {{param("A"), 1.0}, {param("B"), 0.0}};
  opt.domain = {P("A*q1_1 - q1_1^2/2 - B - 1/10")};
  auto rep = hj_residual(ostro_energy(javelin()), gamma, opt);
  o.require(rep.pass, "sup-norm " + num(rep.sup_norm));
  o.note("sup-norm " + num(rep.sup_norm) + " over " + std::to_string(rep.samples) + " points");
  return o;
}

Outcome javelin_schmidt_hj() {
  Outcome o;
  Expr H = schmidt_hamiltonian(javelin(), P("a1_0*q1_1"));
  Expr W = P("ln(a1_0 + (a1_0^2 + 2*c)^(1/2))/2^(1/2) + a1_0*(a1_0^2 + 2*c)^(1/2)/(2*2^(1/2))");
  auto gamma = ClosedOneForm::from_potential(ChartSpec::standard(Space::TstarAQ, 1, 2), W);
  Expr Hg = substitute(H, gamma.substitution());
  double lo = INFINITY, hi = -INFINITY;
  for (int i = 0; i <= 200; ++i) {
    double v = eval(Hg, {{Symbol::q(1, 0), 0.3}, {Symbol::a(1, 0), -1 + i / 100.0}, {param("c"), 1.0}});
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  o.require(hi - lo <= 1e-8, "printed W: H o dW varies by " + num(hi - lo) + " on a0 in [-1, 1]");
  return o;
}

Outcome degenerate_model() {
  Outcome o;
  auto L = LagrangianSpec::make(3, 2, P("(q1_2 + q2_2)^2/2"));
  auto mf = ostro_energy(L);
  auto gamma = ClosedOneForm::from_potential(mf.base, P("c*q1_1 + c*q2_1"));
  auto sys_hj = hj_system(mf, gamma);
  bool symbolic = true;
  for (const auto& e : sys_hj.base_equations) symbolic = symbolic && simplify(e).is_zero();
  SampleOptions opt;
  opt.tol = 1e-12;
  auto rep = hj_residual(mf, gamma, opt);
  o.require(rep.sup_norm <= 1e-12, "residual sup-norm " + num(rep.sup_norm));
  auto sys = assemble(mf);
  Binding at{{param("c"), 0.5}};
  double v = 0.1;
  for (const auto& s : sys.states) at[s] = (v += 0.1);
  try {
    resolve_multipliers(sys, at);
    o.require(false, "resolve_multipliers did not report a singular Jacobian");
  } catch (const SingularJacobianError& e) {
    o.require(e.rank() == 1 && e.size() == 3,
              "rank " + std::to_string(e.rank()) + " of " + std::to_string(e.size()));
    if (o.pass) o.note("rank 1 of 3");
  }
  o.note(std::string("base equations ") + (symbolic ? "simplify to 0" : "numerically zero") + ", sup-norm " +
         num(rep.sup_norm));
  return o;
}

Outcome ostro_schmidt_equivalence() {
  Outcome o;
  Binding params{{param("mu"), 1.3}, {param("rho"), 0.7}};
  for (const auto& [name, L] : {std::pair{"beam", beam()}, std::pair{"javelin", javelin()}}) {
    Expr F = solve_F_quadratic(L);
    o.require(ostro_schmidt_pullback_check(L, F), std::string(name) + " pullback identity");
    Binding jet = params;
    jet[Symbol::q(1, 0)] = 0.3;
    jet[Symbol::q(1, 1)] = -0.2;
    jet[Symbol::q(1, 2)] = 0.5;
    jet[Symbol::q(1, 3)] = 0.1;
    Binding oi = ostro_initial_from_jet(L, jet), si = schmidt_initial_from_jet(L, F, jet);
    for (const auto& [k, v] : params) oi[k] = si[k] = v;
    auto to = integrate_rk4(assemble(ostro_energy(L)), oi, 0, 1, 1e-3);
    auto ts = integrate_rk4(assemble(schmidt_morse_family(L, F)), si, 0, 1, 1e-3);
    double worst = to.times.size() == ts.times.size() ? 0 : INFINITY;
    for (std::size_t i = 0; i < std::min(to.times.size(), ts.times.size()); ++i)
      worst = std::max(worst, std::abs(to.samples[i].at(Symbol::q(1, 0)) - ts.samples[i].at(Symbol::q(1, 0))));
    o.require(worst <= 1e-6, std::string(name) + " base curves differ by " + num(worst));
    o.note(std::string(name) + " base gap " + num(worst));
  }
  return o;
}

Outcome gauge_invariance() {
  Outcome o;
  std::mt19937_64 rng(7);
  std::vector<Symbol> vars;
  for (int l = 0; l <= 2; ++l)
    for (int A = 1; A <= 2; ++A) vars.push_back(Symbol::q(A, l));
  int compared = 0, bad = 0;
  for (int i = 0; i < 5; ++i) {
    Expr Lx = oracle::random_poly(rng, vars, 3, 5) + P("q1_2^2 + q2_2^2");
    auto L = LagrangianSpec::make(2, 2, Lx);
    auto el = euler_lagrange(L);
    for (int f = 0; f < 20; ++f) {
      Expr F = oracle::random_poly(rng, vars, 2, 4);
      auto L2 = LagrangianSpec::make(2, 3, Lx + total_time_derivative(F));
      auto el2 = euler_lagrange(L2);
      for (std::size_t A = 0; A < el.size(); ++A) {
        ++compared;
        if (!equal_numeric(el[A], el2[A], 10, 1e-9, 1000 + static_cast<std::uint64_t>(compared))) ++bad;
      }
    }
  }
  o.require(bad == 0, std::to_string(bad) + " of " + std::to_string(compared) + " components differ");
  o.note(std::to_string(compared) + " components compared");
  return o;
}

Outcome affine_checks() {
  Outcome o;
  SampleOptions opt;
  opt.fixed = {{param("lambda"), 0.8}, {param("m"), 1.0}};
  auto chiral = affine_decompose(LagrangianSpec::make(2, 2, P("-lambda*(q1_1*q2_2 - q2_1*q1_2) + m*(q1_1^2 + q2_1^2)/2")));
  o.require(!affine_symmetry_check(chiral.f, 1, opt).pass, "chiral oscillator passes the symmetry check");

  std::mt19937_64 rng(11);
  std::vector<Symbol> base{Symbol::q(1, 0), Symbol::q(2, 0), Symbol::q(1, 1), Symbol::q(2, 1)};
  for (int i = 0; i < 10; ++i) {
    Expr g = oracle::random_poly(rng, base, 3, 5);
    std::vector<Expr> f{diff(g, Symbol::q(1, 1)), diff(g, Symbol::q(2, 1))};
    o.require(affine_symmetry_check(f, 1).pass, "gradient-type f fails the symmetry check");
  }

  int closed = 0, verified = 0, rejected = 0;
  for (int i = 0; i < 50; ++i) {
    const int n = 1 + i % 2;
    std::vector<Symbol> vs;
    for (int l = 0; l < 2; ++l)
      for (int A = 1; A <= n; ++A) vs.push_back(Symbol::q(A, l));
    Expr W = oracle::random_poly(rng, vs, 3, 5);
    AffineParts parts;
    parts.n = n;
    parts.order = 2;
    Expr g = Expr(i % 7);
    for (int A = 1; A <= n; ++A) {
      parts.f.push_back(simplify(diff(W, Symbol::q(A, 1))));
      g = g + diff(W, Symbol::q(A, 0)) * Expr(Symbol::q(A, 1));
    }
    // every third instance is perturbed away from a template
    if (i % 3 == 2) g = g + oracle::random_poly(rng, vs, 2, 2);
    parts.g = simplify(g);
    try {
      auto sol = affine_hj_solve(parts);
      if (!sol.closed) continue;
      ++closed;
      auto L = LagrangianSpec::make(n, 2, parts.lagrangian());
      if (hj_residual(ostro_energy(L), sol.form()).pass) ++verified;
    } catch (const PreconditionError&) {
      ++rejected;
    }
  }
  o.require(closed > 0 && verified == closed,
            std::to_string(verified) + " of " + std::to_string(closed) + " closed solutions re-verify");
  o.note(std::to_string(closed) + " closed, " + std::to_string(verified) + " re-verified, " + std::to_string(rejected) +
         " rejected by the preconditions");
  return o;
}

Outcome morse_rank() {
  Outcome o;
  for (const auto& e : corpus()) {
    Job job = build_job(e.config);
    auto rep = morse_rank_check(job.family, morse_sample_points(job.family, 20, e.config.seed, job.params));
    o.require(rep.pass, e.id);
  }
  MorseFamily zero;
  zero.base = ChartSpec::standard(Space::TstarTk1Q, 1, 2);
  zero.fibers = {Symbol::q(1, 2)};
  zero.E = Expr(0);
  o.require(!morse_rank_check(zero, morse_sample_points(zero, 20)).pass, "E = 0 passes");
  o.note(std::to_string(corpus().size()) + " corpus energies");
  return o;
}

Outcome relatedness_consistency() {
  Outcome o;
  int checked = 0;
  for (const auto& e : corpus()) {
    const auto& c = e.config;
    if (!c.simulation || (!c.W && c.gamma.empty())) continue;
    auto r = cmd_hjcheck(c).report;
    if (!r["hj"]["pass"].get<bool>()) continue;
    if (r["relatedness"].contains("aborted")) {
      o.note(e.id + " not runnable (degenerate)");
      continue;
    }
    ++checked;
    o.require(r["relatedness"]["pass"].get<bool>(), e.id + " relatedness sup " + num(r["relatedness"]["sup_norm"].get<double>()));
    o.require(r.contains("relatedness_perturbed") && !r["relatedness_perturbed"]["pass"].get<bool>(),
              e.id + " perturbed one-form still related");
  }
  o.require(checked > 0, "no runnable system");
  o.note(std::to_string(checked) + " systems with negative controls");
  return o;
}

Outcome discrete_action_oracle() {
  Outcome o;
  std::mt19937_64 rng(2024);
  const int nodes = 2000;
  double worst = 0;
  for (int i = 0; i < 10; ++i) {
    const int k = i < 5 ? 2 : 3, n = 1 + i % 2;
    auto PL = oracle::random_lagrangian(rng, n, k);
    std::vector<oracle::Curve> curves;
    for (int A = 0; A < n; ++A) curves.push_back(oracle::random_curve(rng, 2 * k + 1));
    oracle::DiscreteAction S(PL, curves, nodes);
    auto el = euler_lagrange(LagrangianSpec::make(n, k, PL.expr()));
    for (int node : {400, 1000, 1600}) {
      double t = S.time(node);
      Binding jet;
      for (int A = 1; A <= n; ++A)
        for (int l = 0; l <= 2 * k; ++l) jet[Symbol::q(A, l)] = curves[static_cast<std::size_t>(A - 1)].deriv(l, t);
      for (int A = 1; A <= n; ++A) {
        double sym = eval(el[static_cast<std::size_t>(A - 1)], jet);
        double fd = S.variational_derivative(A, node);
        worst = std::max(worst, std::abs(sym - fd) / std::max(1.0, std::abs(sym)));
      }
    }
  }
  o.require(worst <= 1e-4, "relative gap " + num(worst));
  o.note("worst relative gap " + num(worst));
  return o;
}

Outcome corpus_budget() {
  Outcome o;
  auto t0 = Clock::now();
  auto a = cmd_corpus_run();
  double took = seconds_since(t0);
  auto b = cmd_corpus_run();
  o.require(a.exit_code == 0, std::to_string(a.report["mismatches"].get<int>()) + " mismatches");
  o.require(took < 60, "runtime " + num(took) + " s");
  o.require(a.report.dump() == b.report.dump(), "reports differ between runs");
  o.note(num(took) + " s, " + std::to_string(a.report["checks_run"].get<int>()) + " checks");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"beam Ostrogradsky derivation", beam_derivation},
      {"beam dynamics", beam_dynamics},
      {"javelin Ostrogradsky HJ", javelin_ostrogradsky_hj},
      {"javelin Schmidt HJ (printed W)", javelin_schmidt_hj},
      {"degenerate model", degenerate_model},
      {"Ostrogradsky/Schmidt equivalence", ostro_schmidt_equivalence},
      {"gauge invariance", gauge_invariance},
      {"affine checks", affine_checks},
      {"Morse rank", morse_rank},
      {"relatedness consistency", relatedness_consistency},
      {"discretised-action oracle", discrete_action_oracle},
      {"corpus budget and determinism", corpus_budget},
  };
  int failed = 0, index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += o.pass ? 0 : 1;
    std::printf("criterion %2d %-36s %s  %s\n", index, name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
  }
  std::printf("%d of %zu criteria pass\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
