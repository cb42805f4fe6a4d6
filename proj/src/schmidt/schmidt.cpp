#include "hjm/schmidt.hpp"

#include <random>

#include "hjm/linsolve.hpp"

namespace hjm {

namespace {

void require_vars(const Expr& F, int n, const std::vector<SymKind>& kinds, const char* what) {
  for (const auto& s : free_symbols(F)) {
    if (s.kind == SymKind::PARAM) continue;
    bool ok = s.component <= n && s.level <= 1;
    bool found = false;
    for (auto k : kinds) {
      if (s.kind != k) continue;
      if (k == SymKind::Q) found = ok;
      else found = ok && s.level == 0;
    }
    if (!found) throw PreconditionError(std::string("gauge function for ") + what + " may not depend on " + s.str());
  }
}

bool vanishes(const Expr& e) {
  Expr s = simplify(e);
  if (s.is_zero()) return true;
  try {
    return max_relative_gap(s, Expr(0), 50) <= 1e-10;
  } catch (const DomainExhaustedError&) {
    return false;
  }
}

Expr gauge_terms(const Expr& F, int n, bool with_a1, bool with_m1) {
  std::vector<Expr> t;
  for (int A = 1; A <= n; ++A) {
    t.push_back(diff(F, Symbol::q(A, 0)) * Expr(Symbol::q(A, 1)));
    t.push_back(diff(F, Symbol::q(A, 1)) * Expr(Symbol::a(A, 0)));
    if (with_a1) t.push_back(diff(F, Symbol::a(A, 0)) * Expr(Symbol::a(A, 1)));
    if (with_m1) t.push_back(diff(F, Symbol::m(A, 0)) * Expr(Symbol::m(A, 1)));
  }
  return simplify(Expr::add(t));
}

MorseFamily extended_energy(const Expr& Lext, int n) {
  MorseFamily mf;
  mf.base = ChartSpec::standard(Space::TstarAQxM, n, 2);
  std::vector<Expr> t;
  for (int A = 1; A <= n; ++A) {
    t.push_back(Expr(Symbol::pq(A)) * Expr(Symbol::q(A, 1)));
    t.push_back(Expr(Symbol::pa(A)) * Expr(Symbol::a(A, 1)));
    t.push_back(Expr(Symbol::pm(A)) * Expr(Symbol::m(A, 1)));
  }
  t.push_back(-Lext);
  mf.E = simplify(Expr::add(t));
  for (int A = 1; A <= n; ++A) mf.fibers.push_back(Symbol::q(A, 1));
  for (int A = 1; A <= n; ++A) mf.fibers.push_back(Symbol::a(A, 1));
  for (int A = 1; A <= n; ++A) mf.fibers.push_back(Symbol::m(A, 1));
  return mf;
}

}  // namespace

Expr to_acceleration_chart(const Expr& e, int n) {
  std::map<Symbol, Expr> m;
  for (int A = 1; A <= n; ++A) {
    m[Symbol::q(A, 2)] = Expr(Symbol::a(A, 0));
    m[Symbol::q(A, 3)] = Expr(Symbol::a(A, 1));
  }
  return substitute(e, m);
}

Expr gauge_extend_second(const LagrangianSpec& L, const Expr& F) {
  if (L.k != 2) throw PreconditionError("second-order gauge extension needs k = 2");
  require_vars(F, L.n, {SymKind::Q, SymKind::A}, "second order");
  return simplify(to_acceleration_chart(L.L, L.n) + gauge_terms(F, L.n, true, false));
}

std::vector<Expr> chi_check(const LagrangianSpec& L, const Expr& F) {
  Expr Lp = to_acceleration_chart(L.L, L.n);
  std::vector<Expr> out;
  for (int A = 1; A <= L.n; ++A) out.push_back(simplify(diff(Lp, Symbol::a(A, 0)) + diff(F, Symbol::q(A, 1))));
  return out;
}

bool chi_holds(const LagrangianSpec& L, const Expr& F) {
  for (const auto& r : chi_check(L, F))
    if (!vanishes(r)) return false;
  return true;
}

Expr solve_F_quadratic(const LagrangianSpec& L) {
  if (L.k != 2) throw PreconditionError("gauge integration needs k = 2");
  Expr Lp = to_acceleration_chart(L.L, L.n);
  SymbolSet velocities;
  for (int A = 1; A <= L.n; ++A) velocities.insert(Symbol::q(A, 1));
  std::vector<Expr> t;
  for (int A = 1; A <= L.n; ++A) {
    Expr dLa = diff(Lp, Symbol::a(A, 0));
    if (depends_on_any(dLa, velocities))
      throw PreconditionError("dL/da depends on velocities; supply the gauge function explicitly");
    t.push_back(-dLa * Expr(Symbol::q(A, 1)));
  }
  return simplify(Expr::add(t));
}

MorseFamily schmidt_morse_family(const LagrangianSpec& L, const Expr& F) {
  if (L.k != 2) throw PreconditionError("Schmidt family needs k = 2");
  require_vars(F, L.n, {SymKind::Q, SymKind::A}, "second order");
  auto chi = chi_check(L, F);
  for (std::size_t A = 0; A < chi.size(); ++A)
    if (!vanishes(chi[A])) throw IncompatibleGaugeError("component " + std::to_string(A + 1) + " residual " + render(chi[A]));
  MorseFamily mf;
  mf.base = ChartSpec::standard(Space::TstarAQ, L.n, 2);
  std::vector<Expr> t;
  for (int A = 1; A <= L.n; ++A) t.push_back(Expr(Symbol::pq(A)) * Expr(Symbol::q(A, 1)));
  t.push_back(-to_acceleration_chart(L.L, L.n));
  t.push_back(-gauge_terms(F, L.n, false, false));
  mf.E = simplify(Expr::add(t));
  for (int A = 1; A <= L.n; ++A) {
    mf.fibers.push_back(Symbol::q(A, 1));
    mf.constraints.push_back(simplify(Expr(Symbol::pa(A)) - diff(F, Symbol::a(A, 0))));
    mf.constraint_multipliers.push_back(Symbol::a(A, 1));
  }
  return mf;
}

std::map<Symbol, Expr> schmidt_velocity_solution(const LagrangianSpec& L, const Expr& F) {
  std::vector<Expr> eqs;
  std::vector<Symbol> vars;
  for (int A = 1; A <= L.n; ++A) {
    eqs.push_back(Expr(Symbol::pa(A)) - diff(F, Symbol::a(A, 0)));
    vars.push_back(Symbol::q(A, 1));
  }
  return solve_linear(eqs, vars);
}

Expr schmidt_hamiltonian(const LagrangianSpec& L, const Expr& F) {
  MorseFamily mf = schmidt_morse_family(L, F);
  return substitute(mf.E, schmidt_velocity_solution(L, F));
}

SchmidtSystem schmidt_second(const LagrangianSpec& L, const Expr& F) {
  SchmidtSystem s;
  s.variant = SchmidtVariant::SecondNondeg;
  s.L_ext = gauge_extend_second(L, F);
  s.energy = schmidt_morse_family(L, F);
  s.base = s.energy.base;
  try {
    s.hamiltonian = substitute(s.energy.E, schmidt_velocity_solution(L, F));
  } catch (const NotSolvableError&) {
  } catch (const DegeneracyError&) {
  }
  return s;
}

Expr unscaled_pure_quadratic_hamiltonian(const Expr& mu) {
  return simplify(-Expr(Symbol::pq(1)) * Expr(Symbol::pa(1)) +
                  Expr(Num::rational(1, 2)) * mu * Expr::pow(Expr(Symbol::a(1, 0)), Num(2)));
}

Expr default_coupling(int n) {
  std::vector<Expr> t;
  for (int A = 1; A <= n; ++A) t.push_back(Expr(Symbol::q(A, 1)) * Expr(Symbol::m(A, 0)));
  return simplify(Expr::add(t));
}

void require_cond2(const Expr& F, int n, std::uint64_t seed) {
  std::vector<std::vector<Expr>> M;
  for (int A = 1; A <= n; ++A) {
    Expr dA = diff(F, Symbol::q(A, 1));
    std::vector<Expr> row;
    for (int B = 1; B <= n; ++B) row.push_back(diff(dA, Symbol::m(B, 0)));
    M.push_back(std::move(row));
  }
  Expr det = determinant(M);
  SymbolSet syms = free_symbols(det);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-2, 2);
  int accepted = 0;
  for (int attempt = 0; attempt < 10000 && accepted < 10; ++attempt) {
    Binding b;
    for (const auto& s : syms) b[s] = U(rng);
    double v;
    try {
      v = eval(det, b);
    } catch (const DomainError&) {
      continue;
    }
    ++accepted;
    if (!(std::abs(v) > 1e-10)) throw Cond2Error("determinant " + render(det) + " vanishes at a sample point");
  }
  if (accepted == 0) throw DomainExhaustedError("cond2 determinant has no valid sample point");
}

SchmidtSystem third_order_extend(const LagrangianSpec& L, const Expr& F) {
  if (L.k != 3) throw PreconditionError("third-order extension needs k = 3");
  require_vars(F, L.n, {SymKind::Q, SymKind::A, SymKind::M}, "third order");
  require_cond2(F, L.n);
  SchmidtSystem s;
  s.variant = SchmidtVariant::ThirdOrder;
  s.L_ext = simplify(to_acceleration_chart(L.L, L.n) + gauge_terms(F, L.n, true, true));
  s.energy = extended_energy(s.L_ext, L.n);
  s.base = s.energy.base;
  return s;
}

SchmidtSystem degenerate_second_extend(const LagrangianSpec& L, const Expr& F) {
  if (L.k != 2) throw PreconditionError("degenerate extension needs k = 2");
  require_vars(F, L.n, {SymKind::Q, SymKind::M}, "degenerate second order");
  require_cond2(F, L.n);
  SchmidtSystem s;
  s.variant = SchmidtVariant::SecondDegenerate;
  s.L_ext = simplify(to_acceleration_chart(L.L, L.n) + gauge_terms(F, L.n, false, true));
  s.energy = extended_energy(s.L_ext, L.n);
  s.base = s.energy.base;
  return s;
}

bool ostro_schmidt_pullback_check(const LagrangianSpec& L, const Expr& F) {
  return ostro_schmidt_pullback_check(L, F, schmidt_hamiltonian(L, F));
}

bool ostro_schmidt_pullback_check(const LagrangianSpec& L, const Expr& F, const Expr& H) {
  if (L.k != 2) throw PreconditionError("pullback identity needs k = 2");
  auto z = schmidt_velocity_solution(L, F);
  Expr E = ostro_energy(L).E;
  std::map<Symbol, Expr> m;
  for (int A = 1; A <= L.n; ++A) {
    m[Symbol::q(A, 1)] = z.at(Symbol::q(A, 1));
    m[Symbol::q(A, 2)] = Expr(Symbol::a(A, 0));
    m[Symbol::p(A, 0)] = Expr(Symbol::pq(A)) - substitute(diff(F, Symbol::q(A, 0)), z);
    m[Symbol::p(A, 1)] = -substitute(diff(F, Symbol::q(A, 1)), z);
  }
  return equal_numeric(substitute(E, m), H, 100, 1e-10);
}

Binding ostro_initial_from_jet(const LagrangianSpec& L, const Binding& jet) {
  auto mom = ostro_momenta(L);
  Binding out;
  for (int l = 0; l < L.k; ++l)
    for (int A = 1; A <= L.n; ++A) {
      out[Symbol::q(A, l)] = lookup(jet, Symbol::q(A, l));
      out[Symbol::p(A, l)] = eval(mom[static_cast<std::size_t>(l * L.n + A - 1)], jet);
    }
  return out;
}

Binding schmidt_initial_from_jet(const LagrangianSpec& L, const Expr& F, const Binding& jet) {
  Binding env = jet;
  for (int A = 1; A <= L.n; ++A) {
    env[Symbol::a(A, 0)] = lookup(jet, Symbol::q(A, 2));
    env[Symbol::a(A, 1)] = lookup(jet, Symbol::q(A, 3));
  }
  Expr L2 = gauge_extend_second(L, F);
  Binding out;
  for (int A = 1; A <= L.n; ++A) {
    out[Symbol::q(A, 0)] = env.at(Symbol::q(A, 0));
    out[Symbol::a(A, 0)] = env.at(Symbol::a(A, 0));
    out[Symbol::pa(A)] = eval(diff(F, Symbol::a(A, 0)), env);
    out[Symbol::pq(A)] = eval(diff(L2, Symbol::q(A, 1)), env);
  }
  return out;
}

}  // namespace hjm
