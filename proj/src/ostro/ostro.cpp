#include "hjm/ostro.hpp"

#include "hjm/dynamics.hpp"
#include "hjm/linsolve.hpp"

namespace hjm {

MorseFamily ostro_energy(const LagrangianSpec& L) {
  MorseFamily mf;
  mf.base = ChartSpec::standard(Space::TstarTk1Q, L.n, L.k);
  std::vector<Expr> terms;
  for (int l = 0; l < L.k; ++l)
    for (int a = 1; a <= L.n; ++a) terms.push_back(Expr(Symbol::p(a, l)) * Expr(Symbol::q(a, l + 1)));
  terms.push_back(-L.L);
  mf.E = simplify(Expr::add(terms));
  for (int a = 1; a <= L.n; ++a) mf.fibers.push_back(Symbol::q(a, L.k));
  return mf;
}

std::vector<Expr> ostro_momenta(const LagrangianSpec& L) {
  std::vector<Expr> out;
  for (int kappa = 0; kappa < L.k; ++kappa)
    for (int a = 1; a <= L.n; ++a) {
      Expr sum(0);
      for (int j = L.k - 1; j >= kappa; --j) {
        Expr term = diff(L.L, Symbol::q(a, j + 1));
        term = total_time_derivative_n(term, j - kappa);
        sum = ((j - kappa) % 2 == 0) ? sum + term : sum - term;
      }
      out.push_back(simplify(sum));
    }
  return out;
}

std::vector<Expr> euler_lagrange(const LagrangianSpec& L) {
  std::vector<Expr> out;
  for (int a = 1; a <= L.n; ++a) {
    Expr sum(0);
    for (int i = 0; i <= L.k; ++i) {
      Expr term = total_time_derivative_n(diff(L.L, Symbol::q(a, i)), i);
      sum = (i % 2 == 0) ? sum + term : sum - term;
    }
    out.push_back(simplify(sum));
  }
  return out;
}

ImplicitSystem ostro_implicit_system(const MorseFamily& mf) { return assemble(mf); }

std::vector<std::vector<Expr>> top_hessian(const LagrangianSpec& L) {
  std::vector<std::vector<Expr>> H;
  for (int a = 1; a <= L.n; ++a) {
    Expr da = diff(L.L, Symbol::q(a, L.k));
    std::vector<Expr> row;
    for (int b = 1; b <= L.n; ++b) row.push_back(diff(da, Symbol::q(b, L.k)));
    H.push_back(std::move(row));
  }
  return H;
}

Nondegeneracy nondegeneracy(const LagrangianSpec& L, const Binding& at) {
  std::vector<std::vector<double>> num;
  for (const auto& row : top_hessian(L)) {
    std::vector<double> r;
    for (const auto& e : row) r.push_back(eval(e, at));
    num.push_back(std::move(r));
  }
  int rank = numeric_rank(num);
  return {rank, rank == L.n};
}

Expr explicit_hamiltonian(const LagrangianSpec& L) {
  MorseFamily mf = ostro_energy(L);
  std::vector<Expr> eqs;
  for (const auto& f : mf.fibers) eqs.push_back(diff(mf.E, f));
  auto sol = solve_linear(eqs, mf.fibers);
  return substitute(mf.E, sol);
}

}  // namespace hjm
