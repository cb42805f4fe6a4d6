#include "hjm/system.hpp"

namespace hjm {

LagrangianSpec LagrangianSpec::make(int n, int k, const Expr& L) {
  if (n < 1 || k < 1) throw PreconditionError("Lagrangian needs n >= 1 and k >= 1");
  for (const auto& s : free_symbols(L)) {
    if (s.kind == SymKind::PARAM) continue;
    if (s.kind != SymKind::Q) throw PreconditionError("Lagrangian may only depend on q{A}_{j} and parameters, found " + s.str());
    if (s.component > n) throw PreconditionError(s.str() + " exceeds dimension " + std::to_string(n));
    if (s.level > k) throw LevelOverflowError(s.str() + " exceeds order " + std::to_string(k));
  }
  return {n, k, simplify(L)};
}

Expr MorseFamily::augmented() const {
  std::vector<Expr> terms{E};
  for (std::size_t i = 0; i < constraints.size(); ++i)
    terms.push_back(Expr(constraint_multipliers[i]) * constraints[i]);
  return simplify(Expr::add(terms));
}

std::vector<Symbol> MorseFamily::all_fibers() const {
  std::vector<Symbol> out = fibers;
  out.insert(out.end(), constraint_multipliers.begin(), constraint_multipliers.end());
  return out;
}

const Expr& ImplicitSystem::rhs_of(const Symbol& s) const {
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i] == s) return rhs[i];
  throw PreconditionError(s.str() + " is not a state of the system");
}

}  // namespace hjm
