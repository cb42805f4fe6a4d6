#include <algorithm>
#include <cmath>

#include "hjm/symexpr.hpp"

namespace hjm {

double eval(const Expr& e, const Binding& b) {
  return eval_as<double>(e, [&](const Symbol& s) { return lookup(b, s); });
}

namespace {

/// Returns the worst gap, or a negative value if the domain was exhausted.
double worst_gap(const Expr& e1, const Expr& e2, int trials, std::uint64_t seed, double stop_above) {
  if (trials < 1) throw PreconditionError("equal_numeric needs trials >= 1");
  SymbolSet syms = free_symbols(e1);
  for (const auto& s : free_symbols(e2)) syms.insert(s);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  const long long budget = 1000LL * trials;
  int accepted = 0;
  double worst = 0.0;
  Binding b;
  for (long long attempt = 0; attempt < budget && accepted < trials; ++attempt) {
    for (const auto& s : syms) b[s] = U(rng);
    double v1, v2;
    try {
      v1 = eval(e1, b);
      v2 = eval(e2, b);
    } catch (const DomainError&) {
      continue;
    }
    if (!std::isfinite(v1) || !std::isfinite(v2)) continue;
    ++accepted;
    worst = std::max(worst, std::abs(v1 - v2) / (1.0 + std::abs(v1)));
    if (worst > stop_above) return worst;
  }
  if (accepted == 0) return -1.0;
  return worst;
}

}  // namespace

bool equal_numeric(const Expr& e1, const Expr& e2, int trials, double tol, std::uint64_t seed) {
  if (!(tol > 0)) throw PreconditionError("equal_numeric needs tol > 0");
  double g = worst_gap(e1, e2, trials, seed, tol);
  if (g < 0) throw DomainExhaustedError("no sample inside the function domains after " +
                                        std::to_string(1000LL * trials) + " attempts");
  return g <= tol;
}

double max_relative_gap(const Expr& e1, const Expr& e2, int trials, std::uint64_t seed) {
  double g = worst_gap(e1, e2, trials, seed, INFINITY);
  if (g < 0) throw DomainExhaustedError("no sample inside the function domains");
  return g;
}

}  // namespace hjm
