#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hjm/charts.hpp"
#include "hjm/symexpr.hpp"

namespace hjm {

/// Higher-order Lagrangian L(q_0 .. q_k) on an n-dimensional configuration space.
struct LagrangianSpec {
  int n = 1;
  int k = 1;
  Expr L;

  /// Validates L: only q{A}_{j} with A <= n and j <= k, plus parameters.
  static LagrangianSpec make(int n, int k, const Expr& L);
};

/// Energy function on a cotangent chart, with multiplier fibers.
/// Extra algebraic constraints (e.g. a momentum-defining relation) enter as E + sum mult_i * constraint_i.
struct MorseFamily {
  ChartSpec base;
  std::vector<Symbol> fibers;
  Expr E;
  std::vector<Expr> constraints;
  std::vector<Symbol> constraint_multipliers;

  Expr augmented() const;
  std::vector<Symbol> all_fibers() const;
};

/// Implicit first-order system: state derivatives may reference multipliers fixed by the constraints.
struct ImplicitSystem {
  ChartSpec chart;
  std::vector<Symbol> states;
  std::vector<Expr> rhs;  // aligned with states
  std::vector<Expr> constraints;
  std::vector<Symbol> multipliers;
  std::vector<std::vector<Expr>> jacobian;  // d constraint_i / d multiplier_j
  Expr energy;

  const Expr& rhs_of(const Symbol& s) const;
};

/// Closed one-form on the configuration part of a cotangent chart, paired with its momentum symbols.
struct ClosedOneForm {
  ChartSpec base;
  std::vector<Symbol> coords;
  std::vector<Symbol> momenta;
  std::vector<Expr> components;
  std::optional<Expr> potential;

  static ClosedOneForm from_potential(const ChartSpec& base, const Expr& W);
  /// Throws ClosureError if some d_j g_i - d_i g_j is not eval-zero (50 points, tol 1e-9).
  static ClosedOneForm from_components(const ChartSpec& base, std::vector<Expr> components,
                                       std::uint64_t seed = 0x5eedULL);

  /// p-symbol -> component substitution map.
  std::map<Symbol, Expr> substitution() const;
};

}  // namespace hjm
