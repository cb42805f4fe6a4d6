#pragma once

#include <map>
#include <vector>

#include "hjm/symexpr.hpp"

namespace hjm {

/// Symbolic determinant by cofactor expansion.
Expr determinant(const std::vector<std::vector<Expr>>& M);

/// Solves eqs = 0 for vars when the system is linear in vars (coefficients free of vars), n <= 4.
/// Throws NotSolvableError if nonlinear or too large, DegeneracyError if the determinant vanishes identically.
std::map<Symbol, Expr> solve_linear(const std::vector<Expr>& eqs, const std::vector<Symbol>& vars);

/// Numeric rank of a matrix with singular-value threshold rel * sigma_max.
int numeric_rank(const std::vector<std::vector<double>>& M, double rel = 1e-10);

}  // namespace hjm
