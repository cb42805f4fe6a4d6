#include "hjm/linsolve.hpp"

#include <Eigen/Dense>

namespace hjm {

Expr determinant(const std::vector<std::vector<Expr>>& M) {
  const std::size_t n = M.size();
  if (n == 0) return Expr(1);
  if (n == 1) return M[0][0];
  if (n == 2) return simplify(M[0][0] * M[1][1] - M[0][1] * M[1][0]);
  Expr det(0);
  for (std::size_t j = 0; j < n; ++j) {
    if (M[0][j].is_zero()) continue;
    std::vector<std::vector<Expr>> minor;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<Expr> row;
      for (std::size_t c = 0; c < n; ++c)
        if (c != j) row.push_back(M[i][c]);
      minor.push_back(std::move(row));
    }
    Expr term = M[0][j] * determinant(minor);
    det = (j % 2 == 0) ? det + term : det - term;
  }
  return simplify(det);
}

int numeric_rank(const std::vector<std::vector<double>>& M, double rel) {
  if (M.empty() || M[0].empty()) return 0;
  Eigen::MatrixXd A(M.size(), M[0].size());
  for (std::size_t i = 0; i < M.size(); ++i)
    for (std::size_t j = 0; j < M[0].size(); ++j) A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = M[i][j];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel * s(0)) ++r;
  return r;
}

namespace {

int rank_at_random_point(const std::vector<std::vector<Expr>>& M) {
  SymbolSet syms;
  for (const auto& row : M)
    for (const auto& e : row)
      for (const auto& s : free_symbols(e)) syms.insert(s);
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> U(-2, 2);
  for (int attempt = 0; attempt < 100; ++attempt) {
    Binding b;
    for (const auto& s : syms) b[s] = U(rng);
    try {
      std::vector<std::vector<double>> num;
      for (const auto& row : M) {
        std::vector<double> r;
        for (const auto& e : row) r.push_back(eval(e, b));
        num.push_back(std::move(r));
      }
      return numeric_rank(num);
    } catch (const DomainError&) {
    }
  }
  return 0;
}

}  // namespace

std::map<Symbol, Expr> solve_linear(const std::vector<Expr>& eqs, const std::vector<Symbol>& vars) {
  const std::size_t n = vars.size();
  if (eqs.size() != n) throw NotSolvableError("need as many equations as unknowns");
  if (n > 4) throw NotSolvableError("symbolic solve limited to 4 unknowns");
  SymbolSet vs(vars.begin(), vars.end());
  std::map<Symbol, Expr> zero;
  for (const auto& v : vars) zero[v] = Expr(0);
  std::vector<std::vector<Expr>> M(n);
  std::vector<Expr> b(n);
  for (std::size_t i = 0; i < n; ++i) {
    Expr e = simplify(eqs[i]);
    for (const auto& v : vars) {
      Expr c = diff(e, v);
      if (depends_on_any(c, vs)) throw NotSolvableError("equation " + std::to_string(i) + " is nonlinear in " + v.str());
      M[i].push_back(c);
    }
    b[i] = -substitute(e, zero);
  }
  Expr det = determinant(M);
  bool vanishes = det.is_zero();
  if (!vanishes) {
    try {
      vanishes = max_relative_gap(det, Expr(0), 20) < 1e-12;
    } catch (const DomainExhaustedError&) {
      vanishes = true;
    }
  }
  if (vanishes) throw DegeneracyError("coefficient matrix is singular", rank_at_random_point(M), static_cast<int>(n));
  std::map<Symbol, Expr> out;
  for (std::size_t j = 0; j < n; ++j) {
    auto Mj = M;
    for (std::size_t i = 0; i < n; ++i) Mj[i][j] = b[i];
    out[vars[j]] = simplify(determinant(Mj) / det);
  }
  return out;
}

}  // namespace hjm
