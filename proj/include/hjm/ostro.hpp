#pragma once

#include <vector>

#include "hjm/system.hpp"

namespace hjm {

/// E = sum_kappa p_kappa q_{kappa+1} - L on T*T^{k-1}Q, fibers q_k.
MorseFamily ostro_energy(const LagrangianSpec& L);

/// Momenta p_kappa for kappa = 0..k-1, components fastest.
std::vector<Expr> ostro_momenta(const LagrangianSpec& L);

/// One residual per component; vanishes along solutions.
std::vector<Expr> euler_lagrange(const LagrangianSpec& L);

ImplicitSystem ostro_implicit_system(const MorseFamily& mf);

struct Nondegeneracy {
  int rank = 0;
  bool full = false;
};

/// Rank of the Hessian of L in the top derivatives at a point.
Nondegeneracy nondegeneracy(const LagrangianSpec& L, const Binding& at);

/// Hessian of L in the top derivatives, symbolic.
std::vector<std::vector<Expr>> top_hessian(const LagrangianSpec& L);

/// E with q_k eliminated through p_{k-1} = dL/dq_k. Throws NotSolvableError or DegeneracyError.
Expr explicit_hamiltonian(const LagrangianSpec& L);

}  // namespace hjm
