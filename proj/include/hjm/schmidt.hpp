#pragma once

#include <optional>
#include <vector>

#include "hjm/ostro.hpp"

namespace hjm {

enum class SchmidtVariant { SecondNondeg, ThirdOrder, SecondDegenerate };

struct SchmidtSystem {
  SchmidtVariant variant = SchmidtVariant::SecondNondeg;
  Expr L_ext;
  ChartSpec base;
  MorseFamily energy;
  std::optional<Expr> hamiltonian;
};

/// Rewrites q{A}_2 -> a{A}_0 (and q{A}_3 -> a{A}_1).
Expr to_acceleration_chart(const Expr& e, int n);

/// L(q0, q1, a0) + F_q0 q1 + F_q1 a0 + F_a0 a1.
Expr gauge_extend_second(const LagrangianSpec& L, const Expr& F);

/// dL/da{A}_0 + dF/dq{A}_1 per component; all zero iff F is compatible.
std::vector<Expr> chi_check(const LagrangianSpec& L, const Expr& F);
bool chi_holds(const LagrangianSpec& L, const Expr& F);

/// F = -sum_A (dL/da{A}_0) q{A}_1. Throws PreconditionError if dL/da depends on q1.
Expr solve_F_quadratic(const LagrangianSpec& L);

/// Base T*AQ, fibers q{A}_1, momentum-defining constraint pa{A} - F_a0 with multiplier a{A}_1.
MorseFamily schmidt_morse_family(const LagrangianSpec& L, const Expr& F);

/// Solutions z{A} of pa = F_a0 for q{A}_1, symbolic.
std::map<Symbol, Expr> schmidt_velocity_solution(const LagrangianSpec& L, const Expr& F);

/// H(q0, a0, pq, pa) with q1 eliminated through pa = F_a0.
Expr schmidt_hamiltonian(const LagrangianSpec& L, const Expr& F);

/// Second-order nondegenerate bundle: extended Lagrangian, family, Hamiltonian when the inversion succeeds.
SchmidtSystem schmidt_second(const LagrangianSpec& L, const Expr& F);

/// Hamiltonian of the pure quadratic case exactly as the acceleration-bundle HJ equation prints it
/// (no 1/mu on the momentum product): -pq*pa + mu*a0^2/2.
Expr unscaled_pure_quadratic_hamiltonian(const Expr& mu);

/// Default coupling sum_A q{A}_1 m{A}_0.
Expr default_coupling(int n);

/// det[d^2F / dq{A}_1 dm{B}_0] nonzero at 10 random points, else Cond2Error.
void require_cond2(const Expr& F, int n, std::uint64_t seed = 0x5eedULL);

SchmidtSystem third_order_extend(const LagrangianSpec& L, const Expr& F);
SchmidtSystem degenerate_second_extend(const LagrangianSpec& L, const Expr& F);

/// Ostrogradsky energy pulled back by the gauge symplectomorphism equals the Schmidt Hamiltonian.
bool ostro_schmidt_pullback_check(const LagrangianSpec& L, const Expr& F);
/// Same identity against a caller-supplied Hamiltonian.
bool ostro_schmidt_pullback_check(const LagrangianSpec& L, const Expr& F, const Expr& H);

/// Initial states matched to a jet q{A}_0..q{A}_3 (plus parameters).
Binding ostro_initial_from_jet(const LagrangianSpec& L, const Binding& jet);
Binding schmidt_initial_from_jet(const LagrangianSpec& L, const Expr& F, const Binding& jet);

}  // namespace hjm
