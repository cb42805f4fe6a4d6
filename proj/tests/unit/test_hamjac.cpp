#include <cmath>
#include <random>

#include "doctest.h"
#include "hjm/hamjac.hpp"
#include "hjm/ostro.hpp"
#include "hjm/schmidt.hpp"
#include "oracle/random_expr.hpp"

using namespace hjm;

namespace {

Expr P(const char* s) { return parse(s); }

LagrangianSpec beam() { return LagrangianSpec::make(1, 2, P("mu*q1_2^2/2 + rho*q1_0")); }
LagrangianSpec javelin() { return LagrangianSpec::make(1, 2, P("q1_1^2/2 - q1_2^2/2")); }
LagrangianSpec degenerate() { return LagrangianSpec::make(3, 2, P("(q1_2 + q2_2)^2/2")); }

ChartSpec ostro_base(int n) { return ChartSpec::standard(Space::TstarTk1Q, n, 2); }
ChartSpec accel_base() { return ChartSpec::standard(Space::TstarAQ, 1, 2); }

ClosedOneForm javelin_gamma(const char* A) {
  std::string rad = std::string(A) + "*q1_1 - q1_1^2/2";
  return ClosedOneForm::from_components(ostro_base(1), {P(A), parse("2^(1/2)*(" + rad + ")^(1/2)")});
}

SampleOptions javelin_domain() {
  SampleOptions o;
  o.tol = 1e-9;
  o.domain = {P("q1_1 - q1_1^2/2 - 1/10")};
  return o;
}

/// Beam acceleration-bundle one-form with rho = 0: H o gamma = -c*c2/mu.
ClosedOneForm beam_schmidt_gamma(double c2, double c) {
  Expr a(Symbol::a(1, 0)), mu(Symbol::param("mu"));
  return ClosedOneForm::from_components(accel_base(), {Expr(Num::real(c2)),
                                                       mu * mu * Expr::pow(a, Num(2)) / Expr(Num::real(2 * c2)) +
                                                           Expr(Num::real(c))});
}

}  // namespace

TEST_CASE("Morse rank") {
  auto b = ostro_energy(beam());
  auto rep = morse_rank_check(b, morse_sample_points(b, 20));
  CHECK(rep.pass);
  CHECK(rep.metrics.at("min_rank") == 1);

  MorseFamily zero = ostro_energy(LagrangianSpec::make(1, 2, Expr(0)));
  CHECK(morse_rank_check(zero, morse_sample_points(zero, 5)).pass);
  zero.E = Expr(0);
  auto z = morse_rank_check(zero, morse_sample_points(zero, 5));
  CHECK_FALSE(z.pass);
  CHECK(z.metrics.at("min_rank") == 0);

  auto s = schmidt_morse_family(javelin(), solve_F_quadratic(javelin()));
  CHECK(morse_rank_check(s, morse_sample_points(s, 20)).pass);
  auto d = ostro_energy(degenerate());
  CHECK(morse_rank_check(d, morse_sample_points(d, 20)).pass);
}

TEST_CASE("javelin Ostrogradsky one-form") {
  auto mf = ostro_energy(javelin());
  auto rep = hj_residual(mf, javelin_gamma("1"), javelin_domain());
  CHECK(rep.pass);
  CHECK(rep.samples == 50);
  CHECK(rep.sup_norm <= 1e-9);
  REQUIRE(rep.residuals.size() == 3);
  CHECK(rep.residuals[2].label == "d/dq1_2");

  // closed but wrong: momentum constant no longer matches the radicand
  auto off = ClosedOneForm::from_components(ostro_base(1), {P("11/10"), P("2^(1/2)*(q1_1 - q1_1^2/2)^(1/2)")});
  CHECK_FALSE(hj_residual(mf, off, javelin_domain()).pass);
}

TEST_CASE("degenerate model") {
  auto mf = ostro_energy(degenerate());
  auto g = ClosedOneForm::from_potential(ostro_base(3), P("c*q1_1 + c*q2_1"));
  auto rep = hj_residual(mf, g);
  CHECK(rep.sup_norm <= 1e-12);
  auto sys = hj_system(mf, g);
  for (const auto& e : sys.base_equations) CHECK(e.is_zero());

  // unequal slopes leave the constraint pair q1_2 + q2_2 = a = b unsatisfiable
  auto ab = ClosedOneForm::from_potential(ostro_base(3), P("a*q1_1 + b*q2_1"));
  for (const auto& e : hj_system(mf, ab).base_equations) CHECK(e.is_zero());
  SampleOptions o;
  o.fixed = {{Symbol::param("a"), 1.0}, {Symbol::param("b"), 0.4}};
  auto r = hj_residual(mf, ab, o);
  CHECK(r.sup_norm == doctest::Approx(0.3));
}

TEST_CASE("zero one-form on a zero Lagrangian") {
  auto mf = ostro_energy(LagrangianSpec::make(1, 2, Expr(0)));
  auto rep = hj_residual(mf, ClosedOneForm::from_potential(ostro_base(1), Expr(0)));
  CHECK(rep.pass);
  CHECK(rep.sup_norm == 0.0);
  auto bad = ClosedOneForm::from_potential(ChartSpec::standard(Space::TstarAQ, 1, 2), Expr(0));
  CHECK_THROWS_AS(hj_residual(mf, bad), ChartMismatchError);
}

TEST_CASE("acceleration-bundle Hamiltonians") {
  Expr Hb = substitute(schmidt_hamiltonian(beam(), solve_F_quadratic(beam())), Symbol::param("rho"), Expr(0));
  SampleOptions o;
  o.fixed = {{Symbol::param("mu"), 1.3}};
  auto rep = hj_residual_nondeg(Hb, beam_schmidt_gamma(0.7, 0.2), o);
  CHECK(rep.pass);
  CHECK(rep.metrics.at("variation") <= 1e-12);

  // linear alpha, as printed for the beam, is not a solution
  auto lin = ClosedOneForm::from_components(accel_base(), {P("7/10"), P("mu^2*a1_0/(7/10) + 1/5")});
  CHECK_FALSE(hj_residual_nondeg(Hb, lin, o).pass);

  Expr Hj = schmidt_hamiltonian(javelin(), solve_F_quadratic(javelin()));
  auto good = ClosedOneForm::from_components(accel_base(), {Expr(0), P("(2 - a1_0^2)^(1/2)")});
  CHECK(hj_residual_nondeg(Hj, good).pass);

  // constant W: residuals are the plain partials of H at zero momenta
  auto flat = hj_residual_nondeg(Hj, ClosedOneForm::from_potential(accel_base(), P("5")));
  CHECK(render(flat.residuals[1].expr) == render(simplify(P("-a1_0"))));
  CHECK_THROWS_AS(hj_residual_nondeg(P("pq1*q1_1"), good), ChartMismatchError);
}

TEST_CASE("potential and components give the same report") {
  Expr Hb = substitute(schmidt_hamiltonian(beam(), solve_F_quadratic(beam())), Symbol::param("rho"), Expr(0));
  Expr W = P("c2*q1_0 + mu^2*a1_0^3/(6*c2) + c*a1_0");
  auto g1 = ClosedOneForm::from_potential(accel_base(), W);
  auto g2 = ClosedOneForm::from_components(accel_base(), {diff(W, Symbol::q(1, 0)), diff(W, Symbol::a(1, 0))});
  SampleOptions o;
  o.box[Symbol::param("c2")] = {0.5, 2.0};
  auto r1 = hj_residual_nondeg(Hb, g1, o), r2 = hj_residual_nondeg(Hb, g2, o);
  CHECK(r1.to_json() == r2.to_json());
  CHECK(r1.pass);
}

TEST_CASE("reduced Ostrogradsky equation and the first-order specialization") {
  Expr W = P("c*q1_1 + q1_0^2*q1_1");
  auto g = ClosedOneForm::from_potential(ostro_base(1), W);
  Expr reduced = P("q1_1*(2*q1_0*q1_1) + (c + q1_0^2)^2/(2*mu) - rho*q1_0");
  CHECK(equal_numeric(substitute(explicit_hamiltonian(beam()), g.substitution()), reduced, 50, 1e-12));

  auto first = LagrangianSpec::make(1, 1, P("q1_1^2/2 - q1_0^2/2"));
  auto mf = ostro_energy(first);
  auto g1 = ClosedOneForm::from_potential(ChartSpec::standard(Space::TstarTk1Q, 1, 1), P("q1_0^3/3 + 2*q1_0"));
  auto sys = hj_system(mf, g1);
  Expr Hg = substitute(explicit_hamiltonian(first), g1.substitution());
  Expr on = substitute(sys.base_equations[0], Symbol::q(1, 1), g1.components[0]);
  CHECK(equal_numeric(on, diff(Hg, Symbol::q(1, 0)), 50, 1e-12));
}

TEST_CASE("gamma-relatedness") {
  MorseFamily free;
  free.base = ChartSpec::standard(Space::TstarTk1Q, 1, 1);
  free.E = P("p1_0^2/2");
  auto line = ClosedOneForm::from_potential(free.base, P("3*q1_0"));
  auto fs = assemble(free);
  auto tr = integrate_rk4(fs, lift_point(line, {{Symbol::q(1, 0), 0.5}}), 0, 1, 0.1);
  auto rep = gamma_relatedness(fs, line, tr);
  CHECK(rep.pass);
  CHECK(rep.sup_norm <= 1e-12);

  auto mf = schmidt_morse_family(beam(), solve_F_quadratic(beam()));
  auto sys = assemble(mf);
  auto g = beam_schmidt_gamma(0.7, 0.2);
  Binding start{{Symbol::q(1, 0), 0.1}, {Symbol::a(1, 0), -0.3}, {Symbol::param("mu"), 1.3}, {Symbol::param("rho"), 0.0}};
  auto bt = integrate_rk4(sys, lift_point(g, start), 0, 1, 1e-3);
  auto ok = gamma_relatedness(sys, g, bt);
  CHECK(ok.pass);
  CHECK_FALSE(gamma_relatedness(sys, beam_schmidt_gamma(0.8, 0.2), bt).pass);

  Trajectory shortt = bt;
  shortt.samples.resize(4);
  shortt.times.resize(4);
  CHECK_THROWS_AS(gamma_relatedness(sys, g, shortt), PreconditionError);
}

TEST_CASE("local vector field") {
  Expr Hb = substitute(schmidt_hamiltonian(beam(), solve_F_quadratic(beam())), Symbol::param("rho"), Expr(0));
  auto sigma = SectionSigma::from_hamiltonian(accel_base(), Hb);
  SampleOptions o;
  o.fixed = {{Symbol::param("mu"), 1.3}};
  CHECK(local_vf_residual(sigma, beam_schmidt_gamma(0.7, 0.2), o).sup_norm <= 1e-8);

  SectionSigma zero{accel_base(), {Expr(0), Expr(0)}, {Expr(0), Expr(0)}};
  auto cst = ClosedOneForm::from_components(accel_base(), {P("2"), P("-1")});
  CHECK(local_vf_residual(zero, cst).sup_norm == 0.0);
  zero.force[1] = Expr(1);
  CHECK(local_vf_residual(zero, cst).sup_norm == 1.0);
  zero.force.pop_back();
  CHECK_THROWS_AS(local_vf_residual(zero, cst), PreconditionError);
}

TEST_CASE("affine symmetry") {
  Expr g = P("q1_1^2*q2_1 + q1_0*q2_1^3");
  CHECK(affine_symmetry_check({diff(g, Symbol::q(1, 1)), diff(g, Symbol::q(2, 1))}).pass);
  auto chiral = affine_decompose(LagrangianSpec::make(2, 2, P("-lambda*(q1_1*q2_2 - q2_1*q1_2) + m*(q1_1^2 + q2_1^2)/2")));
  CHECK(render(chiral.f[0]) == render(simplify(P("lambda*q2_1"))));
  SampleOptions o;
  o.fixed = {{Symbol::param("lambda"), 0.8}};
  CHECK_FALSE(affine_symmetry_check(chiral.f, 1, o).pass);
  CHECK(affine_symmetry_check({P("3"), P("-2")}).pass);
  CHECK_THROWS_AS(affine_decompose(javelin()), PreconditionError);
}

TEST_CASE("affine integrability") {
  AffineParts p{1, 2, {Expr(0)}, P("q1_0^2")};
  CHECK_FALSE(affine_integrability_check(p).pass);
  p.g = P("5 + q1_1^3");
  CHECK(affine_integrability_check(p).pass);
  AffineParts q{2, 2, {P("2"), P("-1")}, P("(q1_1^2 + q2_1^2)/2")};
  CHECK(affine_integrability_check(q).pass);
  AffineParts bad{1, 2, {P("q1_0^3*q1_1")}, P("q1_0*q1_1^2")};
  CHECK_FALSE(affine_integrability_check(bad).pass);
  AffineParts third{1, 3, {P("q1_2^2")}, P("q1_0*q1_1")};
  CHECK(affine_integrability_check(third).pass);
  third.g = P("q1_0^2");
  CHECK_FALSE(affine_integrability_check(third).pass);
}

TEST_CASE("affine solve") {
  auto s = affine_hj_solve({1, 2, {P("c")}, Expr(0)});
  REQUIRE(s.closed);
  CHECK(s.components[0].is_zero());
  CHECK(render(s.components[1]) == "c");
  REQUIRE(s.W);
  CHECK(equal_numeric(*s.W, P("c*q1_1"), 20, 1e-12));

  auto open = affine_hj_solve({1, 2, {Expr(0)}, P("q1_1^3")});
  CHECK_FALSE(open.closed);
  CHECK(open.first == 0);
  CHECK(open.second == 1);
  CHECK_THROWS_AS(open.form(), ClosureError);
  CHECK(affine_hj_solve({1, 2, {Expr(0)}, P("4*q1_1")}).closed);

  auto zero = affine_hj_solve({1, 2, {Expr(0)}, Expr(0)});
  CHECK(zero.W->is_zero());

  CHECK_THROWS_AS(affine_hj_solve({1, 2, {Expr(0)}, P("q1_0^2")}), PreconditionError);
}

TEST_CASE("affine solutions re-verify under the Morse-family residual") {
  std::mt19937_64 rng(41);
  std::vector<Symbol> v2{Symbol::q(1, 0), Symbol::q(2, 0), Symbol::q(1, 1), Symbol::q(2, 1)};
  for (int t = 0; t < 5; ++t) {
    Expr W = oracle::random_poly(rng, v2, 3, 5);
    AffineParts p{2, 2, {diff(W, Symbol::q(1, 1)), diff(W, Symbol::q(2, 1))},
                  simplify(diff(W, Symbol::q(1, 0)) * Expr(Symbol::q(1, 1)) + diff(W, Symbol::q(2, 0)) * Expr(Symbol::q(2, 1)) + Expr(3))};
    auto s = affine_hj_solve(p);
    REQUIRE(s.closed);
    auto mf = ostro_energy(LagrangianSpec::make(2, 2, p.lagrangian()));
    CHECK(hj_residual(mf, s.form()).pass);
    CHECK(equal_numeric(*s.W, W - substitute(W, [&] {
                                  std::map<Symbol, Expr> z;
                                  for (const auto& x : v2) z[x] = Expr(0);
                                  return z;
                                }()),
                        20, 1e-10));
  }
  std::vector<Symbol> v3{Symbol::q(1, 0), Symbol::q(1, 2)};
  for (int t = 0; t < 3; ++t) {
    Expr phi = oracle::random_poly(rng, {Symbol::q(1, 0)}, 3, 3);
    Expr psi = oracle::random_poly(rng, {Symbol::q(1, 2)}, 3, 3);
    AffineParts p{1, 3, {diff(psi, Symbol::q(1, 2))}, simplify(diff(phi, Symbol::q(1, 0)) * Expr(Symbol::q(1, 1)))};
    auto s = affine_hj_solve(p);
    REQUIRE(s.closed);
    auto mf = ostro_energy(LagrangianSpec::make(1, 3, p.lagrangian()));
    CHECK(hj_residual(mf, s.form()).pass);
  }
}

TEST_CASE("line-integral potential") {
  std::vector<Symbol> xs{Symbol::q(1, 0), Symbol::q(1, 1)};
  Expr W = P("q1_0^2*q1_1^3 - 4*q1_1 + k*q1_0");
  auto got = line_integral_potential(xs, {diff(W, xs[0]), diff(W, xs[1])});
  REQUIRE(got);
  CHECK(equal_numeric(*got, W, 30, 1e-12));
  CHECK_FALSE(line_integral_potential(xs, {P("sin(q1_0)"), Expr(0)}).has_value());
}

TEST_CASE("report serialisation") {
  auto rep = hj_residual(ostro_energy(javelin()), javelin_gamma("1"), javelin_domain());
  auto j = rep.to_json();
  CHECK(j["pass"] == true);
  CHECK(j["residuals"].size() == 3);
  CHECK(j.dump() == hj_residual(ostro_energy(javelin()), javelin_gamma("1"), javelin_domain()).to_json().dump());
  CHECK(rep.to_text().find("PASS") != std::string::npos);
}
