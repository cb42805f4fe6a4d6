#include <random>

#include "doctest.h"
#include "hjm/symexpr.hpp"
#include "oracle/fd.hpp"
#include "oracle/random_expr.hpp"

using namespace hjm;

namespace {

Symbol q(int c, int l) { return Symbol::q(c, l); }
Symbol mu() { return Symbol::param("mu"); }

bool eq(const Expr& a, const Expr& b, double tol = 1e-12) { return equal_numeric(a, b, 50, tol); }

}  // namespace

TEST_CASE("symbol grammar round-trips") {
  for (const char* s : {"q1_0", "p2_3", "a1_1", "m3_0", "pq1", "pa2", "pm1", "dq1_2", "dp4_0", "lam1", "mu", "rho"}) {
    Symbol sym = parse_symbol(s);
    CHECK(sym.str() == s);
    CHECK(parse_symbol(sym.str()) == sym);
  }
  CHECK(parse_symbol("q1_2").kind == SymKind::Q);
  CHECK(parse_symbol("q1_2").level == 2);
  CHECK(parse_symbol("pq3").kind == SymKind::PQ);
  CHECK(parse_symbol("dp2_1").kind == SymKind::DOTP);
  CHECK(parse_symbol("lam4").component == 4);
  CHECK(parse_symbol("c2").kind == SymKind::PARAM);
  CHECK_THROWS_AS(parse_symbol("q0_1"), UnknownIdentifierError);
  CHECK_THROWS_AS(parse_symbol("q1_x"), UnknownIdentifierError);
}

TEST_CASE("symbols compare by kind, component and level") {
  CHECK(Symbol::q(1, 2) == parse_symbol("q1_2"));
  CHECK(Symbol::q(1, 2) != Symbol::q(1, 3));
  CHECK(Symbol::q(1, 2) != Symbol::a(1, 2));
  CHECK(Symbol::q(1, 2) != Symbol::q(2, 2));
}

TEST_CASE("unbound lookup is an error") {
  Binding b{{q(1, 0), 1.0}};
  CHECK_THROWS_AS(eval(parse("q1_0 + q1_1"), b), UnboundSymbolError);
}

TEST_CASE("parse: grammar cases") {
  Expr e = parse("q1_2^2/2");
  CHECK(e.op() == Op::Mul);
  CHECK(e.node().args[0].op() == Op::Pow);
  CHECK(e.node().args[0].node().expo == Num(2));
  CHECK(e.node().args[1].const_value() == Num::rational(1, 2));

  Expr m = simplify(parse("mu*a1_0*q1_1"));
  CHECK(m.op() == Op::Mul);
  CHECK(m.node().args.size() == 3);
  CHECK(free_symbols(m) == SymbolSet{mu(), Symbol::a(1, 0), q(1, 1)});

  Expr chiral = parse("q1_1*q2_2 - q2_1*q1_2");
  Binding b{{q(1, 1), 0.3}, {q(2, 2), -1.2}, {q(2, 1), 0.7}, {q(1, 2), 2.0}};
  CHECK(eval(chiral, b) == doctest::Approx(0.3 * -1.2 - 0.7 * 2.0));
  // swapping the roles of the two components flips the sign
  Expr swapped = parse("q2_1*q1_2 - q1_1*q2_2");
  CHECK(eq(chiral, -swapped));
}

TEST_CASE("parse: precedence and associativity") {
  Binding b{{Symbol::param("x"), 2.0}, {Symbol::param("y"), 3.0}};
  CHECK(eval(parse("-x^2"), b) == doctest::Approx(-4));
  CHECK(eval(parse("2^3^2"), b) == doctest::Approx(512));
  CHECK(eval(parse("x - y - 1"), b) == doctest::Approx(-2));
  CHECK(eval(parse("x/y/2"), b) == doctest::Approx(2.0 / 3.0 / 2.0));
  CHECK(eval(parse("x^-1*y"), b) == doctest::Approx(1.5));
  CHECK(eval(parse("-x*y + 2"), b) == doctest::Approx(-4));
  CHECK(eval(parse("sqrt(x*8)"), b) == doctest::Approx(4));
  CHECK(eval(parse("ln(exp(x))"), b) == doctest::Approx(2));
  CHECK(eval(parse("x^y"), b) == doctest::Approx(8));
  CHECK(eval(parse("1.5e1 + .5"), b) == doctest::Approx(15.5));
}

TEST_CASE("parse: errors") {
  try {
    parse("q1_0 + * 2");
    FAIL("expected a syntax error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 7);
  }
  CHECK_THROWS_AS(parse("(q1_0"), ParseError);
  CHECK_THROWS_AS(parse("q1_0 $ 1"), ParseError);
  try {
    parse("foo(q1_0)");
    FAIL("expected unknown identifier");
  } catch (const UnknownIdentifierError& e) {
    CHECK(e.token() == "foo");
  }
  CHECK_THROWS_AS(parse("q0_1 + 1"), UnknownIdentifierError);
  CHECK_THROWS_AS(parse("sin + 1"), UnknownIdentifierError);
}

TEST_CASE("decimal literals are exact rationals") {
  CHECK(simplify(parse("0.1 + 0.2 - 0.3")).is_zero());
  CHECK(simplify(parse("1/3 + 2/3")).const_value() == Num(1));
}

TEST_CASE("simplify: like terms") {
  CHECK(render(simplify(parse("q1_1 + q1_1"))) == "2*q1_1");
  CHECK(simplify(parse("q1_2*mu - mu*q1_2")).is_zero());
  CHECK(simplify(parse("(q1_0+1)^2 - q1_0^2 - 2*q1_0 - 1")).is_zero());
  CHECK(simplify(parse("q1_0*q1_0^-1")).const_value() == Num(1));
  CHECK(simplify(parse("sqrt(q1_0)^2")) .op() == Op::Sym);
}

TEST_CASE("simplify is idempotent and eval-preserving on random trees") {
  std::mt19937_64 rng(7);
  std::vector<Symbol> vars{q(1, 0), q(1, 1), q(2, 0), mu()};
  for (int t = 0; t < 60; ++t) {
    Expr e = oracle::random_tree(rng, vars, 1 + t % 8);
    Expr s1 = simplify(e);
    Expr s2 = simplify(s1);
    CHECK_MESSAGE(same(s1, s2), render(s1), " vs ", render(s2));
    for (int k = 0; k < 100; ++k) {
      Binding b = oracle::random_binding(rng, SymbolSet(vars.begin(), vars.end()));
      double v0 = eval(e, b), v1 = eval(s1, b);
      CHECK(std::abs(v0 - v1) <= 1e-12 * (1 + std::abs(v0)) * 10);
    }
  }
}

TEST_CASE("render round-trips through parse") {
  std::mt19937_64 rng(11);
  std::vector<Symbol> vars{q(1, 0), q(1, 1), Symbol::pq(1), mu()};
  for (int t = 0; t < 60; ++t) {
    Expr e = oracle::random_tree(rng, vars, 1 + t % 6);
    for (const Expr& x : {e, simplify(e)}) {
      Expr back = parse(render(x));
      CHECK_MESSAGE(equal_numeric(x, back, 20, 1e-12), render(x));
    }
  }
  Expr f = simplify(Expr::real(0.1) * Expr(q(1, 0)) - Expr::real(1e-7));
  CHECK(equal_numeric(f, parse(render(f)), 10, 1e-15));
}

TEST_CASE("diff: basic rules") {
  CHECK(render(diff(parse("q1_1*q1_2"), q(1, 2))) == "q1_1");
  Expr beam = parse("mu*q1_2^2/2");
  CHECK(eq(diff(beam, q(1, 2)), parse("mu*q1_2")));
  CHECK(diff(beam, q(1, 5)).is_zero());
  CHECK(eq(diff(parse("sin(q1_0)*exp(q1_0)"), q(1, 0)), parse("cos(q1_0)*exp(q1_0) + sin(q1_0)*exp(q1_0)")));
  CHECK(eq(diff(parse("ln(q1_0^2+1)"), q(1, 0)), parse("2*q1_0/(q1_0^2+1)")));
  CHECK(eq(diff(parse("sqrt(q1_0^2+1)"), q(1, 0)), parse("q1_0/sqrt(q1_0^2+1)")));
}

TEST_CASE("diff agrees with central differences on random cubic polynomials") {
  std::mt19937_64 rng(3);
  std::vector<Symbol> vars{q(1, 0), q(1, 1), q(2, 0), q(2, 2), Symbol::p(1, 0)};
  for (int t = 0; t < 20; ++t) {
    Expr e = oracle::random_poly(rng, vars, 3, 8);
    for (int k = 0; k < 10; ++k) {
      Binding b = oracle::random_binding(rng, SymbolSet(vars.begin(), vars.end()));
      for (const auto& s : vars) {
        double sym = eval(diff(e, s), b);
        double fd = oracle::central_diff(e, b, s);
        CHECK(std::abs(sym - fd) <= 1e-6 * (1 + std::abs(sym)));
      }
    }
  }
}

TEST_CASE("diff is linear and obeys Leibniz") {
  std::mt19937_64 rng(5);
  std::vector<Symbol> vars{q(1, 0), q(1, 1), mu()};
  for (int t = 0; t < 20; ++t) {
    Expr e1 = oracle::random_tree(rng, vars, 4);
    Expr e2 = oracle::random_tree(rng, vars, 4);
    Symbol s = vars[static_cast<std::size_t>(t) % vars.size()];
    Expr lin = diff(Expr(3) * simplify(e1) + Expr(Num::rational(-2, 5)) * simplify(e2), s);
    CHECK(eq(lin, Expr(3) * diff(e1, s) + Expr(Num::rational(-2, 5)) * diff(e2, s), 1e-10));
    Expr prod = diff(Expr::mul({e1, e2}), s);
    CHECK(eq(prod, simplify(e1) * diff(e2, s) + simplify(e2) * diff(e1, s), 1e-10));
  }
}

TEST_CASE("total time derivative") {
  CHECK(render(total_time_derivative(parse("q1_0"))) == "q1_1");
  Expr F = parse("q1_0*q1_1^2 + sin(q1_2)");
  Expr expected = simplify(diff(F, q(1, 0)) * Expr(q(1, 1)) + diff(F, q(1, 1)) * Expr(q(1, 2)) +
                           diff(F, q(1, 2)) * Expr(q(1, 3)));
  CHECK(eq(total_time_derivative(F), expected));
  CHECK_THROWS_AS(total_time_derivative(parse("q1_3"), 3), LevelOverflowError);
  CHECK_THROWS_AS(total_time_derivative(parse("pq1")), PreconditionError);
  CHECK(total_time_derivative(parse("mu*rho")).is_zero());
}

TEST_CASE("second total derivative matches sampled curves") {
  Expr e = parse("q1_0^2");
  Expr d2 = total_time_derivative_n(e, 2);
  CHECK(eq(d2, parse("2*q1_1^2 + 2*q1_0*q1_2")));
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int t = 0; t < 5; ++t) {
    oracle::PolyCurve c{{U(rng), U(rng), U(rng), U(rng)}};
    double tt = U(rng);
    Binding b;
    oracle::bind_jet(b, 1, c, tt, 2);
    double sym = eval(d2, b);
    double fd = oracle::second_time_derivative(e, 1, c, tt, 0);
    CHECK(std::abs(sym - fd) <= 1e-5 * (1 + std::abs(sym)));
  }
}

TEST_CASE("d/dq_(k+1) of dF/dt equals dF/dq_(k)") {
  std::mt19937_64 rng(13);
  std::vector<Symbol> vars{q(1, 0), q(1, 1), q(1, 2), q(2, 0), q(2, 2)};
  for (int t = 0; t < 15; ++t) {
    Expr F = oracle::random_poly(rng, vars, 3, 6);
    Expr dF = total_time_derivative(F);
    CHECK(eq(diff(dF, q(1, 3)), diff(F, q(1, 2))));
    CHECK(eq(diff(dF, q(2, 3)), diff(F, q(2, 2))));
  }
}

TEST_CASE("equal_numeric") {
  CHECK(equal_numeric(parse("(q1_0+1)^2"), parse("q1_0^2+2*q1_0+1"), 20, 1e-12));
  CHECK_FALSE(equal_numeric(parse("q1_0^2"), parse("q1_0^3"), 20, 1e-6));
  CHECK(equal_numeric(parse("sqrt(q1_0)^2"), parse("q1_0"), 20, 1e-12));
  CHECK_THROWS_AS(equal_numeric(parse("ln(-q1_0^2-1)"), parse("0"), 3, 1e-9), DomainExhaustedError);
  CHECK_THROWS_AS(equal_numeric(parse("1"), parse("1"), 0, 1e-9), PreconditionError);
}

TEST_CASE("substitute and bind_params") {
  Expr e = parse("mu*q1_2 + rho");
  Expr s = substitute(e, q(1, 2), parse("p1_1/mu"));
  CHECK(eq(s, parse("p1_1 + rho")));
  Expr b = bind_params(e, {{"mu", 2.0}, {"rho", 0.5}});
  CHECK(render(b) == "2*q1_2 + 1/2");
}
