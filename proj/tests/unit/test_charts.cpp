#include <random>

#include "doctest.h"
#include "hjm/charts.hpp"

using namespace hjm;

namespace {

Point random_point(std::mt19937_64& rng, Space s, int n, int k) {
  std::uniform_real_distribution<double> U(-3, 3);
  ChartSpec c = ChartSpec::standard(s, n, k);
  std::vector<double> v(c.roster.size());
  for (auto& x : v) x = U(rng);
  return Point::from_vector(c, v);
}

}  // namespace

TEST_CASE("roster lengths") {
  for (int n = 1; n <= 3; ++n)
    for (int k = 1; k <= 4; ++k)
      for (Space s : {Space::TkQ, Space::TTk1Q, Space::TstarTk1Q, Space::TTstarTk1Q, Space::TstarTstarTk1Q,
                      Space::TstarTTk1Q, Space::Whitney, Space::AQ, Space::TAQ, Space::TstarAQ, Space::TAQxM,
                      Space::TstarAQxM}) {
        ChartSpec c = ChartSpec::standard(s, n, k);
        CHECK(c.roster.size() == chart_dimension(s, n, k));
        CHECK(std::set<Symbol>(c.roster.begin(), c.roster.end()).size() == c.roster.size());
      }
  CHECK(chart_dimension(Space::TstarTk1Q, 2, 3) == 12);
  CHECK(chart_dimension(Space::TTstarTk1Q, 1, 2) == 8);
}

TEST_CASE("custom rosters are validated") {
  auto r = ChartSpec::standard(Space::TkQ, 1, 2).roster;
  std::reverse(r.begin(), r.end());
  CHECK_NOTHROW(ChartSpec::with_roster(Space::TkQ, 1, 2, r));
  r[0] = r[1];
  CHECK_THROWS_AS(ChartSpec::with_roster(Space::TkQ, 1, 2, r), ChartMismatchError);
  CHECK_THROWS_AS(ChartSpec::with_roster(Space::TkQ, 1, 2, {Symbol::q(1, 0)}), ChartMismatchError);
}

TEST_CASE("embedding into the iterated tangent bundle") {
  auto c = ChartSpec::standard(Space::TkQ, 1, 2);
  Point out = iterated_tangent_embed(Point::from_vector(c, {1, 2, 3}));
  CHECK(out.chart.space == Space::TTk1Q);
  CHECK(out.to_vector() == std::vector<double>{1, 2, 2, 3});

  Point first = iterated_tangent_embed(Point::from_vector(ChartSpec::standard(Space::TkQ, 1, 1), {5, 7}));
  CHECK(first.to_vector() == std::vector<double>{5, 7});

  std::mt19937_64 rng(1);
  Point p = random_point(rng, Space::TkQ, 2, 3);
  Point e = iterated_tangent_embed(p);
  for (int c2 = 1; c2 <= 2; ++c2)
    for (int l = 0; l < 3; ++l) {
      CHECK(e[Symbol::q(c2, l)] == p[Symbol::q(c2, l)]);
      CHECK(e[Symbol::dq(c2, l)] == p[Symbol::q(c2, l + 1)]);
    }
}

TEST_CASE("Tulczyjew maps") {
  auto c = ChartSpec::standard(Space::TTstarTk1Q, 1, 1);
  CHECK(tulczyjew_flat(Point::from_vector(c, {0, 0, 1, 2})).to_vector() == std::vector<double>{0, 0, 2, -1});
  CHECK(tulczyjew_flat(Point::from_vector(c, {0, 0, 0, 0})).to_vector() == std::vector<double>{0, 0, 0, 0});
  CHECK(tulczyjew_xi(Point::from_vector(c, {1, 2, 3, 4})).to_vector() == std::vector<double>{1, 3, 4, 2});
  CHECK(tulczyjew_xi(Point::from_vector(c, {0, 0, 0, 0})).to_vector() == std::vector<double>{0, 0, 0, 0});

  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    Point p = random_point(rng, Space::TTstarTk1Q, 1 + t % 3, 1 + t % 4);
    CHECK(tulczyjew_flat_inverse(tulczyjew_flat(p)).values == p.values);
    CHECK(tulczyjew_xi_inverse(tulczyjew_xi(p)).values == p.values);
    Point f = random_point(rng, Space::TstarTstarTk1Q, 2, 2);
    CHECK(tulczyjew_flat(tulczyjew_flat_inverse(f)).values == f.values);
  }
  CHECK_THROWS_AS(tulczyjew_flat(random_point(rng, Space::TkQ, 1, 2)), ChartMismatchError);
  CHECK_THROWS_AS(tulczyjew_xi(random_point(rng, Space::TstarTTk1Q, 1, 2)), ChartMismatchError);
}

TEST_CASE("flat map preserves the symplectic pairing") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    int n = 1 + t % 3, k = 1 + t % 4;
    Point u = random_point(rng, Space::TTstarTk1Q, n, k);
    Point v = random_point(rng, Space::TTstarTk1Q, n, k);
    double a = lifted_two_form(u, v);
    double b = canonical_two_form(tulczyjew_flat(u), tulczyjew_flat(v));
    CHECK(std::abs(a - b) <= 1e-12 * (1 + std::abs(a)));
    CHECK(std::abs(a + lifted_two_form(v, u)) <= 1e-12 * (1 + std::abs(a)));
  }
}

TEST_CASE("acceleration isomorphism") {
  auto c = ChartSpec::standard(Space::TAQ, 1, 2);
  Point out = acceleration_iso(Point::from_vector(c, {1, 3, 2, 4}));
  CHECK(out.chart.space == Space::TkQ);
  CHECK(out.chart.order == 3);
  CHECK(out.to_vector() == std::vector<double>{1, 2, 3, 4});
  CHECK(acceleration_iso(Point::from_vector(c, {1, 1, 1, 1})).to_vector() == std::vector<double>{1, 1, 1, 1});
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    Point p = random_point(rng, Space::TAQ, 1 + t % 3, 2);
    CHECK(acceleration_iso_inverse(acceleration_iso(p)).values == p.values);
  }
  CHECK_THROWS_AS(acceleration_iso_inverse(random_point(rng, Space::TkQ, 1, 2)), ChartMismatchError);
}

TEST_CASE("missing roster binding is a chart mismatch") {
  auto c = ChartSpec::standard(Space::TkQ, 1, 2);
  Point p = Point::from_vector(c, {1, 2, 3});
  p.values.erase(Symbol::q(1, 2));
  p.values[Symbol::q(1, 5)] = 0;
  CHECK_THROWS_AS(iterated_tangent_embed(p), ChartMismatchError);
}

TEST_CASE("type-1 semispray") {
  auto t = semispray_type1({parse("-rho/mu")}, 1, 2);
  REQUIRE(t.size() == 3);
  CHECK(render(t[0].second) == "q1_1");
  CHECK(render(t[1].second) == "q1_2");
  CHECK(render(t[2].second) == "-rho/mu");
  CHECK(t[2].first == Symbol::q(1, 2));

  auto free = semispray_type1({Expr(0), Expr(0)}, 2, 3);
  CHECK(free.size() == 8);
  CHECK(free.back().second.is_zero());

  CHECK_THROWS_AS(semispray_type1({parse("q1_3")}, 1, 2), LevelOverflowError);
  CHECK_THROWS_AS(semispray_type1({parse("q1_0")}, 2, 2), PreconditionError);
}

TEST_CASE("semispray integral curves are holonomic") {
  // independent RK4 over the table, then central differences along the sampled path
  auto t = semispray_type1({parse("-q1_0 - q1_1*q1_2/4")}, 1, 2);
  std::vector<double> x{0.3, -0.2, 0.5};
  auto field = [&](const std::vector<double>& y) {
    Binding b{{Symbol::q(1, 0), y[0]}, {Symbol::q(1, 1), y[1]}, {Symbol::q(1, 2), y[2]}};
    std::vector<double> d;
    for (auto& row : t) d.push_back(eval(row.second, b));
    return d;
  };
  const double h = 1e-3;
  std::vector<std::vector<double>> path{x};
  for (int i = 0; i < 400; ++i) {
    auto k1 = field(x);
    std::vector<double> y(3);
    for (std::size_t j = 0; j < 3; ++j) y[j] = x[j] + h / 2 * k1[j];
    auto k2 = field(y);
    for (std::size_t j = 0; j < 3; ++j) y[j] = x[j] + h / 2 * k2[j];
    auto k3 = field(y);
    for (std::size_t j = 0; j < 3; ++j) y[j] = x[j] + h * k3[j];
    auto k4 = field(y);
    for (std::size_t j = 0; j < 3; ++j) x[j] += h / 6 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
    path.push_back(x);
  }
  for (std::size_t i = 1; i + 1 < path.size(); i += 37)
    for (std::size_t l = 0; l < 2; ++l) {
      double fd = (path[i + 1][l] - path[i - 1][l]) / (2 * h);
      CHECK(std::abs(fd - path[i][l + 1]) < 1e-5);
    }
}
