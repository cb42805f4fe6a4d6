#include "hjm/charts.hpp"

#include <algorithm>
#include <set>

namespace hjm {

std::string space_name(Space s) {
  switch (s) {
    case Space::TkQ: return "TkQ";
    case Space::TTk1Q: return "TTk-1Q";
    case Space::TstarTk1Q: return "T*Tk-1Q";
    case Space::TTstarTk1Q: return "TT*Tk-1Q";
    case Space::TstarTstarTk1Q: return "T*T*Tk-1Q";
    case Space::TstarTTk1Q: return "T*TTk-1Q";
    case Space::Whitney: return "TkQ+T*Tk-1Q";
    case Space::AQ: return "AQ";
    case Space::TAQ: return "TAQ";
    case Space::TstarAQ: return "T*AQ";
    case Space::TAQxM: return "T(AQxM)";
    case Space::TstarAQxM: return "T*(AQxM)";
  }
  return "?";
}

namespace {

using Maker = Symbol (*)(int, int);

void block(std::vector<Symbol>& out, int n, int lo, int hi, Maker mk) {
  for (int l = lo; l <= hi; ++l)
    for (int c = 1; c <= n; ++c) out.push_back(mk(c, l));
}

void single(std::vector<Symbol>& out, int n, Symbol (*mk)(int)) {
  for (int c = 1; c <= n; ++c) out.push_back(mk(c));
}

std::vector<Symbol> standard_roster(Space s, int n, int k) {
  std::vector<Symbol> r;
  const int top = k - 1;
  switch (s) {
    case Space::TkQ: block(r, n, 0, k, Symbol::q); break;
    case Space::TTk1Q:
      block(r, n, 0, top, Symbol::q);
      block(r, n, 0, top, Symbol::dq);
      break;
    case Space::TstarTk1Q:
      block(r, n, 0, top, Symbol::q);
      block(r, n, 0, top, Symbol::p);
      break;
    case Space::TTstarTk1Q:
      block(r, n, 0, top, Symbol::q);
      block(r, n, 0, top, Symbol::p);
      block(r, n, 0, top, Symbol::dq);
      block(r, n, 0, top, Symbol::dp);
      break;
    case Space::TstarTstarTk1Q:
      block(r, n, 0, top, Symbol::q);
      block(r, n, 0, top, Symbol::p);
      block(r, n, 0, top, Symbol::dp);
      block(r, n, 0, top, Symbol::dq);
      break;
    case Space::TstarTTk1Q:
      block(r, n, 0, top, Symbol::q);
      block(r, n, 0, top, Symbol::dq);
      block(r, n, 0, top, Symbol::dp);
      block(r, n, 0, top, Symbol::p);
      break;
    case Space::Whitney:
      block(r, n, 0, k, Symbol::q);
      block(r, n, 0, top, Symbol::p);
      break;
    case Space::AQ:
      block(r, n, 0, 0, Symbol::q);
      block(r, n, 0, 0, Symbol::a);
      break;
    case Space::TAQ:
      block(r, n, 0, 0, Symbol::q);
      block(r, n, 0, 0, Symbol::a);
      block(r, n, 1, 1, Symbol::q);
      block(r, n, 1, 1, Symbol::a);
      break;
    case Space::TstarAQ:
      block(r, n, 0, 0, Symbol::q);
      block(r, n, 0, 0, Symbol::a);
      single(r, n, Symbol::pq);
      single(r, n, Symbol::pa);
      break;
    case Space::TAQxM:
      block(r, n, 0, 0, Symbol::q);
      block(r, n, 0, 0, Symbol::a);
      block(r, n, 0, 0, Symbol::m);
      block(r, n, 1, 1, Symbol::q);
      block(r, n, 1, 1, Symbol::a);
      block(r, n, 1, 1, Symbol::m);
      break;
    case Space::TstarAQxM:
      block(r, n, 0, 0, Symbol::q);
      block(r, n, 0, 0, Symbol::a);
      block(r, n, 0, 0, Symbol::m);
      single(r, n, Symbol::pq);
      single(r, n, Symbol::pa);
      single(r, n, Symbol::pm);
      break;
  }
  return r;
}

}  // namespace

std::size_t chart_dimension(Space s, int n, int k) {
  const auto N = static_cast<std::size_t>(n), K = static_cast<std::size_t>(k);
  switch (s) {
    case Space::TkQ: return N * (K + 1);
    case Space::TTk1Q:
    case Space::TstarTk1Q: return 2 * K * N;
    case Space::TTstarTk1Q:
    case Space::TstarTstarTk1Q:
    case Space::TstarTTk1Q: return 4 * K * N;
    case Space::Whitney: return N * (2 * K + 1);
    case Space::AQ: return 2 * N;
    case Space::TAQ:
    case Space::TstarAQ: return 4 * N;
    case Space::TAQxM:
    case Space::TstarAQxM: return 6 * N;
  }
  return 0;
}

ChartSpec ChartSpec::standard(Space s, int n, int k) {
  if (n < 1 || k < 1) throw PreconditionError("chart needs n >= 1 and k >= 1");
  ChartSpec c;
  c.space = s;
  c.dim = n;
  c.order = k;
  c.roster = standard_roster(s, n, k);
  return c;
}

ChartSpec ChartSpec::with_roster(Space s, int n, int k, std::vector<Symbol> roster) {
  ChartSpec c = standard(s, n, k);
  if (roster.size() != chart_dimension(s, n, k))
    throw ChartMismatchError("roster length " + std::to_string(roster.size()) + " does not match dim " +
                             std::to_string(chart_dimension(s, n, k)) + " of " + space_name(s));
  std::set<Symbol> seen(roster.begin(), roster.end());
  if (seen.size() != roster.size()) throw ChartMismatchError("roster has duplicate symbols");
  if (seen != std::set<Symbol>(c.roster.begin(), c.roster.end()))
    throw ChartMismatchError("roster is not a chart on " + space_name(s));
  c.roster = std::move(roster);
  return c;
}

Point Point::from_vector(const ChartSpec& c, const std::vector<double>& v) {
  if (v.size() != c.roster.size())
    throw ChartMismatchError("expected " + std::to_string(c.roster.size()) + " values, got " +
                             std::to_string(v.size()));
  Point p{c, {}};
  for (std::size_t i = 0; i < v.size(); ++i) p.values[c.roster[i]] = v[i];
  return p;
}

std::vector<double> Point::to_vector() const {
  std::vector<double> v;
  v.reserve(chart.roster.size());
  for (const auto& s : chart.roster) v.push_back(lookup(values, s));
  return v;
}

void require_chart(const Point& p, Space s) {
  if (p.chart.space != s)
    throw ChartMismatchError("expected a point on " + space_name(s) + ", got " + space_name(p.chart.space));
  if (p.values.size() != p.chart.roster.size())
    throw ChartMismatchError("point binds " + std::to_string(p.values.size()) + " symbols, roster has " +
                             std::to_string(p.chart.roster.size()));
  for (const auto& sym : p.chart.roster)
    if (!p.values.count(sym)) throw ChartMismatchError("point does not bind roster symbol " + sym.str());
}

namespace {

/// Output point on the standard chart of `s`, filled by a slot-wise rule.
template <class Rule>
Point remap(const Point& in, Space s, int k, Rule rule) {
  Point out{ChartSpec::standard(s, in.chart.dim, k), {}};
  for (const auto& sym : out.chart.roster) out.values[sym] = rule(sym);
  return out;
}

}  // namespace

Point iterated_tangent_embed(const Point& p) {
  require_chart(p, Space::TkQ);
  return remap(p, Space::TTk1Q, p.chart.order, [&](const Symbol& s) {
    if (s.kind == SymKind::Q) return p[s];
    return p[Symbol::q(s.component, s.level + 1)];
  });
}

Point tulczyjew_flat(const Point& p) {
  require_chart(p, Space::TTstarTk1Q);
  return remap(p, Space::TstarTstarTk1Q, p.chart.order, [&](const Symbol& s) {
    return s.kind == SymKind::DOTQ ? -p[s] : p[s];
  });
}

Point tulczyjew_flat_inverse(const Point& p) {
  require_chart(p, Space::TstarTstarTk1Q);
  return remap(p, Space::TTstarTk1Q, p.chart.order, [&](const Symbol& s) {
    return s.kind == SymKind::DOTQ ? -p[s] : p[s];
  });
}

Point tulczyjew_xi(const Point& p) {
  require_chart(p, Space::TTstarTk1Q);
  return remap(p, Space::TstarTTk1Q, p.chart.order, [&](const Symbol& s) { return p[s]; });
}

Point tulczyjew_xi_inverse(const Point& p) {
  require_chart(p, Space::TstarTTk1Q);
  return remap(p, Space::TTstarTk1Q, p.chart.order, [&](const Symbol& s) { return p[s]; });
}

Point acceleration_iso(const Point& p) {
  require_chart(p, Space::TAQ);
  return remap(p, Space::TkQ, 3, [&](const Symbol& s) {
    const int c = s.component;
    switch (s.level) {
      case 0: return p[Symbol::q(c, 0)];
      case 1: return p[Symbol::q(c, 1)];
      case 2: return p[Symbol::a(c, 0)];
      default: return p[Symbol::a(c, 1)];
    }
  });
}

Point acceleration_iso_inverse(const Point& p) {
  require_chart(p, Space::TkQ);
  if (p.chart.order != 3) throw ChartMismatchError("acceleration iso needs a third-order tangent chart");
  return remap(p, Space::TAQ, 3, [&](const Symbol& s) {
    const int c = s.component;
    if (s.kind == SymKind::Q) return p[Symbol::q(c, s.level)];
    return p[Symbol::q(c, s.level + 2)];
  });
}

std::vector<std::pair<Symbol, Symbol>> canonical_pairs(const ChartSpec& c) {
  std::vector<std::pair<Symbol, Symbol>> out;
  const int n = c.dim;
  switch (c.space) {
    case Space::TstarTk1Q:
      for (int l = 0; l < c.order; ++l)
        for (int a = 1; a <= n; ++a) out.emplace_back(Symbol::q(a, l), Symbol::p(a, l));
      break;
    case Space::TstarAQ:
    case Space::TstarAQxM:
      for (int a = 1; a <= n; ++a) out.emplace_back(Symbol::q(a, 0), Symbol::pq(a));
      for (int a = 1; a <= n; ++a) out.emplace_back(Symbol::a(a, 0), Symbol::pa(a));
      if (c.space == Space::TstarAQxM)
        for (int a = 1; a <= n; ++a) out.emplace_back(Symbol::m(a, 0), Symbol::pm(a));
      break;
    default: throw ChartMismatchError(space_name(c.space) + " is not a cotangent chart");
  }
  return out;
}

double lifted_two_form(const Point& u, const Point& v) {
  require_chart(u, Space::TTstarTk1Q);
  require_chart(v, Space::TTstarTk1Q);
  double w = 0;
  for (int l = 0; l < u.chart.order; ++l)
    for (int c = 1; c <= u.chart.dim; ++c) {
      const Symbol q = Symbol::q(c, l), p = Symbol::p(c, l), dq = Symbol::dq(c, l), dp = Symbol::dp(c, l);
      w += u[dp] * v[q] - u[q] * v[dp];
      w += u[p] * v[dq] - u[dq] * v[p];
    }
  return w;
}

double canonical_two_form(const Point& u, const Point& v) {
  require_chart(u, Space::TstarTstarTk1Q);
  require_chart(v, Space::TstarTstarTk1Q);
  double w = 0;
  for (int l = 0; l < u.chart.order; ++l)
    for (int c = 1; c <= u.chart.dim; ++c) {
      // fiber momenta: dp slot pairs with q, dq slot pairs with p
      const Symbol q = Symbol::q(c, l), p = Symbol::p(c, l), pi_q = Symbol::dp(c, l), pi_p = Symbol::dq(c, l);
      w += u[pi_q] * v[q] - u[q] * v[pi_q];
      w += u[pi_p] * v[p] - u[p] * v[pi_p];
    }
  return w;
}

VectorFieldTable semispray_type1(const std::vector<Expr>& F, int n, int k) {
  if (n < 1 || k < 1) throw PreconditionError("semispray needs n >= 1 and k >= 1");
  if (F.size() != static_cast<std::size_t>(n))
    throw PreconditionError("semispray needs " + std::to_string(n) + " components, got " + std::to_string(F.size()));
  for (const auto& f : F)
    for (const auto& s : free_symbols(f)) {
      if (s.kind == SymKind::PARAM) continue;
      if (s.kind != SymKind::Q || s.component > n)
        throw PreconditionError("semispray component depends on " + s.str() + " outside the chart");
      if (s.level > k) throw LevelOverflowError(s.str() + " exceeds order " + std::to_string(k));
    }
  VectorFieldTable t;
  for (int l = 0; l < k; ++l)
    for (int c = 1; c <= n; ++c) t.emplace_back(Symbol::q(c, l), Expr(Symbol::q(c, l + 1)));
  for (int c = 1; c <= n; ++c) t.emplace_back(Symbol::q(c, k), simplify(F[static_cast<std::size_t>(c - 1)]));
  return t;
}

}  // namespace hjm
