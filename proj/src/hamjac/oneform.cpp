#include <algorithm>
#include <random>

#include "hjm/system.hpp"

namespace hjm {

namespace {

void load_pairs(ClosedOneForm& g, const ChartSpec& base) {
  g.base = base;
  for (const auto& [x, p] : canonical_pairs(base)) {
    g.coords.push_back(x);
    g.momenta.push_back(p);
  }
}

}  // namespace

ClosedOneForm ClosedOneForm::from_potential(const ChartSpec& base, const Expr& W) {
  ClosedOneForm g;
  load_pairs(g, base);
  for (const auto& s : free_symbols(W))
    if (s.kind != SymKind::PARAM && std::find(g.coords.begin(), g.coords.end(), s) == g.coords.end())
      throw ChartMismatchError("potential depends on " + s.str() + " outside the base coordinates");
  g.potential = simplify(W);
  for (const auto& x : g.coords) g.components.push_back(diff(W, x));
  return g;
}

ClosedOneForm ClosedOneForm::from_components(const ChartSpec& base, std::vector<Expr> components,
                                             std::uint64_t seed) {
  ClosedOneForm g;
  load_pairs(g, base);
  if (components.size() != g.coords.size())
    throw ChartMismatchError("one-form needs " + std::to_string(g.coords.size()) + " components, got " +
                             std::to_string(components.size()));
  for (auto& c : components) {
    c = simplify(c);
    for (const auto& s : free_symbols(c))
      if (s.kind != SymKind::PARAM && std::find(g.coords.begin(), g.coords.end(), s) == g.coords.end())
        throw ChartMismatchError("one-form component depends on " + s.str() + " outside the base coordinates");
  }
  g.components = std::move(components);
  const std::size_t n = g.coords.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      Expr r = simplify(diff(g.components[i], g.coords[j]) - diff(g.components[j], g.coords[i]));
      if (r.is_zero()) continue;
      double gap = max_relative_gap(r, Expr(0), 50, seed);
      if (gap > 1e-9) throw ClosureError(static_cast<int>(i), static_cast<int>(j), gap);
    }
  return g;
}

std::map<Symbol, Expr> ClosedOneForm::substitution() const {
  std::map<Symbol, Expr> m;
  for (std::size_t i = 0; i < momenta.size(); ++i) m[momenta[i]] = components[i];
  return m;
}

}  // namespace hjm
