#include <unordered_map>

#include "hjm/symexpr.hpp"
#include "internal.hpp"

namespace hjm {

namespace {

void collect(const Expr& e, SymbolSet& out) {
  const Node& n = e.node();
  if (n.op == Op::Sym) {
    out.insert(n.sym);
    return;
  }
  for (const auto& a : n.args) collect(a, out);
}

bool has_sym(const Expr& e, const Symbol& s) {
  const Node& n = e.node();
  if (n.op == Op::Sym) return n.sym == s;
  for (const auto& a : n.args)
    if (has_sym(a, s)) return true;
  return false;
}

// Raw derivative; callers simplify. Memoised per call on node identity since trees share subterms.
class Differ {
 public:
  explicit Differ(const Symbol& s) : s_(s) {}

  Expr operator()(const Expr& e) {
    auto it = memo_.find(&e.node());
    if (it != memo_.end()) return it->second;
    Expr d = compute(e);
    memo_.emplace(&e.node(), d);
    return d;
  }

 private:
  Expr compute(const Expr& e) {
    const Node& n = e.node();
    switch (n.op) {
      case Op::Const:
        return Expr(0);
      case Op::Sym:
        return Expr(n.sym == s_ ? 1 : 0);
      case Op::Add: {
        std::vector<Expr> ts;
        for (const auto& a : n.args) ts.push_back((*this)(a));
        return detail::canonical_add(ts);
      }
      case Op::Mul: {
        std::vector<Expr> ts;
        for (std::size_t i = 0; i < n.args.size(); ++i) {
          Expr di = (*this)(n.args[i]);
          if (di.is_zero()) continue;
          std::vector<Expr> fs;
          for (std::size_t j = 0; j < n.args.size(); ++j) fs.push_back(j == i ? di : n.args[j]);
          ts.push_back(detail::canonical_mul(fs));
        }
        return detail::canonical_add(ts);
      }
      case Op::Neg:
        return detail::canonical_mul({Expr(-1), (*this)(n.args[0])});
      case Op::Pow: {
        Expr db = (*this)(n.args[0]);
        if (db.is_zero()) return Expr(0);
        return detail::canonical_mul(
            {Expr(n.expo), detail::canonical_pow(n.args[0], n.expo - Num(1)), db});
      }
      case Op::Fn: {
        const Expr& x = n.args[0];
        Expr dx = (*this)(x);
        if (dx.is_zero()) return Expr(0);
        switch (n.fn) {
          case Fn::Sin: return detail::canonical_mul({cos(x), dx});
          case Fn::Cos: return detail::canonical_mul({Expr(-1), sin(x), dx});
          case Fn::Exp: return detail::canonical_mul({e, dx});
          case Fn::Ln: return detail::canonical_mul({detail::canonical_pow(x, Num(-1)), dx});
        }
      }
    }
    return Expr(0);
  }

  Symbol s_;
  std::unordered_map<const Node*, Expr> memo_;
};

Expr subst_raw(const Expr& e, const std::map<Symbol, Expr>& subs) {
  const Node& n = e.node();
  switch (n.op) {
    case Op::Const:
      return e;
    case Op::Sym: {
      auto it = subs.find(n.sym);
      return it == subs.end() ? e : it->second;
    }
    case Op::Pow:
      return Expr::pow(subst_raw(n.args[0], subs), n.expo);
    case Op::Neg:
      return Expr::neg(subst_raw(n.args[0], subs));
    case Op::Fn:
      return Expr::fn(n.fn, subst_raw(n.args[0], subs));
    case Op::Add:
    case Op::Mul: {
      std::vector<Expr> xs;
      for (const auto& a : n.args) xs.push_back(subst_raw(a, subs));
      return n.op == Op::Add ? Expr::add(std::move(xs)) : Expr::mul(std::move(xs));
    }
  }
  return e;
}

}  // namespace

SymbolSet free_symbols(const Expr& e) {
  SymbolSet out;
  collect(e, out);
  return out;
}

bool depends_on(const Expr& e, const Symbol& s) { return has_sym(e, s); }

bool depends_on_any(const Expr& e, const SymbolSet& ss) {
  for (const auto& s : free_symbols(e))
    if (ss.count(s)) return true;
  return false;
}

Expr diff(const Expr& e, const Symbol& s) {
  if (!has_sym(e, s)) return Expr(0);
  Expr canon = simplify(e);
  Differ d(s);
  return simplify(d(canon));
}

Expr substitute(const Expr& e, const std::map<Symbol, Expr>& subs) {
  if (subs.empty()) return simplify(e);
  return simplify(subst_raw(e, subs));
}

Expr substitute(const Expr& e, const Symbol& s, const Expr& by) { return substitute(e, {{s, by}}); }

Expr total_time_derivative(const Expr& e, int max_order) {
  std::vector<Expr> terms;
  for (const auto& s : free_symbols(e)) {
    if (s.kind == SymKind::PARAM) continue;
    if (!s.is_jet())
      throw PreconditionError("symbol " + s.str() + " has no jet prolongation under d/dt");
    if (s.level >= max_order)
      throw LevelOverflowError(s.str() + " at level " + std::to_string(s.level) + " >= max order " +
                               std::to_string(max_order));
    Expr d = diff(e, s);
    if (d.is_zero()) continue;
    terms.push_back(detail::canonical_mul({d, Expr(s.shifted())}));
  }
  return detail::canonical_add(terms);
}

Expr total_time_derivative_n(const Expr& e, int times, int max_order) {
  Expr r = simplify(e);
  for (int i = 0; i < times; ++i) r = total_time_derivative(r, max_order);
  return r;
}

Expr bind_params(const Expr& e, const std::map<std::string, double>& params) {
  std::map<Symbol, Expr> subs;
  for (const auto& s : free_symbols(e)) {
    if (s.kind != SymKind::PARAM) continue;
    auto it = params.find(s.name);
    if (it == params.end()) continue;
    double v = it->second;
    // integers and simple fractions stay exact so identities keep verifying exactly
    Num c = Num::real(v);
    for (long long den : {1LL, 2LL, 3LL, 4LL, 5LL, 8LL, 10LL, 100LL, 1000LL}) {
      double num = v * static_cast<double>(den);
      if (std::abs(num) < 1e15 && num == std::floor(num)) {
        c = Num::rational(static_cast<long long>(num), den);
        break;
      }
    }
    subs.emplace(s, Expr(c));
  }
  return substitute(e, subs);
}

}  // namespace hjm
