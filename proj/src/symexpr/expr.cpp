#include <algorithm>
#include <functional>

#include "hjm/symexpr.hpp"
#include "internal.hpp"

namespace hjm {

namespace {

std::size_t mix(std::size_t h, std::size_t v) { return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)); }

std::size_t hash_num(const Num& n) {
  if (n.exact()) return mix(std::hash<long long>()(n.num()), std::hash<long long>()(n.den()));
  return mix(0xf10a7ULL, std::hash<double>()(n.value()));
}

std::size_t hash_sym(const Symbol& s) {
  std::size_t h = static_cast<std::size_t>(s.kind);
  h = mix(h, static_cast<std::size_t>(s.component));
  h = mix(h, static_cast<std::size_t>(s.level));
  return mix(h, std::hash<std::string>()(s.name));
}

Expr make(Node n) {
  std::size_t h = static_cast<std::size_t>(n.op) * 0x100000001b3ULL;
  switch (n.op) {
    case Op::Const: h = mix(h, hash_num(n.c)); break;
    case Op::Sym: h = mix(h, hash_sym(n.sym)); break;
    case Op::Pow: h = mix(h, hash_num(n.expo)); break;
    case Op::Fn: h = mix(h, static_cast<std::size_t>(n.fn)); break;
    default: break;
  }
  for (const auto& a : n.args) h = mix(h, a.hash());
  n.h = h;
  return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr const_node(const Num& c) {
  Node n;
  n.op = Op::Const;
  n.c = c;
  return make(std::move(n));
}

Expr nary(Op op, std::vector<Expr> xs) {
  Node n;
  n.op = op;
  n.args = std::move(xs);
  return make(std::move(n));
}

Expr pow_node(Expr b, const Num& e) {
  Node n;
  n.op = Op::Pow;
  n.args = {std::move(b)};
  n.expo = e;
  return make(std::move(n));
}

Expr fn_node(Fn f, Expr x) {
  Node n;
  n.op = Op::Fn;
  n.fn = f;
  n.args = {std::move(x)};
  return make(std::move(n));
}

int rank(Op op) {
  switch (op) {
    case Op::Const: return 0;
    case Op::Sym: return 1;
    case Op::Pow: return 2;
    case Op::Fn: return 3;
    case Op::Mul: return 4;
    case Op::Add: return 5;
    case Op::Neg: return 6;
  }
  return 7;
}

int cmp_lists(const std::vector<Expr>& a, const std::vector<Expr>& b) {
  std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i)
    if (int c = compare(a[i], b[i])) return c;
  if (a.size() == b.size()) return 0;
  return a.size() < b.size() ? -1 : 1;
}

}  // namespace

// ---------------------------------------------------------------------------

Expr::Expr() : Expr(const_node(Num(0))) {}
Expr::Expr(long long v) : Expr(const_node(Num(v))) {}
Expr::Expr(const Num& c) : Expr(const_node(c)) {}
Expr::Expr(const Symbol& s) {
  Node n;
  n.op = Op::Sym;
  n.sym = s;
  *this = make(std::move(n));
}

Expr Expr::add(std::vector<Expr> xs) { return nary(Op::Add, std::move(xs)); }
Expr Expr::mul(std::vector<Expr> xs) { return nary(Op::Mul, std::move(xs)); }
Expr Expr::pow(Expr base, Num e) { return pow_node(std::move(base), e); }
Expr Expr::neg(Expr x) {
  Node n;
  n.op = Op::Neg;
  n.args = {std::move(x)};
  return make(std::move(n));
}
Expr Expr::fn(Fn f, Expr x) { return fn_node(f, std::move(x)); }

Op Expr::op() const { return n_->op; }
bool Expr::is_zero() const { return n_->op == Op::Const && n_->c.is_zero(); }
std::optional<Num> Expr::const_value() const {
  if (n_->op == Op::Const) return n_->c;
  return std::nullopt;
}
std::size_t Expr::hash() const { return n_->h; }
std::string Expr::str() const { return render(*this); }

int compare(const Expr& a, const Expr& b) {
  if (&a.node() == &b.node()) return 0;
  const Node& x = a.node();
  const Node& y = b.node();
  if (x.op == Op::Const || y.op == Op::Const) {
    if (x.op != y.op) return x.op == Op::Const ? -1 : 1;
    return compare(x.c, y.c);
  }
  if (x.op == Op::Mul || y.op == Op::Mul) {
    if (x.op == Op::Mul && y.op == Op::Mul) return cmp_lists(x.args, y.args);
    if (x.op == Op::Mul) {
      if (int c = compare(x.args.front(), b)) return c;
      return 1;
    }
    if (int c = compare(a, y.args.front())) return c;
    return -1;
  }
  if (x.op == Op::Pow || y.op == Op::Pow) {
    const Expr& bx = x.op == Op::Pow ? x.args[0] : a;
    const Expr& by = y.op == Op::Pow ? y.args[0] : b;
    if (int c = compare(bx, by)) return c;
    Num ex = x.op == Op::Pow ? x.expo : Num(1);
    Num ey = y.op == Op::Pow ? y.expo : Num(1);
    return compare(ex, ey);
  }
  if (x.op != y.op) return rank(x.op) < rank(y.op) ? -1 : 1;
  switch (x.op) {
    case Op::Sym:
      if (x.sym == y.sym) return 0;
      return x.sym < y.sym ? -1 : 1;
    case Op::Fn:
      if (x.fn != y.fn) return x.fn < y.fn ? -1 : 1;
      return compare(x.args[0], y.args[0]);
    default:
      return cmp_lists(x.args, y.args);
  }
}

// ---------------------------------------------------------------------------
// Canonical constructors. Inputs are assumed canonical.

namespace {

constexpr std::size_t kExpandLimit = 256;
constexpr long long kExpandPow = 6;

Expr c_add(const std::vector<Expr>& xs);
Expr c_mul(const std::vector<Expr>& xs);
Expr c_pow(const Expr& b, const Num& e);

std::size_t term_count(const Expr& e) { return e.op() == Op::Add ? e.node().args.size() : 1; }

Expr c_pow_basic(const Expr& b, const Num& e) {
  if (e.is_zero()) return Expr(1);
  if (e.is_one()) return b;
  const Node& n = b.node();
  if (n.op == Op::Const) {
    if (auto v = Num::pow(n.c, e)) return Expr(*v);
    return pow_node(b, e);
  }
  if (n.op == Op::Pow && e.is_integer()) return c_pow_basic(n.args[0], n.expo * e);
  if (n.op == Op::Mul && e.is_integer()) {
    std::vector<Expr> fs;
    for (const auto& f : n.args) fs.push_back(c_pow_basic(f, e));
    return c_mul(fs);
  }
  return pow_node(b, e);
}

Expr c_pow(const Expr& b, const Num& e) {
  if (b.op() == Op::Add && e.is_integer() && e.num() >= 2 && e.num() <= kExpandPow) {
    std::size_t size = 1;
    for (long long i = 0; i < e.num() && size <= kExpandLimit; ++i) size *= term_count(b);
    if (size <= kExpandLimit) return c_mul(std::vector<Expr>(static_cast<std::size_t>(e.num()), b));
  }
  return c_pow_basic(b, e);
}

Expr c_mul(const std::vector<Expr>& xs) {
  Num coef(1);
  std::map<Expr, Num, ExprLess> powers;
  std::vector<Expr> stack(xs.rbegin(), xs.rend());
  while (!stack.empty()) {
    Expr x = stack.back();
    stack.pop_back();
    const Node& n = x.node();
    if (n.op == Op::Mul) {
      for (auto it = n.args.rbegin(); it != n.args.rend(); ++it) stack.push_back(*it);
    } else if (n.op == Op::Const) {
      coef = coef * n.c;
    } else if (n.op == Op::Pow) {
      auto [it, fresh] = powers.emplace(n.args[0], n.expo);
      if (!fresh) it->second = it->second + n.expo;
    } else {
      auto [it, fresh] = powers.emplace(x, Num(1));
      if (!fresh) it->second = it->second + Num(1);
    }
  }
  if (coef.is_zero()) return Expr(0);

  std::vector<Expr> factors;
  std::vector<Expr> sums;
  bool reflatten = false;
  for (const auto& [b, e] : powers) {
    Expr p = c_pow_basic(b, e);
    const Node& n = p.node();
    if (n.op == Op::Const) {
      coef = coef * n.c;
    } else if (n.op == Op::Mul) {
      reflatten = true;
      factors.push_back(p);
    } else if (n.op == Op::Add) {
      sums.push_back(p);
    } else if (n.op == Op::Pow && n.args[0].op() == Op::Add && n.expo.is_integer() && n.expo.num() >= 2 &&
               n.expo.num() <= kExpandPow) {
      for (long long i = 0; i < n.expo.num(); ++i) sums.push_back(n.args[0]);
    } else {
      factors.push_back(p);
    }
  }
  if (coef.is_zero()) return Expr(0);
  if (reflatten) {
    std::vector<Expr> all = factors;
    all.insert(all.end(), sums.begin(), sums.end());
    all.push_back(Expr(coef));
    return c_mul(all);
  }

  if (!sums.empty()) {
    std::size_t size = 1;
    for (const auto& s : sums) {
      size *= term_count(s);
      if (size > kExpandLimit) break;
    }
    if (size <= kExpandLimit) {
      std::vector<Expr> base_f = factors;
      base_f.push_back(Expr(coef));
      std::vector<Expr> terms{c_mul(base_f)};
      for (const auto& s : sums) {
        std::vector<Expr> next;
        for (const auto& t : terms)
          for (const auto& u : s.node().args) next.push_back(c_mul({t, u}));
        terms = std::move(next);
      }
      return c_add(terms);
    }
    // too large to expand: keep the sums as plain factors, re-collected as powers
    std::map<Expr, long long, ExprLess> cnt;
    for (const auto& s : sums) ++cnt[s];
    for (const auto& [s, k] : cnt) factors.push_back(k == 1 ? s : pow_node(s, Num(k)));
    std::sort(factors.begin(), factors.end(), ExprLess());
  }

  if (factors.empty()) return Expr(coef);
  if (factors.size() == 1 && coef.is_one()) return factors.front();
  std::vector<Expr> args;
  if (!coef.is_one()) args.push_back(Expr(coef));
  args.insert(args.end(), factors.begin(), factors.end());
  return nary(Op::Mul, std::move(args));
}

Expr c_add(const std::vector<Expr>& xs) {
  Num acc(0);
  std::map<Expr, Num, ExprLess> terms;
  std::vector<Expr> stack(xs.rbegin(), xs.rend());
  while (!stack.empty()) {
    Expr x = stack.back();
    stack.pop_back();
    const Node& n = x.node();
    if (n.op == Op::Add) {
      for (auto it = n.args.rbegin(); it != n.args.rend(); ++it) stack.push_back(*it);
      continue;
    }
    if (n.op == Op::Const) {
      acc = acc + n.c;
      continue;
    }
    Num coef(1);
    Expr rest = x;
    if (n.op == Op::Mul && n.args.front().op() == Op::Const) {
      coef = n.args.front().node().c;
      if (n.args.size() == 2) {
        rest = n.args[1];
      } else {
        rest = nary(Op::Mul, std::vector<Expr>(n.args.begin() + 1, n.args.end()));
      }
    }
    auto [it, fresh] = terms.emplace(rest, coef);
    if (!fresh) it->second = it->second + coef;
  }
  std::vector<Expr> out;
  for (const auto& [rest, coef] : terms) {
    if (coef.is_zero()) continue;
    if (coef.is_one()) {
      out.push_back(rest);
      continue;
    }
    std::vector<Expr> args{Expr(coef)};
    if (rest.op() == Op::Mul) {
      args.insert(args.end(), rest.node().args.begin(), rest.node().args.end());
    } else {
      args.push_back(rest);
    }
    out.push_back(nary(Op::Mul, std::move(args)));
  }
  if (!acc.is_zero()) out.push_back(Expr(acc));
  if (out.empty()) return Expr(0);
  if (out.size() == 1) return out.front();
  return nary(Op::Add, std::move(out));
}

Expr c_fn(Fn f, const Expr& x) {
  if (auto c = x.const_value()) {
    if (c->is_zero()) {
      if (f == Fn::Sin) return Expr(0);
      if (f == Fn::Cos || f == Fn::Exp) return Expr(1);
    }
    if (f == Fn::Ln && c->is_one()) return Expr(0);
    double v = c->value();
    switch (f) {
      case Fn::Sin: return Expr::real(std::sin(v));
      case Fn::Cos: return Expr::real(std::cos(v));
      case Fn::Exp: return Expr::real(std::exp(v));
      case Fn::Ln:
        if (v > 0) return Expr::real(std::log(v));
        break;
    }
  }
  return fn_node(f, x);
}

}  // namespace

Expr simplify(const Expr& e) {
  const Node& n = e.node();
  switch (n.op) {
    case Op::Const:
    case Op::Sym:
      return e;
    case Op::Add: {
      std::vector<Expr> xs;
      xs.reserve(n.args.size());
      for (const auto& a : n.args) xs.push_back(simplify(a));
      return c_add(xs);
    }
    case Op::Mul: {
      std::vector<Expr> xs;
      xs.reserve(n.args.size());
      for (const auto& a : n.args) xs.push_back(simplify(a));
      return c_mul(xs);
    }
    case Op::Pow:
      return c_pow(simplify(n.args[0]), n.expo);
    case Op::Neg:
      return c_mul({Expr(-1), simplify(n.args[0])});
    case Op::Fn:
      return c_fn(n.fn, simplify(n.args[0]));
  }
  return e;
}

Expr operator+(const Expr& a, const Expr& b) { return c_add({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return c_add({a, c_mul({Expr(-1), b})}); }
Expr operator*(const Expr& a, const Expr& b) { return c_mul({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return c_mul({a, c_pow(b, Num(-1))}); }
Expr operator-(const Expr& a) { return c_mul({Expr(-1), a}); }

Expr sin(const Expr& x) { return c_fn(Fn::Sin, x); }
Expr cos(const Expr& x) { return c_fn(Fn::Cos, x); }
Expr exp(const Expr& x) { return c_fn(Fn::Exp, x); }
Expr ln(const Expr& x) { return c_fn(Fn::Ln, x); }
Expr sqrt(const Expr& x) { return c_pow(x, Num::rational(1, 2)); }

namespace detail {
Expr canonical_pow(const Expr& b, const Num& e) { return c_pow(b, e); }
Expr canonical_add(const std::vector<Expr>& xs) { return c_add(xs); }
Expr canonical_mul(const std::vector<Expr>& xs) { return c_mul(xs); }
void throw_domain(const char* what) { throw DomainError(what); }
}  // namespace detail

}  // namespace hjm
