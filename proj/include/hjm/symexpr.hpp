#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hjm/errors.hpp"

namespace hjm {

// ---------------------------------------------------------------------------
// Symbols

enum class SymKind : std::uint8_t { PARAM, LAMBDA, P, PQ, PA, PM, DOTP, Q, A, M, DOTQ };

/// Jet-coordinate symbol. Parameters carry a name; everything else is (kind, component, level).
struct Symbol {
  SymKind kind = SymKind::PARAM;
  int component = 0;
  int level = 0;
  std::string name;  // PARAM only

  static Symbol param(std::string n);
  static Symbol q(int comp, int lvl) { return {SymKind::Q, comp, lvl, {}}; }
  static Symbol p(int comp, int lvl) { return {SymKind::P, comp, lvl, {}}; }
  static Symbol a(int comp, int lvl) { return {SymKind::A, comp, lvl, {}}; }
  static Symbol m(int comp, int lvl) { return {SymKind::M, comp, lvl, {}}; }
  static Symbol pq(int comp) { return {SymKind::PQ, comp, 0, {}}; }
  static Symbol pa(int comp) { return {SymKind::PA, comp, 0, {}}; }
  static Symbol pm(int comp) { return {SymKind::PM, comp, 0, {}}; }
  static Symbol dq(int comp, int lvl) { return {SymKind::DOTQ, comp, lvl, {}}; }
  static Symbol dp(int comp, int lvl) { return {SymKind::DOTP, comp, lvl, {}}; }
  static Symbol lam(int j) { return {SymKind::LAMBDA, j, 0, {}}; }

  /// Kinds that carry a derivative level and shift under d/dt.
  bool is_jet() const;
  Symbol shifted(int by = 1) const;
  std::string str() const;

  friend bool operator==(const Symbol& x, const Symbol& y) {
    return x.kind == y.kind && x.component == y.component && x.level == y.level && x.name == y.name;
  }
  friend bool operator!=(const Symbol& x, const Symbol& y) { return !(x == y); }
  friend bool operator<(const Symbol& x, const Symbol& y);
};

/// Parses a canonical symbol name; any identifier outside the jet grammar is a parameter.
/// Throws UnknownIdentifierError for malformed jet names (e.g. component 0) and reserved words.
Symbol parse_symbol(std::string_view text);

using Binding = std::map<Symbol, double>;
using SymbolSet = std::set<Symbol>;

double lookup(const Binding& b, const Symbol& s);

// ---------------------------------------------------------------------------
// Coefficients: exact rationals with a double fallback on overflow or transcendental input.

class Num {
 public:
  Num() = default;
  Num(long long v) : p_(v) {}  // NOLINT(google-explicit-constructor)
  static Num rational(long long p, long long q);
  static Num real(double v);

  bool exact() const { return exact_; }
  long long num() const { return p_; }
  long long den() const { return q_; }
  double value() const { return exact_ ? static_cast<double>(p_) / static_cast<double>(q_) : f_; }

  bool is_zero() const { return exact_ ? p_ == 0 : f_ == 0.0; }
  bool is_one() const { return exact_ && p_ == 1 && q_ == 1; }
  bool is_minus_one() const { return exact_ && p_ == -1 && q_ == 1; }
  bool is_integer() const { return exact_ && q_ == 1; }
  bool negative() const { return exact_ ? p_ < 0 : f_ < 0.0; }

  Num operator-() const;
  friend Num operator+(const Num& a, const Num& b);
  friend Num operator-(const Num& a, const Num& b) { return a + (-b); }
  friend Num operator*(const Num& a, const Num& b);
  friend Num operator/(const Num& a, const Num& b);
  Num abs() const { return negative() ? -*this : *this; }
  /// Exact when base is exact and the exponent is an integer (or a perfect root); nullopt if undefined.
  static std::optional<Num> pow(const Num& base, const Num& e);

  friend int compare(const Num& a, const Num& b);
  friend bool operator==(const Num& a, const Num& b) { return compare(a, b) == 0; }
  friend bool operator!=(const Num& a, const Num& b) { return compare(a, b) != 0; }
  friend bool operator<(const Num& a, const Num& b) { return compare(a, b) < 0; }

  std::string str() const;

 private:
  bool exact_ = true;
  long long p_ = 0;
  long long q_ = 1;
  double f_ = 0.0;
};

// ---------------------------------------------------------------------------
// Expression tree

enum class Op : std::uint8_t { Const, Sym, Add, Mul, Pow, Neg, Fn };
enum class Fn : std::uint8_t { Sin, Cos, Exp, Ln };

struct Node;

/// Immutable, shared expression handle. Construction helpers keep raw structure;
/// simplify() produces the canonical form.
class Expr {
 public:
  Expr();  // constant 0
  Expr(long long v);  // NOLINT(google-explicit-constructor)
  Expr(const Num& c);  // NOLINT(google-explicit-constructor)
  Expr(const Symbol& s);  // NOLINT(google-explicit-constructor)
  explicit Expr(std::shared_ptr<const Node> n) : n_(std::move(n)) {}

  static Expr real(double v) { return Expr(Num::real(v)); }
  static Expr add(std::vector<Expr> xs);
  static Expr mul(std::vector<Expr> xs);
  static Expr pow(Expr base, Num e);
  static Expr neg(Expr x);
  static Expr fn(Fn f, Expr x);

  const Node& node() const { return *n_; }
  Op op() const;
  bool is_const() const { return op() == Op::Const; }
  bool is_zero() const;
  std::optional<Num> const_value() const;
  std::size_t hash() const;

  std::string str() const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);

 private:
  std::shared_ptr<const Node> n_;
};

struct Node {
  Op op = Op::Const;
  Num c;                  // Const
  Symbol sym;             // Sym
  std::vector<Expr> args; // Add, Mul: terms/factors; Pow, Neg, Fn: args[0]
  Num expo;               // Pow
  Fn fn = Fn::Sin;        // Fn
  std::size_t h = 0;
};

/// Total structural order used for canonical sorting.
int compare(const Expr& a, const Expr& b);
inline bool same(const Expr& a, const Expr& b) { return a.hash() == b.hash() && compare(a, b) == 0; }
struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

Expr sin(const Expr& x);
Expr cos(const Expr& x);
Expr exp(const Expr& x);
Expr ln(const Expr& x);
Expr sqrt(const Expr& x);

// ---------------------------------------------------------------------------
// Operations

/// Pratt parser. Precedence: ^ (right assoc) > unary minus > * / > + -.
Expr parse(std::string_view text);
std::string render(const Expr& e);

SymbolSet free_symbols(const Expr& e);
bool depends_on(const Expr& e, const Symbol& s);
bool depends_on_any(const Expr& e, const SymbolSet& ss);

Expr simplify(const Expr& e);
Expr diff(const Expr& e, const Symbol& s);
Expr substitute(const Expr& e, const std::map<Symbol, Expr>& subs);
Expr substitute(const Expr& e, const Symbol& s, const Expr& by);

inline constexpr int kDefaultMaxOrder = 64;
/// Chain-rule total derivative: sum over jet symbols of d e/d s * shift(s).
Expr total_time_derivative(const Expr& e, int max_order = kDefaultMaxOrder);
Expr total_time_derivative_n(const Expr& e, int times, int max_order = kDefaultMaxOrder);

double eval(const Expr& e, const Binding& b);

template <class T, class Lookup>
T eval_as(const Expr& e, const Lookup& look);

/// Random-sample identity test on [-2, 2]; rejects samples outside function domains.
bool equal_numeric(const Expr& e1, const Expr& e2, int trials, double tol, std::uint64_t seed = 0x5eedULL);

/// Largest |e1 - e2| / (1 + |e1|) seen over the accepted samples.
double max_relative_gap(const Expr& e1, const Expr& e2, int trials, std::uint64_t seed = 0x5eedULL);

/// Replace every PARAM symbol that has a value in `params` by that constant.
Expr bind_params(const Expr& e, const std::map<std::string, double>& params);

// ---------------------------------------------------------------------------
// Templated evaluator (double and long double in tests/oracles).

namespace detail {
[[noreturn]] void throw_domain(const char* what);
}

template <class T, class Lookup>
T eval_as(const Expr& e, const Lookup& look) {
  const Node& n = e.node();
  switch (n.op) {
    case Op::Const:
      if (n.c.exact()) return static_cast<T>(n.c.num()) / static_cast<T>(n.c.den());
      return static_cast<T>(n.c.value());
    case Op::Sym:
      return look(n.sym);
    case Op::Add: {
      T s = 0;
      for (const auto& x : n.args) s += eval_as<T>(x, look);
      return s;
    }
    case Op::Mul: {
      T s = 1;
      for (const auto& x : n.args) s *= eval_as<T>(x, look);
      return s;
    }
    case Op::Neg:
      return -eval_as<T>(n.args[0], look);
    case Op::Pow: {
      T b = eval_as<T>(n.args[0], look);
      if (n.expo.is_integer()) {
        long long k = n.expo.num();
        if (k < 0 && b == 0) detail::throw_domain("division by zero");
        T r = 1;
        T base = k < 0 ? T(1) / b : b;
        unsigned long long m = static_cast<unsigned long long>(k < 0 ? -k : k);
        while (m) {
          if (m & 1ULL) r *= base;
          base *= base;
          m >>= 1ULL;
        }
        return r;
      }
      if (b < 0) detail::throw_domain("fractional power of negative value");
      if (b == 0 && n.expo.negative()) detail::throw_domain("division by zero");
      if (n.expo.exact() && n.expo.den() == 2) {
        using std::sqrt;
        T r = sqrt(b);
        long long k = n.expo.num();
        T out = 1;
        for (long long i = 0; i < (k < 0 ? -k : k); ++i) out *= r;
        return k < 0 ? T(1) / out : out;
      }
      using std::pow;
      return pow(b, static_cast<T>(n.expo.value()));
    }
    case Op::Fn: {
      T x = eval_as<T>(n.args[0], look);
      using std::cos;
      using std::exp;
      using std::log;
      using std::sin;
      switch (n.fn) {
        case Fn::Sin: return sin(x);
        case Fn::Cos: return cos(x);
        case Fn::Exp: return exp(x);
        case Fn::Ln:
          if (!(x > 0)) detail::throw_domain("log of non-positive value");
          return log(x);
      }
    }
  }
  return T(0);
}

}  // namespace hjm
