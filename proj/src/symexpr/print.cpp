#include "hjm/symexpr.hpp"

namespace hjm {

namespace {

// precedence levels for parenthesisation
constexpr int kAdd = 1;
constexpr int kMul = 2;
constexpr int kUnary = 3;
constexpr int kPow = 4;
constexpr int kAtom = 5;

struct Out {
  std::string text;
  int prec;
};

Out print(const Expr& e);

std::string wrap(const Out& o, int need) { return o.prec < need ? "(" + o.text + ")" : o.text; }

Out print_const(const Num& c) {
  std::string s = c.str();
  if (c.negative()) return {s, kUnary};
  if (c.exact() && c.den() != 1) return {s, kMul};
  return {s, kAtom};
}

const char* fn_name(Fn f) {
  switch (f) {
    case Fn::Sin: return "sin";
    case Fn::Cos: return "cos";
    case Fn::Exp: return "exp";
    case Fn::Ln: return "ln";
  }
  return "?";
}

Out print_pow(const Expr& base, const Num& e) {
  if (e.exact() && e.num() == 1 && e.den() == 2) return {"sqrt(" + print(base).text + ")", kAtom};
  std::string b = wrap(print(base), kAtom);
  std::string ex;
  if (e.is_integer() && !e.negative()) {
    ex = e.str();
  } else {
    ex = "(" + e.str() + ")";
  }
  return {b + "^" + ex, kPow};
}

// Splits a product into numerator text and denominator text (negative exponents).
Out print_mul(const std::vector<Expr>& args) {
  Num coef(1);
  std::vector<std::string> num, den;
  bool den_is_product = false;
  for (const auto& f : args) {
    const Node& n = f.node();
    if (n.op == Op::Const) {
      coef = coef * n.c;
      continue;
    }
    if (n.op == Op::Pow && n.expo.negative()) {
      Num pe = -n.expo;
      Out o = pe.is_one() ? print(n.args[0]) : print_pow(n.args[0], pe);
      den.push_back(wrap(o, kPow));
      continue;
    }
    num.push_back(wrap(print(f), kPow));
  }
  bool neg = coef.negative();
  Num mag = coef.abs();
  std::string top;
  std::string bottom_coef;
  if (mag.exact()) {
    if (mag.num() != 1 || num.empty()) top = std::to_string(mag.num());
    if (mag.den() != 1) bottom_coef = std::to_string(mag.den());
  } else if (!mag.is_one()) {
    top = mag.str();
  }
  for (const auto& s : num) top += (top.empty() ? "" : "*") + s;
  if (top.empty()) top = "1";
  std::vector<std::string> bottom;
  if (!bottom_coef.empty()) bottom.push_back(bottom_coef);
  bottom.insert(bottom.end(), den.begin(), den.end());
  den_is_product = bottom.size() > 1;
  std::string text = top;
  if (!bottom.empty()) {
    std::string b;
    for (const auto& s : bottom) b += (b.empty() ? "" : "*") + s;
    text += "/" + (den_is_product ? "(" + b + ")" : b);
  }
  if (neg) return {"-" + text, kUnary};
  return {text, kMul};
}

Out print(const Expr& e) {
  const Node& n = e.node();
  switch (n.op) {
    case Op::Const:
      return print_const(n.c);
    case Op::Sym:
      return {n.sym.str(), kAtom};
    case Op::Pow:
      if (n.expo.negative()) return print_mul({e});
      return print_pow(n.args[0], n.expo);
    case Op::Neg:
      return {"-" + wrap(print(n.args[0]), kPow), kUnary};
    case Op::Fn:
      return {std::string(fn_name(n.fn)) + "(" + print(n.args[0]).text + ")", kAtom};
    case Op::Mul:
      return print_mul(n.args);
    case Op::Add: {
      std::string s;
      bool first = true;
      for (const auto& t : n.args) {
        Out o = print(t);
        if (first) {
          s = o.prec == kAdd ? "(" + o.text + ")" : o.text;
          first = false;
          continue;
        }
        if (o.prec == kUnary && !o.text.empty() && o.text[0] == '-') {
          std::string rest = o.text.substr(1);
          s += " - " + rest;
        } else {
          s += " + " + (o.prec == kAdd ? "(" + o.text + ")" : o.text);
        }
      }
      return {s, kAdd};
    }
  }
  return {"?", kAtom};
}

}  // namespace

std::string render(const Expr& e) { return print(e).text; }

}  // namespace hjm
