#include <cctype>
#include <cstdlib>

#include "hjm/symexpr.hpp"

namespace hjm {

namespace {

enum class Tok { Num, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok kind;
  std::size_t pos;
  std::string_view text;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return cur_; }
  Token next() {
    Token t = cur_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    std::size_t start = pos_;
    if (pos_ >= src_.size()) {
      cur_ = {Tok::End, pos_, {}};
      return;
    }
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && pos_ + 1 < src_.size() &&
                                                        std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      if (pos_ < src_.size() && src_[pos_] == '.') {
        ++pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      }
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        std::size_t save = pos_++;
        if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
        if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        } else {
          pos_ = save;
        }
      }
      cur_ = {Tok::Num, start, src_.substr(start, pos_ - start)};
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      cur_ = {Tok::Ident, start, src_.substr(start, pos_ - start)};
      return;
    }
    ++pos_;
    switch (c) {
      case '+': cur_ = {Tok::Plus, start, src_.substr(start, 1)}; return;
      case '-': cur_ = {Tok::Minus, start, src_.substr(start, 1)}; return;
      case '*': cur_ = {Tok::Star, start, src_.substr(start, 1)}; return;
      case '/': cur_ = {Tok::Slash, start, src_.substr(start, 1)}; return;
      case '^': cur_ = {Tok::Caret, start, src_.substr(start, 1)}; return;
      case '(': cur_ = {Tok::LParen, start, src_.substr(start, 1)}; return;
      case ')': cur_ = {Tok::RParen, start, src_.substr(start, 1)}; return;
      default: throw ParseError(start, std::string("unexpected character '") + c + "'");
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Token cur_{Tok::End, 0, {}};
};

/// Decimal literal as an exact rational when it fits, else a double.
Num literal(std::string_view t, std::size_t pos) {
  std::string s(t);
  long long mant = 0;
  int scale = 0;
  bool ok = true;
  std::size_t i = 0;
  bool frac = false;
  for (; i < s.size() && s[i] != 'e' && s[i] != 'E'; ++i) {
    if (s[i] == '.') {
      frac = true;
      continue;
    }
    if (__builtin_mul_overflow(mant, 10LL, &mant) || __builtin_add_overflow(mant, s[i] - '0', &mant)) ok = false;
    if (frac) --scale;
  }
  if (i < s.size()) scale += std::atoi(s.c_str() + i + 1);
  if (ok && scale >= -18 && scale <= 18) {
    long long p10 = 1;
    for (int k = 0; k < (scale < 0 ? -scale : scale); ++k) p10 *= 10;
    if (scale < 0) return Num::rational(mant, p10);
    long long v;
    if (!__builtin_mul_overflow(mant, p10, &v)) return Num(v);
  }
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) throw ParseError(pos, "bad number '" + s + "'");
  return Num::real(v);
}

bool is_fn(std::string_view s, Fn* f, bool* root) {
  *root = false;
  if (s == "sin") *f = Fn::Sin;
  else if (s == "cos") *f = Fn::Cos;
  else if (s == "exp") *f = Fn::Exp;
  else if (s == "ln") *f = Fn::Ln;
  else if (s == "sqrt") *root = true;
  else return false;
  return true;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) {}

  Expr run() {
    Expr e = expr(0);
    if (lex_.peek().kind != Tok::End) throw ParseError(lex_.peek().pos, "unexpected trailing input");
    return e;
  }

 private:
  static int infix_bp(Tok t) {
    switch (t) {
      case Tok::Plus:
      case Tok::Minus: return 10;
      case Tok::Star:
      case Tok::Slash: return 20;
      case Tok::Caret: return 40;
      default: return -1;
    }
  }

  Expr expr(int min_bp) {
    Expr lhs = prefix();
    for (;;) {
      Tok t = lex_.peek().kind;
      int bp = infix_bp(t);
      if (bp < 0 || bp <= min_bp) break;
      Token op = lex_.next();
      if (t == Tok::Caret) {
        Expr rhs = expr(bp - 1);
        lhs = power(lhs, rhs);
        continue;
      }
      Expr rhs = expr(bp);
      switch (op.kind) {
        case Tok::Plus: lhs = Expr::add({lhs, rhs}); break;
        case Tok::Minus: lhs = Expr::add({lhs, Expr::neg(rhs)}); break;
        case Tok::Star: lhs = Expr::mul({lhs, rhs}); break;
        case Tok::Slash:
          if (auto c = rhs.const_value()) {
            if (c->is_zero()) throw ParseError(op.pos, "division by zero");
            lhs = Expr::mul({lhs, Expr(Num(1) / *c)});
          } else {
            lhs = Expr::mul({lhs, Expr::pow(rhs, Num(-1))});
          }
          break;
        default: break;
      }
    }
    return lhs;
  }

  static Expr power(const Expr& base, const Expr& e) {
    Expr es = simplify(e);
    if (auto c = es.const_value()) return Expr::pow(base, *c);
    return exp(simplify(Expr::mul({es, ln(simplify(base))})));
  }

  Expr prefix() {
    Token t = lex_.next();
    switch (t.kind) {
      case Tok::Num:
        return Expr(literal(t.text, t.pos));
      case Tok::Minus: {
        Expr x = expr(30);
        if (auto c = x.const_value(); c && x.node().op == Op::Const) return Expr(-*c);
        return Expr::neg(x);
      }
      case Tok::Plus:
        return expr(30);
      case Tok::LParen: {
        Expr x = expr(0);
        if (lex_.peek().kind != Tok::RParen) throw ParseError(lex_.peek().pos, "expected ')'");
        lex_.next();
        return x;
      }
      case Tok::Ident: {
        Fn f;
        bool root;
        if (is_fn(t.text, &f, &root)) {
          if (lex_.peek().kind != Tok::LParen) throw UnknownIdentifierError(std::string(t.text));
          lex_.next();
          Expr x = expr(0);
          if (lex_.peek().kind != Tok::RParen) throw ParseError(lex_.peek().pos, "expected ')'");
          lex_.next();
          return root ? Expr::pow(x, Num::rational(1, 2)) : Expr::fn(f, x);
        }
        if (lex_.peek().kind == Tok::LParen) throw UnknownIdentifierError(std::string(t.text));
        return Expr(parse_symbol(t.text));
      }
      case Tok::End:
        throw ParseError(t.pos, "unexpected end of input");
      default:
        throw ParseError(t.pos, "unexpected token '" + std::string(t.text) + "'");
    }
  }

  Lexer lex_;
};

}  // namespace

Expr parse(std::string_view text) { return Parser(text).run(); }

}  // namespace hjm
