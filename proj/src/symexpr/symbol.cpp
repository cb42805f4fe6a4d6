#include <cctype>
#include <tuple>

#include "hjm/symexpr.hpp"

namespace hjm {

namespace {

const char* prefix(SymKind k) {
  switch (k) {
    case SymKind::Q: return "q";
    case SymKind::P: return "p";
    case SymKind::A: return "a";
    case SymKind::M: return "m";
    case SymKind::PQ: return "pq";
    case SymKind::PA: return "pa";
    case SymKind::PM: return "pm";
    case SymKind::DOTQ: return "dq";
    case SymKind::DOTP: return "dp";
    case SymKind::LAMBDA: return "lam";
    case SymKind::PARAM: return "";
  }
  return "";
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

int to_int(std::string_view s, std::string_view whole) {
  if (s.size() > 9) throw UnknownIdentifierError(std::string(whole));
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

bool reserved(std::string_view s) {
  return s == "sin" || s == "cos" || s == "exp" || s == "ln" || s == "sqrt" || s == "log";
}

}  // namespace

Symbol Symbol::param(std::string n) {
  Symbol s;
  s.kind = SymKind::PARAM;
  s.name = std::move(n);
  return s;
}

bool Symbol::is_jet() const {
  switch (kind) {
    case SymKind::Q:
    case SymKind::P:
    case SymKind::A:
    case SymKind::M:
    case SymKind::DOTQ:
    case SymKind::DOTP:
      return true;
    default:
      return false;
  }
}

Symbol Symbol::shifted(int by) const {
  Symbol s = *this;
  s.level += by;
  return s;
}

std::string Symbol::str() const {
  switch (kind) {
    case SymKind::PARAM: return name;
    case SymKind::PQ:
    case SymKind::PA:
    case SymKind::PM:
    case SymKind::LAMBDA:
      return std::string(prefix(kind)) + std::to_string(component);
    default:
      return std::string(prefix(kind)) + std::to_string(component) + "_" + std::to_string(level);
  }
}

bool operator<(const Symbol& x, const Symbol& y) {
  return std::tie(x.kind, x.component, x.level, x.name) < std::tie(y.kind, y.component, y.level, y.name);
}

Symbol parse_symbol(std::string_view t) {
  if (t.empty()) throw UnknownIdentifierError("");
  if (reserved(t)) throw UnknownIdentifierError(std::string(t));
  auto us = t.find('_');
  if (us != std::string_view::npos) {
    std::string_view head = t.substr(0, us), lvl = t.substr(us + 1);
    static const std::pair<const char*, SymKind> jets[] = {{"dq", SymKind::DOTQ}, {"dp", SymKind::DOTP},
                                                            {"q", SymKind::Q},     {"p", SymKind::P},
                                                            {"a", SymKind::A},     {"m", SymKind::M}};
    for (auto [pre, kind] : jets) {
      std::string_view ps(pre);
      if (head.size() > ps.size() && head.substr(0, ps.size()) == ps && all_digits(head.substr(ps.size()))) {
        if (!all_digits(lvl)) throw UnknownIdentifierError(std::string(t));
        int comp = to_int(head.substr(ps.size()), t);
        if (comp < 1) throw UnknownIdentifierError(std::string(t));
        return Symbol{kind, comp, to_int(lvl, t), {}};
      }
    }
  } else {
    static const std::pair<const char*, SymKind> flat[] = {
        {"pq", SymKind::PQ}, {"pa", SymKind::PA}, {"pm", SymKind::PM}, {"lam", SymKind::LAMBDA}};
    for (auto [pre, kind] : flat) {
      std::string_view ps(pre);
      if (t.size() > ps.size() && t.substr(0, ps.size()) == ps && all_digits(t.substr(ps.size()))) {
        int comp = to_int(t.substr(ps.size()), t);
        if (comp < 1 && kind != SymKind::LAMBDA) throw UnknownIdentifierError(std::string(t));
        return Symbol{kind, comp, 0, {}};
      }
    }
  }
  return Symbol::param(std::string(t));
}

double lookup(const Binding& b, const Symbol& s) {
  auto it = b.find(s);
  if (it == b.end()) throw UnboundSymbolError(s.str());
  return it->second;
}

}  // namespace hjm
