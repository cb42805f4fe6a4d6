#include <climits>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "hjm/symexpr.hpp"

namespace hjm {

namespace {

bool mul_ovf(long long a, long long b, long long* out) { return __builtin_mul_overflow(a, b, out); }
bool add_ovf(long long a, long long b, long long* out) { return __builtin_add_overflow(a, b, out); }

}  // namespace

Num Num::rational(long long p, long long q) {
  if (q == 0) throw DomainError("zero denominator");
  if (q < 0) {
    if (p == LLONG_MIN || q == LLONG_MIN) return real(static_cast<double>(p) / static_cast<double>(q));
    p = -p;
    q = -q;
  }
  long long g = std::gcd(p < 0 ? -p : p, q);
  Num r;
  r.p_ = g ? p / g : 0;
  r.q_ = g ? q / g : 1;
  return r;
}

Num Num::real(double v) {
  Num r;
  r.exact_ = false;
  r.f_ = v;
  return r;
}

Num Num::operator-() const {
  if (!exact_) return real(-f_);
  if (p_ == LLONG_MIN) return real(-value());
  Num r = *this;
  r.p_ = -p_;
  return r;
}

Num operator+(const Num& a, const Num& b) {
  if (a.exact_ && b.exact_) {
    long long x, y, d, s;
    if (!mul_ovf(a.p_, b.q_, &x) && !mul_ovf(b.p_, a.q_, &y) && !mul_ovf(a.q_, b.q_, &d) && !add_ovf(x, y, &s))
      return Num::rational(s, d);
  }
  return Num::real(a.value() + b.value());
}

Num operator*(const Num& a, const Num& b) {
  if (a.exact_ && b.exact_) {
    long long g1 = std::gcd(a.p_ < 0 ? -a.p_ : a.p_, b.q_);
    long long g2 = std::gcd(b.p_ < 0 ? -b.p_ : b.p_, a.q_);
    if (g1 == 0) g1 = 1;
    if (g2 == 0) g2 = 1;
    long long n, d;
    if (!mul_ovf(a.p_ / g1, b.p_ / g2, &n) && !mul_ovf(a.q_ / g2, b.q_ / g1, &d)) return Num::rational(n, d);
  }
  return Num::real(a.value() * b.value());
}

Num operator/(const Num& a, const Num& b) {
  if (b.is_zero()) throw DomainError("division by zero");
  if (b.exact_) {
    Num inv = b.p_ < 0 ? Num::rational(-b.q_, -b.p_) : Num::rational(b.q_, b.p_);
    return a * inv;
  }
  return Num::real(a.value() / b.value());
}

namespace {

std::optional<long long> exact_root(long long v, long long k) {
  if (v < 0) return std::nullopt;
  long long r = static_cast<long long>(std::llround(std::pow(static_cast<double>(v), 1.0 / static_cast<double>(k))));
  for (long long c = std::max(0LL, r - 1); c <= r + 1; ++c) {
    long long acc = 1;
    bool ovf = false;
    for (long long i = 0; i < k && !ovf; ++i) ovf = __builtin_mul_overflow(acc, c, &acc);
    if (!ovf && acc == v) return c;
  }
  return std::nullopt;
}

}  // namespace

std::optional<Num> Num::pow(const Num& base, const Num& e) {
  if (e.is_zero()) return Num(1);
  if (base.exact_ && e.is_integer()) {
    long long k = e.p_;
    if (k < 0 && base.is_zero()) return std::nullopt;
    Num b = k < 0 ? Num(1) / base : base;
    unsigned long long m = static_cast<unsigned long long>(k < 0 ? -k : k);
    Num r(1);
    while (m) {
      if (m & 1ULL) r = r * b;
      m >>= 1ULL;
      if (m) b = b * b;
    }
    return r;
  }
  if (base.exact_ && e.exact_ && e.q_ <= 16) {
    // perfect roots stay exact: (p/q)^(a/b) with p, q perfect b-th powers
    if (base.p_ >= 0) {
      auto rp = exact_root(base.p_, e.q_);
      auto rq = exact_root(base.q_, e.q_);
      if (rp && rq) return Num::pow(Num::rational(*rp, *rq), Num(e.p_));
    }
  }
  double b = base.value();
  if (b < 0 && !(e.exact_ && e.q_ == 1)) return std::nullopt;
  if (b == 0 && e.negative()) return std::nullopt;
  return Num::real(std::pow(b, e.value()));
}

int compare(const Num& a, const Num& b) {
  if (a.exact_ && b.exact_) {
    if (a.p_ == b.p_ && a.q_ == b.q_) return 0;
    __int128 l = static_cast<__int128>(a.p_) * b.q_;
    __int128 r = static_cast<__int128>(b.p_) * a.q_;
    return l < r ? -1 : 1;
  }
  // exact and inexact values of the same magnitude are still distinct coefficients
  if (a.exact_ != b.exact_) {
    double x = a.value(), y = b.value();
    if (x != y) return x < y ? -1 : 1;
    return a.exact_ ? -1 : 1;
  }
  if (a.f_ == b.f_) return 0;
  return a.f_ < b.f_ ? -1 : 1;
}

std::string Num::str() const {
  if (exact_) {
    if (q_ == 1) return std::to_string(p_);
    return std::to_string(p_) + "/" + std::to_string(q_);
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", f_);
  return std::string(buf);
}

}  // namespace hjm
