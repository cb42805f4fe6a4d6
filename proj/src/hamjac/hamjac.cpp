#include "hjm/hamjac.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>

#include "hjm/linsolve.hpp"
#include "hjm/ostro.hpp"

namespace hjm {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

bool finite_eval(const Expr& e, const Binding& b, double& out) {
  try {
    out = eval(e, b);
  } catch (const DomainError&) {
    return false;
  }
  return std::isfinite(out);
}

std::size_t index_of(const std::vector<Symbol>& v, const Symbol& s) {
  return static_cast<std::size_t>(std::find(v.begin(), v.end(), s) - v.begin());
}

void require_same_chart(const ChartSpec& a, const ChartSpec& b) {
  if (a.space != b.space || a.dim != b.dim || a.order != b.order)
    throw ChartMismatchError("one-form lives on " + space_name(b.space) + ", system on " + space_name(a.space));
}

}  // namespace

void ResidualReport::finish() {
  sup_norm = 0.0;
  for (auto& r : residuals) {
    r.sup = 0.0;
    for (double v : r.values) r.sup = std::max(r.sup, std::isfinite(v) ? std::abs(v) : INFINITY);
    sup_norm = std::max(sup_norm, r.sup);
  }
  pass = sup_norm <= tolerance;
}

nlohmann::json ResidualReport::to_json() const {
  nlohmann::json j;
  j["system"] = system;
  j["samples"] = samples;
  j["sup_norm"] = sup_norm;
  j["tolerance"] = tolerance;
  j["pass"] = pass;
  auto& rs = j["residuals"] = nlohmann::json::array();
  for (const auto& r : residuals)
    rs.push_back({{"label", r.label}, {"expr", render(r.expr)}, {"sup", r.sup}, {"values", r.values}});
  j["metrics"] = nlohmann::json::object();
  for (const auto& [k, v] : metrics) j["metrics"][k] = v;
  j["notes"] = notes;
  return j;
}

std::string ResidualReport::to_text() const {
  std::ostringstream os;
  os << "system: " << system << '\n';
  for (const auto& r : residuals) os << "  " << r.label << ": " << render(r.expr) << "  sup " << fmt(r.sup) << '\n';
  for (const auto& [k, v] : metrics) os << "  " << k << " = " << fmt(v) << '\n';
  for (const auto& n : notes) os << "  note: " << n << '\n';
  os << "sup-norm " << fmt(sup_norm) << " over " << samples << " samples, tol " << fmt(tolerance) << ": "
     << (pass ? "PASS" : "FAIL") << '\n';
  return os.str();
}

std::vector<Binding> sample_points(const SymbolSet& vars, const SampleOptions& opt) {
  if (opt.points < 1) throw PreconditionError("sample count must be positive");
  std::mt19937_64 rng(opt.seed);
  std::vector<Symbol> free;
  for (const auto& s : vars)
    if (!opt.fixed.count(s)) free.push_back(s);
  std::vector<std::uniform_real_distribution<double>> dist;
  for (const auto& s : free) {
    auto it = opt.box.find(s);
    dist.emplace_back(it == opt.box.end() ? opt.lo : it->second.first,
                      it == opt.box.end() ? opt.hi : it->second.second);
  }
  std::vector<Binding> out;
  const long long budget = 1000LL * opt.points;
  for (long long attempt = 0; attempt < budget && static_cast<int>(out.size()) < opt.points; ++attempt) {
    Binding b = opt.fixed;
    for (std::size_t i = 0; i < free.size(); ++i) b[free[i]] = dist[i](rng);
    bool ok = true;
    for (const auto& d : opt.domain) {
      double v;
      if (!finite_eval(d, b, v) || v < 0) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(std::move(b));
  }
  if (out.empty()) throw DomainExhaustedError("sample box misses the domain predicates");
  return out;
}

ResidualReport sample_residuals(const std::string& system, const std::vector<std::string>& labels,
                                const std::vector<Expr>& exprs, const SampleOptions& opt,
                                std::vector<Binding>* kept_points) {
  ResidualReport rep;
  rep.system = system;
  rep.tolerance = opt.tol;
  SymbolSet vars;
  for (std::size_t i = 0; i < exprs.size(); ++i) {
    rep.residuals.push_back({labels[i], simplify(exprs[i]), {}, 0.0});
    for (const auto& s : free_symbols(rep.residuals.back().expr)) vars.insert(s);
  }
  SampleOptions o = opt;
  for (const auto& d : o.domain)
    for (const auto& s : free_symbols(d)) vars.insert(s);
  o.points = opt.points * 4;
  int kept = 0;
  for (const auto& b : sample_points(vars, o)) {
    if (kept == opt.points) break;
    std::vector<double> row;
    bool ok = true;
    for (const auto& r : rep.residuals) {
      double v;
      if (!finite_eval(r.expr, b, v)) {
        ok = false;
        break;
      }
      row.push_back(v);
    }
    if (!ok) continue;
    for (std::size_t i = 0; i < row.size(); ++i) rep.residuals[i].values.push_back(row[i]);
    if (kept_points) kept_points->push_back(b);
    ++kept;
  }
  if (kept == 0 && !exprs.empty()) throw DomainExhaustedError("no sample inside the residual domains");
  rep.samples = kept;
  rep.finish();
  return rep;
}

ResidualReport morse_rank_check(const MorseFamily& mf, const std::vector<Binding>& points) {
  const Expr E = mf.augmented();
  const auto lam = mf.all_fibers();
  std::vector<Symbol> cols = mf.base.roster;
  cols.insert(cols.end(), lam.begin(), lam.end());
  std::vector<std::vector<Expr>> M;
  for (const auto& l : lam) {
    Expr d = diff(E, l);
    std::vector<Expr> row;
    for (const auto& c : cols) row.push_back(diff(d, c));
    M.push_back(std::move(row));
  }
  ResidualReport rep;
  rep.system = "morse-rank";
  rep.tolerance = 0.0;
  Residual deficit{"rank deficit", Expr(0), {}, 0.0};
  int lowest = static_cast<int>(lam.size());
  for (const auto& b : points) {
    std::vector<std::vector<double>> A(lam.size(), std::vector<double>(cols.size()));
    for (std::size_t i = 0; i < lam.size(); ++i)
      for (std::size_t j = 0; j < cols.size(); ++j) A[i][j] = eval(M[i][j], b);
    int r = lam.empty() ? 0 : numeric_rank(A);
    lowest = std::min(lowest, r);
    deficit.values.push_back(static_cast<double>(static_cast<int>(lam.size()) - r));
  }
  rep.residuals.push_back(std::move(deficit));
  rep.samples = static_cast<int>(points.size());
  rep.metrics["fibers"] = static_cast<double>(lam.size());
  rep.metrics["min_rank"] = static_cast<double>(lowest);
  rep.finish();
  if (lam.empty() && (E.is_zero())) {
    rep.pass = false;
    rep.notes.push_back("zero energy without fibers generates nothing");
  }
  return rep;
}

std::vector<Binding> morse_sample_points(const MorseFamily& mf, int count, std::uint64_t seed, const Binding& fixed) {
  SymbolSet vars(mf.base.roster.begin(), mf.base.roster.end());
  for (const auto& s : mf.all_fibers()) vars.insert(s);
  for (const auto& s : free_symbols(mf.augmented()))
    if (s.kind == SymKind::PARAM) vars.insert(s);
  SampleOptions o;
  o.points = count;
  o.lo = -2.0;
  o.hi = 2.0;
  o.seed = seed;
  o.fixed = fixed;
  return sample_points(vars, o);
}

HJSystem hj_system(const MorseFamily& mf, const ClosedOneForm& gamma) {
  require_same_chart(mf.base, gamma.base);
  HJSystem s;
  const Expr Eg = simplify(substitute(mf.augmented(), gamma.substitution()));
  for (const auto& x : gamma.coords) {
    s.labels.push_back("d/d" + x.str());
    s.base_equations.push_back(simplify(diff(Eg, x)));
  }
  s.fibers = mf.all_fibers();
  for (const auto& l : s.fibers) {
    s.labels.push_back("d/d" + l.str());
    s.fiber_equations.push_back(simplify(diff(Eg, l)));
  }
  return s;
}

namespace {

/// Minimum-norm Gauss-Newton on the fiber equations; returns the fiber values.
void solve_fibers(const HJSystem& s, const std::vector<std::vector<Expr>>& J, Binding& b) {
  const auto m = static_cast<Eigen::Index>(s.fiber_equations.size());
  const auto r = static_cast<Eigen::Index>(s.fibers.size());
  if (r == 0) return;
  Eigen::VectorXd lam = Eigen::VectorXd::Zero(r);
  for (Eigen::Index j = 0; j < r; ++j) b[s.fibers[static_cast<std::size_t>(j)]] = 0.0;
  Eigen::VectorXd c(m);
  Eigen::MatrixXd A(m, r);
  for (int it = 0; it < 50; ++it) {
    for (Eigen::Index i = 0; i < m; ++i) {
      c(i) = eval(s.fiber_equations[static_cast<std::size_t>(i)], b);
      for (Eigen::Index j = 0; j < r; ++j)
        A(i, j) = eval(J[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], b);
    }
    if (!c.allFinite() || !A.allFinite()) return;
    Eigen::VectorXd step = A.completeOrthogonalDecomposition().solve(-c);
    lam += step;
    for (Eigen::Index j = 0; j < r; ++j) b[s.fibers[static_cast<std::size_t>(j)]] = lam(j);
    if (step.cwiseAbs().maxCoeff() <= 1e-14 * (1.0 + lam.cwiseAbs().maxCoeff())) return;
  }
}

}  // namespace

ResidualReport hj_residual(const MorseFamily& mf, const ClosedOneForm& gamma, const SampleOptions& opt) {
  HJSystem s = hj_system(mf, gamma);
  std::vector<std::vector<Expr>> J;
  for (const auto& f : s.fiber_equations) {
    std::vector<Expr> row;
    for (const auto& l : s.fibers) row.push_back(diff(f, l));
    J.push_back(std::move(row));
  }
  std::vector<Expr> all = s.base_equations;
  all.insert(all.end(), s.fiber_equations.begin(), s.fiber_equations.end());

  ResidualReport rep;
  rep.system = "hj-" + space_name(mf.base.space);
  rep.tolerance = opt.tol;
  for (std::size_t i = 0; i < all.size(); ++i) rep.residuals.push_back({s.labels[i], all[i], {}, 0.0});

  SymbolSet vars;
  for (const auto& e : all)
    for (const auto& x : free_symbols(e)) vars.insert(x);
  for (const auto& d : opt.domain)
    for (const auto& x : free_symbols(d)) vars.insert(x);
  for (const auto& l : s.fibers) vars.erase(l);
  SampleOptions o = opt;
  o.points = opt.points * 4;
  int kept = 0;
  for (auto b : sample_points(vars, o)) {
    if (kept == opt.points) break;
    try {
      solve_fibers(s, J, b);
    } catch (const DomainError&) {
      continue;
    }
    std::vector<double> row;
    bool ok = true;
    for (const auto& e : all) {
      double v;
      if (!finite_eval(e, b, v)) {
        ok = false;
        break;
      }
      row.push_back(v);
    }
    if (!ok) continue;
    for (std::size_t i = 0; i < row.size(); ++i) rep.residuals[i].values.push_back(row[i]);
    ++kept;
  }
  if (kept == 0) throw DomainExhaustedError("no sample inside the one-form domain");
  rep.samples = kept;
  rep.finish();
  return rep;
}

ResidualReport hj_residual_nondeg(const Expr& H, const ClosedOneForm& gamma, const SampleOptions& opt) {
  std::set<Symbol> allowed(gamma.coords.begin(), gamma.coords.end());
  allowed.insert(gamma.momenta.begin(), gamma.momenta.end());
  for (const auto& s : free_symbols(H))
    if (s.kind != SymKind::PARAM && !allowed.count(s))
      throw ChartMismatchError("Hamiltonian depends on " + s.str() + " outside the one-form chart");
  const Expr Hg = simplify(substitute(H, gamma.substitution()));
  std::vector<std::string> labels;
  std::vector<Expr> eqs;
  for (const auto& x : gamma.coords) {
    labels.push_back("d/d" + x.str());
    eqs.push_back(diff(Hg, x));
  }
  labels.push_back("H - H(reference)");
  eqs.push_back(Hg);
  std::vector<Binding> pts;
  ResidualReport rep =
      sample_residuals("hj-nondegenerate-" + space_name(gamma.base.space), labels, eqs, opt, &pts);
  Residual& level = rep.residuals.back();
  level.values.clear();
  double worst = 0;
  for (const auto& b : pts) {
    Binding ref = b;
    for (const auto& x : gamma.coords)
      if (pts.front().count(x)) ref[x] = pts.front().at(x);
    double v = INFINITY, r = 0;
    if (finite_eval(Hg, b, v) && finite_eval(Hg, ref, r)) v -= r;
    level.values.push_back(v);
    worst = std::max(worst, std::abs(v));
  }
  rep.metrics["variation"] = worst;
  rep.finish();
  return rep;
}

Binding lift_point(const ClosedOneForm& gamma, const Binding& base) {
  Binding out = base;
  for (std::size_t i = 0; i < gamma.momenta.size(); ++i) out[gamma.momenta[i]] = eval(gamma.components[i], base);
  return out;
}

namespace {

/// Derivative at t[c] of the Lagrange interpolant through nodes [lo, lo + 5).
double lagrange_slope(const std::vector<double>& t, const std::vector<double>& y, std::size_t lo, std::size_t c) {
  double d = 0;
  for (std::size_t j = lo; j < lo + 5; ++j) {
    double w = 0;
    for (std::size_t m = lo; m < lo + 5; ++m) {
      if (m == j) continue;
      double prod = 1.0 / (t[j] - t[m]);
      for (std::size_t l = lo; l < lo + 5; ++l)
        if (l != j && l != m) prod *= (t[c] - t[l]) / (t[j] - t[l]);
      w += prod;
    }
    d += w * y[j];
  }
  return d;
}

}  // namespace

ResidualReport gamma_relatedness(const ImplicitSystem& sys, const ClosedOneForm& gamma, const Trajectory& base_traj,
                                 double tol) {
  const std::size_t N = base_traj.samples.size();
  if (N < 5) throw PreconditionError("trajectory needs at least 5 samples for finite differencing");
  for (const auto& x : gamma.coords)
    for (const auto& s : base_traj.samples)
      if (!s.count(x)) throw ChartMismatchError("trajectory has no coordinate " + x.str());
  for (const auto& st : sys.states)
    if (index_of(gamma.coords, st) == gamma.coords.size() && index_of(gamma.momenta, st) == gamma.momenta.size())
      throw ChartMismatchError("state " + st.str() + " is not covered by the one-form chart");

  const std::size_t n = gamma.coords.size();
  std::vector<std::vector<double>> xs(n, std::vector<double>(N));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t s = 0; s < N; ++s) xs[i][s] = base_traj.samples[s].at(gamma.coords[i]);
  std::vector<std::vector<Expr>> dg(n, std::vector<Expr>(n));
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t j = 0; j < n; ++j) dg[m][j] = diff(gamma.components[m], gamma.coords[j]);

  ResidualReport rep;
  rep.system = "gamma-relatedness";
  rep.tolerance = tol;
  for (std::size_t i = 0; i < sys.states.size(); ++i)
    rep.residuals.push_back({"d/dt " + sys.states[i].str(), sys.rhs[i], {}, 0.0});

  Binding mult;
  for (std::size_t s = 0; s < N; ++s) {
    const std::size_t lo = s < 2 ? 0 : (s + 3 > N ? N - 5 : s - 2);
    std::vector<double> xdot(n);
    for (std::size_t i = 0; i < n; ++i) xdot[i] = lagrange_slope(base_traj.times, xs[i], lo, s);
    Binding env = base_traj.constants;
    for (std::size_t i = 0; i < n; ++i) env[gamma.coords[i]] = xs[i][s];
    env = lift_point(gamma, env);
    try {
      mult = resolve_multipliers(sys, env, mult, base_traj.times[s]);
    } catch (const NumericFailure& e) {
      rep.notes.push_back(std::string("lifted curve leaves the constraint set: ") + e.what());
      for (auto& r : rep.residuals) r.values.push_back(INFINITY);
      break;
    }
    for (const auto& [k, v] : mult) env[k] = v;
    for (std::size_t i = 0; i < sys.states.size(); ++i) {
      const Symbol& st = sys.states[i];
      double lhs;
      std::size_t c = index_of(gamma.coords, st);
      if (c < n) {
        lhs = xdot[c];
      } else {
        std::size_t m = index_of(gamma.momenta, st);
        lhs = 0;
        for (std::size_t j = 0; j < n; ++j) lhs += eval(dg[m][j], env) * xdot[j];
      }
      rep.residuals[i].values.push_back(lhs - eval(sys.rhs[i], env));
    }
  }
  rep.samples = static_cast<int>(rep.residuals.empty() ? 0 : rep.residuals.front().values.size());
  rep.finish();
  return rep;
}

SectionSigma SectionSigma::from_hamiltonian(const ChartSpec& base, const Expr& H) {
  SectionSigma s;
  s.base = base;
  for (const auto& [x, p] : canonical_pairs(base)) {
    s.velocity.push_back(diff(H, p));
    s.force.push_back(-diff(H, x));
  }
  return s;
}

ResidualReport local_vf_residual(const SectionSigma& sigma, const ClosedOneForm& gamma, const SampleOptions& opt) {
  const std::size_t n = gamma.coords.size();
  if (sigma.velocity.size() != n || sigma.force.size() != n)
    throw PreconditionError("section has " + std::to_string(sigma.velocity.size()) + "/" +
                            std::to_string(sigma.force.size()) + " entries for " + std::to_string(n) + " coordinates");
  const auto sub = gamma.substitution();
  std::vector<Expr> v, f;
  for (std::size_t i = 0; i < n; ++i) {
    v.push_back(substitute(sigma.velocity[i], sub));
    f.push_back(substitute(sigma.force[i], sub));
  }
  std::vector<std::string> labels;
  std::vector<Expr> eqs;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<Expr> t;
    for (std::size_t i = 0; i < n; ++i) t.push_back(v[i] * diff(gamma.components[j], gamma.coords[i]));
    t.push_back(-f[j]);
    labels.push_back("sigma " + gamma.momenta[j].str());
    eqs.push_back(Expr::add(t));
  }
  return sample_residuals("local-vector-field", labels, eqs, opt);
}

Expr AffineParts::lagrangian() const {
  std::vector<Expr> t{g};
  for (int A = 1; A <= n; ++A) t.push_back(f[static_cast<std::size_t>(A - 1)] * Expr(Symbol::q(A, order)));
  return simplify(Expr::add(t));
}

AffineParts affine_decompose(const LagrangianSpec& L) {
  if (L.k != 2 && L.k != 3) throw PreconditionError("affine decomposition needs order 2 or 3");
  AffineParts a;
  a.n = L.n;
  a.order = L.k;
  SymbolSet top;
  for (int A = 1; A <= L.n; ++A) top.insert(Symbol::q(A, L.k));
  Expr rest = L.L;
  for (int A = 1; A <= L.n; ++A) {
    Expr fA = simplify(diff(L.L, Symbol::q(A, L.k)));
    if (depends_on_any(fA, top)) throw PreconditionError("Lagrangian is not affine in the top derivative");
    a.f.push_back(fA);
    rest = rest - fA * Expr(Symbol::q(A, L.k));
  }
  a.g = simplify(rest);
  if (depends_on_any(a.g, top)) a.g = simplify(substitute(a.g, [&] {
                                   std::map<Symbol, Expr> z;
                                   for (const auto& s : top) z[s] = Expr(0);
                                   return z;
                                 }()));
  return a;
}

ResidualReport affine_symmetry_check(const std::vector<Expr>& f, int level, const SampleOptions& opt) {
  const int n = static_cast<int>(f.size());
  std::vector<std::string> labels;
  std::vector<Expr> eqs;
  for (int A = 1; A <= n; ++A)
    for (int B = A + 1; B <= n; ++B) {
      labels.push_back("sym " + std::to_string(A) + "," + std::to_string(B));
      eqs.push_back(diff(f[static_cast<std::size_t>(A - 1)], Symbol::q(B, level)) -
                    diff(f[static_cast<std::size_t>(B - 1)], Symbol::q(A, level)));
    }
  if (eqs.empty()) {
    ResidualReport rep;
    rep.system = "affine-symmetry";
    rep.tolerance = opt.tol;
    rep.samples = 0;
    rep.finish();
    return rep;
  }
  return sample_residuals("affine-symmetry", labels, eqs, opt);
}

ResidualReport affine_integrability_check(const AffineParts& p, const SampleOptions& opt) {
  std::vector<std::string> labels;
  std::vector<Expr> eqs;
  for (int B = 1; B <= p.n; ++B) {
    std::vector<Expr> t;
    if (p.order == 2) {
      t.push_back(diff(p.g, Symbol::q(B, 0)));
      Expr gB = diff(p.g, Symbol::q(B, 1));
      const Expr& fB = p.f[static_cast<std::size_t>(B - 1)];
      for (int A = 1; A <= p.n; ++A) {
        t.push_back(-diff(gB, Symbol::q(A, 0)) * Expr(Symbol::q(A, 1)));
        for (int C = 1; C <= p.n; ++C)
          t.push_back(diff(diff(fB, Symbol::q(C, 0)), Symbol::q(A, 0)) * Expr(Symbol::q(C, 1)) *
                      Expr(Symbol::q(A, 1)));
      }
    } else if (p.order == 3) {
      t.push_back(-diff(p.g, Symbol::q(B, 0)));
      for (int A = 1; A <= p.n; ++A)
        t.push_back(diff(diff(p.g, Symbol::q(B, 0)), Symbol::q(A, 1)) * Expr(Symbol::q(A, 1)));
    } else {
      throw PreconditionError("affine integrability needs order 2 or 3");
    }
    labels.push_back("integrability " + std::to_string(B));
    eqs.push_back(Expr::add(t));
  }
  return sample_residuals("affine-integrability-" + std::to_string(p.order), labels, eqs, opt);
}

ClosedOneForm AffineSolution::form() const {
  if (!closed) throw ClosureError(first, second, gap);
  ClosedOneForm g = ClosedOneForm::from_components(base, components);
  if (W) g.potential = W;
  return g;
}

namespace {

std::optional<int> poly_degree(const Expr& e, const SymbolSet& vars) {
  const Node& nd = e.node();
  switch (nd.op) {
    case Op::Const: return 0;
    case Op::Sym: return vars.count(nd.sym) ? 1 : 0;
    case Op::Neg: return poly_degree(nd.args[0], vars);
    case Op::Add:
    case Op::Mul: {
      int d = 0;
      for (const auto& a : nd.args) {
        auto da = poly_degree(a, vars);
        if (!da) return std::nullopt;
        d = nd.op == Op::Add ? std::max(d, *da) : d + *da;
      }
      return d;
    }
    case Op::Pow: {
      auto db = poly_degree(nd.args[0], vars);
      if (!db) return std::nullopt;
      if (*db == 0) return 0;
      if (!nd.expo.is_integer() || nd.expo.negative()) return std::nullopt;
      return *db * static_cast<int>(nd.expo.num());
    }
    case Op::Fn: return depends_on_any(e, vars) ? std::nullopt : std::optional<int>(0);
  }
  return std::nullopt;
}

}  // namespace

std::optional<Expr> line_integral_potential(const std::vector<Symbol>& coords, const std::vector<Expr>& components) {
  SymbolSet vars(coords.begin(), coords.end());
  int D = 1;
  for (const auto& c : components) {
    auto d = poly_degree(c, vars);
    if (!d) return std::nullopt;
    D = std::max(D, *d);
  }
  // closed Newton-Cotes on j/D, exact for degree <= D; weights from the moment equations
  const int m = D + 1;
  std::vector<std::vector<Num>> V(static_cast<std::size_t>(m), std::vector<Num>(static_cast<std::size_t>(m + 1)));
  for (int r = 0; r < m; ++r) {
    for (int j = 0; j < m; ++j) V[r][j] = *Num::pow(Num::rational(j, D), Num(r));
    V[r][m] = Num::rational(1, r + 1);
  }
  for (int c = 0; c < m; ++c) {
    int piv = c;
    while (V[piv][c].is_zero()) ++piv;
    std::swap(V[c], V[piv]);
    for (int r = 0; r < m; ++r) {
      if (r == c || V[r][c].is_zero()) continue;
      Num k = V[r][c] / V[c][c];
      for (int j = c; j <= m; ++j) V[r][j] = V[r][j] - k * V[c][j];
    }
  }
  std::vector<Expr> terms;
  for (int j = 0; j < m; ++j) {
    Num w = V[j][m] / V[j][j];
    if (w.is_zero()) continue;
    std::map<Symbol, Expr> scale;
    for (const auto& x : coords) scale[x] = Expr(Num::rational(j, D)) * Expr(x);
    for (std::size_t i = 0; i < coords.size(); ++i)
      terms.push_back(Expr(w) * Expr(coords[i]) * substitute(components[i], scale));
  }
  return simplify(Expr::add(terms));
}

AffineSolution affine_hj_solve(const AffineParts& p, const SampleOptions& opt) {
  int level = p.order - 1;
  if (!affine_symmetry_check(p.f, level, opt).pass)
    throw PreconditionError("affine coefficients fail the symmetry check");
  if (!affine_integrability_check(p, opt).pass) throw PreconditionError("affine data fail the integrability criterion");
  AffineSolution s;
  s.base = ChartSpec::standard(Space::TstarTk1Q, p.n, p.order);
  std::vector<Symbol> coords;
  for (int l = 0; l < p.order; ++l)
    for (int A = 1; A <= p.n; ++A) coords.push_back(Symbol::q(A, l));
  const auto& f = p.f;
  if (p.order == 2) {
    for (int B = 1; B <= p.n; ++B) {
      std::vector<Expr> t{diff(p.g, Symbol::q(B, 1))};
      for (int A = 1; A <= p.n; ++A)
        t.push_back(-diff(f[static_cast<std::size_t>(B - 1)], Symbol::q(A, 0)) * Expr(Symbol::q(A, 1)));
      s.components.push_back(simplify(Expr::add(t)));
    }
  } else {
    for (int B = 1; B <= p.n; ++B) {
      std::vector<Expr> t{diff(p.g, Symbol::q(B, 1))};
      for (int A = 1; A <= p.n; ++A)
        for (int C = 1; C <= p.n; ++C)
          t.push_back(diff(diff(f[static_cast<std::size_t>(A - 1)], Symbol::q(B, 1)), Symbol::q(C, 1)) *
                      Expr(Symbol::q(A, 2)) * Expr(Symbol::q(C, 2)));
      s.components.push_back(simplify(Expr::add(t)));
    }
    for (int B = 1; B <= p.n; ++B) {
      std::vector<Expr> t;
      for (int C = 1; C <= p.n; ++C)
        t.push_back(-diff(f[static_cast<std::size_t>(B - 1)], Symbol::q(C, 1)) * Expr(Symbol::q(C, 2)));
      s.components.push_back(simplify(Expr::add(t)));
    }
  }
  for (const auto& fB : f) s.components.push_back(simplify(fB));

  s.closed = true;
  for (std::size_t i = 0; i < coords.size() && s.closed; ++i)
    for (std::size_t j = i + 1; j < coords.size(); ++j) {
      Expr r = simplify(diff(s.components[i], coords[j]) - diff(s.components[j], coords[i]));
      if (r.is_zero()) continue;
      double g = max_relative_gap(r, Expr(0), 50, opt.seed);
      if (g > 1e-9) {
        s.closed = false;
        s.first = static_cast<int>(i);
        s.second = static_cast<int>(j);
        s.gap = g;
        break;
      }
    }
  if (s.closed) s.W = line_integral_potential(coords, s.components);
  return s;
}

}  // namespace hjm
