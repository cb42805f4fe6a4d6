#include "hjm/dynamics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>

#include "hjm/linsolve.hpp"

namespace hjm {

ImplicitSystem assemble(const MorseFamily& mf) {
  const auto pairs = canonical_pairs(mf.base);
  const Expr E = mf.augmented();
  ImplicitSystem sys;
  sys.chart = mf.base;
  sys.energy = E;
  for (const auto& s : mf.base.roster) {
    for (const auto& [x, p] : pairs) {
      if (s == x) {
        sys.states.push_back(s);
        sys.rhs.push_back(diff(E, p));
      } else if (s == p) {
        sys.states.push_back(s);
        sys.rhs.push_back(-diff(E, x));
      }
    }
  }
  sys.multipliers = mf.all_fibers();
  for (const auto& f : sys.multipliers) sys.constraints.push_back(diff(E, f));
  for (const auto& c : sys.constraints) {
    std::vector<Expr> row;
    for (const auto& m : sys.multipliers) row.push_back(diff(c, m));
    sys.jacobian.push_back(std::move(row));
  }
  return sys;
}

namespace {

double sup(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

Binding resolve_multipliers(const ImplicitSystem& sys, const Binding& at, const Binding& guess, double t,
                            const NewtonOptions& opt) {
  const auto m = static_cast<Eigen::Index>(sys.constraints.size());
  const auto r = static_cast<Eigen::Index>(sys.multipliers.size());
  Binding b = at;
  for (const auto& s : sys.multipliers) {
    auto it = guess.find(s);
    b[s] = it == guess.end() ? 0.0 : it->second;
  }
  if (r == 0) return {};
  Eigen::VectorXd c(m), lam(r);
  Eigen::MatrixXd J(m, r);
  auto load = [&] {
    for (Eigen::Index i = 0; i < m; ++i) {
      c(i) = eval(sys.constraints[static_cast<std::size_t>(i)], b);
      for (Eigen::Index j = 0; j < r; ++j)
        J(i, j) = eval(sys.jacobian[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], b);
    }
  };
  for (int it = 0; it < opt.max_iter; ++it) {
    load();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(0) > 0 && sv(i) > 1e-10 * sv(0)) ++rank;
    if (rank < r) throw SingularJacobianError(rank, static_cast<int>(r), t);
    for (Eigen::Index j = 0; j < r; ++j) lam(j) = b[sys.multipliers[static_cast<std::size_t>(j)]];
    if (sup(c) <= opt.tol) break;
    Eigen::VectorXd step = J.colPivHouseholderQr().solve(-c);
    lam += step;
    for (Eigen::Index j = 0; j < r; ++j) b[sys.multipliers[static_cast<std::size_t>(j)]] = lam(j);
    if (sup(step) <= opt.tol * (1.0 + sup(lam))) {
      load();
      break;
    }
    if (it + 1 == opt.max_iter) throw NumericFailure("multiplier Newton did not converge at t=" + std::to_string(t));
  }
  if (sup(c) > 1e-9 * (1.0 + sup(lam)))
    throw NumericFailure("constraints not satisfiable at t=" + std::to_string(t) + " (residual " +
                         std::to_string(sup(c)) + ")");
  Binding out;
  for (const auto& s : sys.multipliers) out[s] = b[s];
  return out;
}

Trajectory integrate_rk4(const ImplicitSystem& sys, const Binding& init, double t0, double t1, double h) {
  if (!(h > 0)) throw PreconditionError("step size must be positive");
  if (!(t1 > t0)) throw PreconditionError("t1 must exceed t0");
  const std::size_t n = sys.states.size();
  Trajectory tr;
  tr.states = sys.states;
  tr.multipliers = sys.multipliers;
  tr.h = h;
  std::set<Symbol> own(sys.states.begin(), sys.states.end());
  own.insert(sys.multipliers.begin(), sys.multipliers.end());
  Binding env;
  for (const auto& [s, v] : init)
    if (!own.count(s)) {
      env[s] = v;
      tr.constants[s] = v;
    }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = lookup(init, sys.states[i]);

  Binding mult;
  auto field = [&](const std::vector<double>& y, double t) {
    for (std::size_t i = 0; i < n; ++i) env[sys.states[i]] = y[i];
    mult = resolve_multipliers(sys, env, mult, t);
    for (const auto& [s, v] : mult) env[s] = v;
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = eval(sys.rhs[i], env);
    return d;
  };
  auto record = [&](double t) {
    for (std::size_t i = 0; i < n; ++i) env[sys.states[i]] = x[i];
    mult = resolve_multipliers(sys, env, mult, t);
    Binding s;
    for (std::size_t i = 0; i < n; ++i) s[sys.states[i]] = x[i];
    for (const auto& [sym, v] : mult) {
      s[sym] = v;
      env[sym] = v;
    }
    tr.times.push_back(t);
    tr.samples.push_back(std::move(s));
    tr.energy.push_back(eval(sys.energy, env));
  };

  record(t0);
  double t = t0;
  std::vector<double> y(n);
  while (t1 - t > 1e-12 * std::max(1.0, std::abs(t1))) {
    const double step = std::min(h, t1 - t);
    auto k1 = field(x, t);
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + step / 2 * k1[i];
    auto k2 = field(y, t + step / 2);
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + step / 2 * k2[i];
    auto k3 = field(y, t + step / 2);
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + step * k3[i];
    auto k4 = field(y, t + step);
    for (std::size_t i = 0; i < n; ++i) x[i] += step / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    t = (t1 - (t + step) < 1e-12 * std::max(1.0, std::abs(t1))) ? t1 : t + step;
    record(t);
  }
  return tr;
}

double energy_drift(const Trajectory& traj) {
  if (traj.energy.empty()) return 0.0;
  const double e0 = traj.energy.front();
  double worst = 0;
  for (double e : traj.energy) worst = std::max(worst, std::abs(e - e0));
  return worst / (1.0 + std::abs(e0));
}

Trajectory lift_trajectory(const ClosedOneForm& gamma, const Trajectory& base) {
  std::set<Symbol> have(base.states.begin(), base.states.end());
  for (const auto& c : gamma.coords)
    if (!have.count(c)) throw ChartMismatchError("trajectory has no coordinate " + c.str());
  Trajectory out = base;
  out.lifted = gamma.momenta;
  out.lifted_values.clear();
  for (const auto& s : out.samples) {
    Binding env = base.constants;
    for (const auto& [k, v] : s) env[k] = v;
    std::vector<double> row;
    for (const auto& c : gamma.components) row.push_back(eval(c, env));
    out.lifted_values.push_back(std::move(row));
  }
  return out;
}

void write_csv(std::ostream& os, const Trajectory& traj) {
  std::vector<Symbol> cols = traj.states;
  cols.insert(cols.end(), traj.multipliers.begin(), traj.multipliers.end());
  os << "t";
  for (const auto& c : cols) os << ',' << c.str();
  os << ",E";
  for (const auto& c : traj.lifted) os << ",gamma_" << c.str();
  os << '\n';
  char buf[40];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    put(traj.times[i]);
    for (const auto& c : cols) {
      os << ',';
      put(lookup(traj.samples[i], c));
    }
    os << ',';
    put(i < traj.energy.size() ? traj.energy[i] : NAN);
    if (i < traj.lifted_values.size())
      for (double v : traj.lifted_values[i]) {
        os << ',';
        put(v);
      }
    os << '\n';
  }
}

}  // namespace hjm
