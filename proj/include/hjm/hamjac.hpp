#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hjm/dynamics.hpp"
#include "json.hpp"

namespace hjm {

/// Where residuals are sampled: a box per coordinate, optional domain predicates (each must evaluate >= 0),
/// and fixed parameter values that are not sampled.
struct SampleOptions {
  int points = 50;
  double lo = -1.0;
  double hi = 1.0;
  std::map<Symbol, std::pair<double, double>> box;
  std::vector<Expr> domain;
  Binding fixed;
  std::uint64_t seed = 0x5eedULL;
  double tol = 1e-8;
};

struct Residual {
  std::string label;
  Expr expr;
  std::vector<double> values;
  double sup = 0.0;
};

struct ResidualReport {
  std::string system;
  std::vector<Residual> residuals;
  std::map<std::string, double> metrics;
  std::vector<std::string> notes;
  int samples = 0;
  double sup_norm = 0.0;
  double tolerance = 1e-8;
  bool pass = false;

  /// Recomputes per-residual sups, the overall sup-norm and the pass flag.
  void finish();
  nlohmann::json to_json() const;
  std::string to_text() const;
};

/// Deterministic sample points over `vars` (fixed values merged in). Throws DomainExhaustedError.
std::vector<Binding> sample_points(const SymbolSet& vars, const SampleOptions& opt);

/// Evaluates each expression at opt.points sample points over its free symbols.
ResidualReport sample_residuals(const std::string& system, const std::vector<std::string>& labels,
                                const std::vector<Expr>& exprs, const SampleOptions& opt,
                                std::vector<Binding>* kept = nullptr);

/// Rank of [d2E/dl dx | d2E/dl dl] (rows: fibers and constraint multipliers) at each point.
ResidualReport morse_rank_check(const MorseFamily& mf, const std::vector<Binding>& points);
/// Random points over base, fibers and unfixed parameters in [-2, 2].
std::vector<Binding> morse_sample_points(const MorseFamily& mf, int count, std::uint64_t seed = 0x5eedULL,
                                         const Binding& fixed = {});

/// dE on the image of the one-form: partials of E(x, gamma(x), l) in base coordinates and fibers.
struct HJSystem {
  std::vector<std::string> labels;
  std::vector<Expr> base_equations;
  std::vector<Expr> fiber_equations;
  std::vector<Symbol> fibers;
};
HJSystem hj_system(const MorseFamily& mf, const ClosedOneForm& gamma);

/// Samples hj_system; at each point the fibers are fixed by a minimum-norm Gauss-Newton solve of the
/// fiber equations.
ResidualReport hj_residual(const MorseFamily& mf, const ClosedOneForm& gamma, const SampleOptions& opt = {});

/// Partials of H o gamma, plus H o gamma minus its value at the first sampled coordinates (same parameters).
/// Metric "variation" is the largest such gap.
ResidualReport hj_residual_nondeg(const Expr& H, const ClosedOneForm& gamma, const SampleOptions& opt = {});

/// Base state with momenta read off the one-form.
Binding lift_point(const ClosedOneForm& gamma, const Binding& base);

ResidualReport gamma_relatedness(const ImplicitSystem& sys, const ClosedOneForm& gamma, const Trajectory& base_traj,
                                 double tol = 1e-5);

/// Velocity part (one per coordinate) and momentum part (one per momentum) of an auxiliary section.
struct SectionSigma {
  ChartSpec base;
  std::vector<Expr> velocity;
  std::vector<Expr> force;

  /// (dH/dp, -dH/dx) on the canonical pairs of `base`.
  static SectionSigma from_hamiltonian(const ChartSpec& base, const Expr& H);
};

/// sum_i velocity_i * d gamma_j / d x_i - force_j, with gamma substituted.
ResidualReport local_vf_residual(const SectionSigma& sigma, const ClosedOneForm& gamma,
                                 const SampleOptions& opt = {});

/// L = sum_A f_A * q{A}_k + g.
struct AffineParts {
  int n = 1;
  int order = 2;
  std::vector<Expr> f;
  Expr g;

  Expr lagrangian() const;
};
AffineParts affine_decompose(const LagrangianSpec& L);

/// d f_A / d q{B}_level - d f_B / d q{A}_level.
ResidualReport affine_symmetry_check(const std::vector<Expr>& f, int level = 1, const SampleOptions& opt = {});

/// Second order: dg/dq0_B - sum_A d2g/dq1_B dq0_A q1_A + sum_{A,C} d2f_B/dq0_C dq0_A q1_C q1_A.
/// Third order: sum_A d2g/dq0_B dq1_A q1_A - dg/dq0_B.
ResidualReport affine_integrability_check(const AffineParts& parts, const SampleOptions& opt = {});

struct AffineSolution {
  ChartSpec base;
  std::vector<Expr> components;
  bool closed = false;
  int first = -1;
  int second = -1;
  double gap = 0.0;
  std::optional<Expr> W;

  /// Throws ClosureError naming the failing pair when the components are not closed.
  ClosedOneForm form() const;
};

/// Gradient system of the affine Hamilton-Jacobi problem; W by line integration for polynomial components.
/// Throws PreconditionError unless the symmetry and integrability checks pass.
AffineSolution affine_hj_solve(const AffineParts& parts, const SampleOptions& opt = {});

/// W(x) = int_0^1 sum_i x_i gamma_i(t x) dt, exact for polynomial components; nullopt otherwise.
std::optional<Expr> line_integral_potential(const std::vector<Symbol>& coords, const std::vector<Expr>& components);

}  // namespace hjm
