#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hjm/system.hpp"

namespace hjm {

/// x' = dE/dp, p' = -dE/dx over the canonical pairs; constraints dE/dfiber = 0 on the augmented energy.
ImplicitSystem assemble(const MorseFamily& mf);

struct NewtonOptions {
  double tol = 1e-12;
  int max_iter = 50;
};

/// Solves the constraints for the multipliers at a state. `guess` warm-starts (missing entries start at 0).
/// Throws SingularJacobianError when the Jacobian loses column rank; NumericFailure if Newton stalls.
Binding resolve_multipliers(const ImplicitSystem& sys, const Binding& at, const Binding& guess = {}, double t = 0,
                            const NewtonOptions& opt = {});

struct Trajectory {
  std::vector<Symbol> states;
  std::vector<Symbol> multipliers;
  std::vector<Symbol> lifted;  // momentum symbols appended by lift_trajectory
  std::vector<std::vector<double>> lifted_values;  // per sample, aligned with `lifted`
  std::vector<double> times;
  std::vector<Binding> samples;
  std::vector<double> energy;
  Binding constants;  // parameters carried from the initial binding
  double h = 0;
  std::string integrator = "rk4";
};

/// Fixed-step classical RK4; a final shorter step lands exactly on t1.
/// `init` binds the states and may bind parameters; those stay fixed.
Trajectory integrate_rk4(const ImplicitSystem& sys, const Binding& init, double t0, double t1, double h);

/// max |E(t) - E(t0)| / (1 + |E(t0)|).
double energy_drift(const Trajectory& traj);

/// Appends gamma(q(t)) as momentum values to every sample.
Trajectory lift_trajectory(const ClosedOneForm& gamma, const Trajectory& base);

/// Header `t`, states, multipliers, `E`, then `gamma_<p>` per lifted momentum; %.17g floats.
void write_csv(std::ostream& os, const Trajectory& traj);

}  // namespace hjm
