#pragma once

#include <vector>

#include "rotor/model.hpp"
#include "rotor/schedule.hpp"
#include "rotor/state.hpp"
#include "rotor/trajectory.hpp"

namespace rotor {

// Second moments of (theta, L). The ellipse diagnostics live in phase space
// scaled by omega_ref: theta' = sqrt(omega_ref) theta, L' = L/sqrt(omega_ref),
// where the reference ground state is a circle and both zero-point variances
// are 1/2. min_variance_ratio is the minor-axis variance over 1/2;
// squeeze_angle is the minor-axis orientation in [0, pi), 0 along theta.
struct MomentReport {
  double mean_theta = 0.0;
  double var_theta = 0.0;
  double mean_l = 0.0;
  double var_l = 0.0;
  double covar_theta_l = 0.0;
  double squeeze_angle = 0.0;
  double min_variance_ratio = 0.0;
  bool spread_warning = false;  // angular spread close to the domain size
};

MomentReport moments(const RotorState& state, double omega_ref = 1.0);

struct WignerOptions {
  bool strict = true;   // throw (instead of warn) when the state is not localized
  int theta_stride = 1;
};

struct WignerMap {
  std::vector<double> theta_values;
  std::vector<double> l_values;
  std::vector<double> values;  // row-major, theta index slow
  bool localization_warning = false;

  double value(size_t it, size_t il) const { return values[it * l_values.size() + il]; }
};

// Line Wigner transform; requires the state to be localized well inside the
// periodic domain (probability outside |theta| < period/4 below 1e-6).
WignerMap wigner(const RotorState& state, const std::vector<double>& l_grid,
                 const WignerOptions& options = {});

// Mean and variance of the bare trapping potential (drive independent: the
// cavity couples to the bare overlap V regardless of the detuning).
double potential_mean(const RotorState& state, const RotorConstants& constants);
double potential_variance(const RotorState& state, const DrivePoint& drive,
                          const RotorConstants& constants, const SystemParams& params);

struct G2Series {
  std::vector<double> times;   // seconds
  std::vector<double> g2_values;
  std::vector<double> mean_photon_numbers;
  std::vector<bool> valid;     // false where the photon number sits below the floor
};

// Second-order coherence of the cavity output from the linearized field
// response: g2 = 1 + lambda * <dV^2> with
// lambda = 4 U0^2 De^2 / (kappa^2/4 + De^2)^2, De = delta + U0 <V>.
// Derivation and validity conditions: docs/g2_notes.md.
// Samples with photon number below min_photons yield NaN and valid=false.
G2Series g2_series(const Trajectory& trajectory, const DriveSchedule& schedule,
                   const RotorConstants& constants, const SystemParams& params,
                   double min_photons = 1e-6);

// Observer that fills TrajectorySample moment fields during evolve().
SampleFn make_sampler(const RotorConstants& constants, const SystemParams& params,
                      double omega_ref = 1.0);

}  // namespace rotor
