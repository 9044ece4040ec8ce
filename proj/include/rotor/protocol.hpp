#pragma once

#include <string>
#include <vector>

#include "rotor/model.hpp"
#include "rotor/schedule.hpp"
#include "rotor/state.hpp"

namespace rotor {

// Bang-bang squeezing recipe: quarter-period holds alternating between a wide
// and a tight trap, joined by fast smoothstep switches. Frequencies are
// physical (rad/s), switch_time is seconds.
struct SqueezeProtocolSpec {
  int n_cycles = 1;
  double omega_tight = 0.0;
  double omega_wide = 0.0;
  double switch_time = 1e-6;
  DrivePoint drive_tight;
  DrivePoint drive_wide;
};

// Small-oscillation frequency of the effective well around theta = 0, rad/s.
// Analytic curvature: Veff''(0) = (2 chi1 + 8 chi2) * (1 + (U0/q) eta^2 /
// (kappa^2/4 + delta^2)); omega = sqrt(beta * Veff''(0)) / t0. Throws
// NumericalError when the curvature is not positive (free rotor, or a
// blue-shifted drive strong enough to invert the well).
double harmonic_frequency(const DrivePoint& drive, const RotorConstants& constants,
                          const SystemParams& params);

// Per cycle: [switch to wide, hold pi/(2 omega_wide), switch to tight,
// hold pi/(2 omega_tight)]. The caller starts from the tight-trap ground
// state; no leading preparation segment is emitted. Switches are smoothstep
// segments of duration switch_time (zero duration = instantaneous jump).
// Appends to *warnings when switch_time is not small against 1/omega_tight.
DriveSchedule make_squeeze_schedule(const SqueezeProtocolSpec& spec,
                                    std::vector<std::string>* warnings = nullptr);

struct DiabaticityReport {
  std::vector<double> weights;  // |<psi'_i | psi>|^2 for the k lowest states
  double residual = 0.0;        // population outside the reported window
};

// How a state decomposes over the eigenstates of a new potential, i.e. what
// survives an instantaneous potential change. k >= 2.
DiabaticityReport diabaticity_report(const RotorState& state_before,
                                     const std::vector<double>& potential_after,
                                     const RotorConstants& constants, int k);

struct Covariance2 {
  double var_theta = 0.0;
  double var_l = 0.0;
  double covar = 0.0;
};

// Idealized prediction for the protocol with instantaneous switches: the
// tight ground-state covariance carried through exact quarter-period phase
// space rotations. Entry n is the state after cycle n+1, in dimensionless
// (theta, L) units where the tight ground state has det = 1/4. Accepts
// omega_tight == omega_wide (no contrast, covariance fixed).
std::vector<Covariance2> gaussian_covariance_oracle(const SqueezeProtocolSpec& spec,
                                                    const RotorConstants& constants);

}  // namespace rotor
