#pragma once

#include "rotor/errors.hpp"

namespace rotor {

// Microscopic constants. Energies (c2, q) are stored as E/hbar in rad/s so
// that with hbar = 1 every energy is numerically an angular frequency.
struct SystemParams {
  double N = 1.0;      // atom count
  double c2 = 0.0;     // antiferromagnetic spin coupling, rad/s
  double q = 0.0;      // quadratic Zeeman shift, rad/s
  double U0 = 0.0;     // atom-photon dispersive coupling, rad/s
  double kappa = 0.0;  // cavity linewidth, rad/s
  double hbar = 1.0;
};

// Derived rotor constants and the nondimensionalization used everywhere:
// energies in units of E0, times in units of t0, with E0*t0 = hbar.
struct RotorConstants {
  double chi1 = 0.0;     // weight of sin^2(theta)
  double chi2 = 0.0;     // weight of sin^2(2 theta)
  double inertia = 0.0;  // moment of inertia, (rad/s)^-1 when hbar = 1
  double beta = 0.0;     // q*inertia/hbar^2, dimensionless potential strength
  double t0 = 0.0;       // inertia/hbar, seconds
  double E0 = 0.0;       // hbar^2/inertia, rad/s
};

// Classical pump/detuning working point of the cavity drive.
struct DrivePoint {
  double eta = 0.0;    // pump rate, rad/s, >= 0
  double delta = 0.0;  // cavity detuning omega_c - omega_l, rad/s, signed
};

struct RegimeReport {
  enum class Regime { scaling, distorting, intermediate };
  double depth_ratio = 0.0;        // U0*N/kappa
  bool resonance_overlap = false;  // dispersive shift sweeps through resonance
  Regime classification = Regime::intermediate;
};

// chi1 = N + 3/2, chi2 = q N/(8 c2), inertia = N hbar^2/c2. Accepts q = 0
// (zero-field rotor); rejects q < 0, c2 <= 0, N < 1.
RotorConstants derive_constants(const SystemParams& params);

// chi1 sin^2(theta) + chi2 sin^2(2 theta). Pi-periodic, even.
double bare_potential(double theta, const RotorConstants& constants);

// d/dtheta of bare_potential: chi1 sin(2 theta) + 2 chi2 sin(4 theta).
double bare_potential_gradient(double theta, const RotorConstants& constants);

// Largest value bare_potential attains over theta (closed form).
double potential_max(const RotorConstants& constants);

// Potential after adiabatic elimination of the driven cavity:
//   V(theta) + (2 hbar eta^2 / (q kappa)) * atan((2 delta + 2 U0 V)/kappa).
// Reduces bitwise to bare_potential when eta = 0. Throws NumericalError when
// the drive is on and q = 0 (prefactor diverges; use bare_potential then).
double effective_potential(double theta, const RotorConstants& constants,
                           const DrivePoint& drive, const SystemParams& params);

// Analytic d/dtheta of effective_potential.
double effective_potential_gradient(double theta, const RotorConstants& constants,
                                    const DrivePoint& drive, const SystemParams& params);

// Far-detuned limit of the cavity enhancement: 1 + 2 eta^2/(kappa^2/4 + delta^2).
// Valid for |delta| >> U0*N; when the drive point is not in that regime and
// `warn` is non-null it is set to true.
double far_detuned_scale(const DrivePoint& drive, const SystemParams& params,
                         bool* warn = nullptr);

// depth_ratio = U0*N/kappa. resonance_overlap: the interval of the dispersive
// arctan argument, [2 delta/kappa, (2 delta + 2 U0 Vmax)/kappa], contains 0.
// scaling when |delta| >= 10 * U0 * Vmax; distorting when depth_ratio > 1 and
// resonance_overlap; intermediate otherwise.
RegimeReport classify_regime(const DrivePoint& drive, const RotorConstants& constants,
                             const SystemParams& params);

// |alpha_s|^2 = eta^2 / (kappa^2/4 + (delta + U0 * mean_V)^2).
double steady_photon_number(double mean_V, const DrivePoint& drive,
                            const SystemParams& params);

}  // namespace rotor
