#include "rotor/model.hpp"

#include <cmath>

namespace rotor {

RotorConstants derive_constants(const SystemParams& p) {
  if (!(p.N >= 1.0)) throw ConfigError("derive_constants: atom count must be >= 1");
  if (!(p.c2 > 0.0)) throw ConfigError("derive_constants: c2 must be positive");
  if (!(p.q >= 0.0)) throw ConfigError("derive_constants: q must be non-negative");
  if (!(p.hbar > 0.0)) throw ConfigError("derive_constants: hbar must be positive");
  RotorConstants k;
  k.chi1 = p.N + 1.5;
  k.chi2 = p.q * p.N / (8.0 * p.c2);
  k.inertia = p.N * p.hbar * p.hbar / p.c2;
  k.beta = p.q * k.inertia / (p.hbar * p.hbar);
  k.t0 = k.inertia / p.hbar;
  k.E0 = p.hbar * p.hbar / k.inertia;
  return k;
}

double bare_potential(double theta, const RotorConstants& k) {
  const double s1 = std::sin(theta);
  const double s2 = std::sin(2.0 * theta);
  return k.chi1 * s1 * s1 + k.chi2 * s2 * s2;
}

double bare_potential_gradient(double theta, const RotorConstants& k) {
  return k.chi1 * std::sin(2.0 * theta) + 2.0 * k.chi2 * std::sin(4.0 * theta);
}

double potential_max(const RotorConstants& k) {
  // With s = sin^2(theta): V = chi1*s + 4*chi2*s*(1-s), stationary at
  // s* = (chi1 + 4 chi2)/(8 chi2). Interior maximum only when s* < 1,
  // i.e. chi2 > chi1/4; otherwise the maximum sits at s = 1.
  if (k.chi2 <= 0.25 * k.chi1) return k.chi1;
  const double s = (k.chi1 + 4.0 * k.chi2) / (8.0 * k.chi2);
  return k.chi1 * s + 4.0 * k.chi2 * s * (1.0 - s);
}

double effective_potential(double theta, const RotorConstants& k,
                           const DrivePoint& d, const SystemParams& p) {
  if (!(p.kappa > 0.0)) throw ConfigError("effective_potential: kappa must be positive");
  const double v = bare_potential(theta, k);
  if (d.eta == 0.0) return v;
  if (!(p.q > 0.0))
    throw NumericalError("effective_potential: q = 0 with drive on (prefactor 1/q diverges)");
  const double pref = 2.0 * p.hbar * d.eta * d.eta / (p.q * p.kappa);
  return v + pref * std::atan((2.0 * d.delta + 2.0 * p.U0 * v) / p.kappa);
}

double effective_potential_gradient(double theta, const RotorConstants& k,
                                    const DrivePoint& d, const SystemParams& p) {
  if (!(p.kappa > 0.0)) throw ConfigError("effective_potential: kappa must be positive");
  const double dv = bare_potential_gradient(theta, k);
  if (d.eta == 0.0) return dv;
  if (!(p.q > 0.0))
    throw NumericalError("effective_potential: q = 0 with drive on (prefactor 1/q diverges)");
  const double v = bare_potential(theta, k);
  const double x = (2.0 * d.delta + 2.0 * p.U0 * v) / p.kappa;
  const double pref = 2.0 * p.hbar * d.eta * d.eta / (p.q * p.kappa);
  // d/dtheta atan(x(theta)) = x'/(1+x^2), x' = (2 U0/kappa) V'.
  return dv * (1.0 + pref * (2.0 * p.U0 / p.kappa) / (1.0 + x * x));
}

double far_detuned_scale(const DrivePoint& d, const SystemParams& p, bool* warn) {
  if (warn) *warn = std::abs(d.delta) < 10.0 * p.U0 * p.N;
  return 1.0 + 2.0 * d.eta * d.eta / (0.25 * p.kappa * p.kappa + d.delta * d.delta);
}

RegimeReport classify_regime(const DrivePoint& d, const RotorConstants& k,
                             const SystemParams& p) {
  RegimeReport r;
  r.depth_ratio = p.U0 * p.N / p.kappa;
  const double vmax = potential_max(k);
  const double lo = 2.0 * d.delta / p.kappa;
  const double hi = (2.0 * d.delta + 2.0 * p.U0 * vmax) / p.kappa;
  r.resonance_overlap = (lo <= 0.0 && hi >= 0.0);
  if (std::abs(d.delta) >= 10.0 * p.U0 * vmax)
    r.classification = RegimeReport::Regime::scaling;
  else if (r.depth_ratio > 1.0 && r.resonance_overlap)
    r.classification = RegimeReport::Regime::distorting;
  else
    r.classification = RegimeReport::Regime::intermediate;
  return r;
}

double steady_photon_number(double mean_V, const DrivePoint& d, const SystemParams& p) {
  if (d.eta == 0.0) return 0.0;  // no drive, no field, cavity or not
  if (!(p.kappa > 0.0)) throw ConfigError("steady_photon_number: kappa must be positive");
  const double det = d.delta + p.U0 * mean_V;
  return d.eta * d.eta / (0.25 * p.kappa * p.kappa + det * det);
}

}  // namespace rotor
