#include "rotor/protocol.hpp"

#include <cmath>
#include <complex>

#include "rotor/dynamics.hpp"
#include "rotor/errors.hpp"

namespace rotor {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double harmonic_frequency(const DrivePoint& drive, const RotorConstants& constants,
                          const SystemParams& params) {
  double scale = 1.0;
  if (drive.eta != 0.0) {
    if (!(params.q > 0.0))
      throw NumericalError("harmonic_frequency: driven well needs q > 0");
    if (!(params.kappa > 0.0))
      throw ConfigError("harmonic_frequency: cavity linewidth must be positive");
    scale += (params.U0 / params.q) * drive.eta * drive.eta /
             (0.25 * params.kappa * params.kappa + drive.delta * drive.delta);
  }
  const double curvature =
      constants.beta * (2.0 * constants.chi1 + 8.0 * constants.chi2) * scale;
  if (!(curvature > 0.0))
    throw NumericalError("harmonic_frequency: well curvature is not positive");
  return std::sqrt(curvature) / constants.t0;
}

DriveSchedule make_squeeze_schedule(const SqueezeProtocolSpec& spec,
                                    std::vector<std::string>* warnings) {
  if (spec.n_cycles < 0)
    throw ConfigError("make_squeeze_schedule: n_cycles must be non-negative");
  if (!(spec.omega_wide > 0.0) || !(spec.omega_tight > spec.omega_wide))
    throw ConfigError("make_squeeze_schedule: need omega_tight > omega_wide > 0");
  if (spec.switch_time < 0.0)
    throw ConfigError("make_squeeze_schedule: switch_time must be non-negative");
  if (warnings && spec.switch_time * spec.omega_tight > 0.5)
    warnings->push_back(
        "make_squeeze_schedule: switch_time is not small against the tight trap "
        "period; the switches will not look instantaneous to the rotor");

  const double hold_wide = 0.5 * kPi / spec.omega_wide;
  const double hold_tight = 0.5 * kPi / spec.omega_tight;

  DriveSchedule schedule;
  schedule.segments.reserve(4 * static_cast<size_t>(spec.n_cycles));
  for (int cycle = 0; cycle < spec.n_cycles; ++cycle) {
    schedule.segments.push_back(
        {spec.switch_time, SegmentShape::smoothstep, spec.drive_tight, spec.drive_wide});
    schedule.segments.push_back(
        {hold_wide, SegmentShape::constant, spec.drive_wide, spec.drive_wide});
    schedule.segments.push_back(
        {spec.switch_time, SegmentShape::smoothstep, spec.drive_wide, spec.drive_tight});
    schedule.segments.push_back(
        {hold_tight, SegmentShape::constant, spec.drive_tight, spec.drive_tight});
  }
  return schedule;
}

DiabaticityReport diabaticity_report(const RotorState& state_before,
                                     const std::vector<double>& potential_after,
                                     const RotorConstants& constants, int k) {
  if (k < 2) throw ConfigError("diabaticity_report: need at least two eigenstates");

  const StationaryStates basis =
      stationary_states(state_before.grid, potential_after, constants, k);

  const double total = state_before.norm();
  if (!(total > 0.0))
    throw NumericalError("diabaticity_report: state has zero norm");

  DiabaticityReport report;
  report.weights.reserve(basis.states.size());
  double covered = 0.0;
  for (const RotorState& mode : basis.states) {
    const double w = std::norm(inner_product(mode, state_before)) / (total * total);
    report.weights.push_back(w);
    covered += w;
  }
  report.residual = std::max(0.0, 1.0 - covered);
  return report;
}

std::vector<Covariance2> gaussian_covariance_oracle(const SqueezeProtocolSpec& spec,
                                                    const RotorConstants& constants) {
  if (spec.n_cycles < 0)
    throw ConfigError("gaussian_covariance_oracle: n_cycles must be non-negative");
  if (!(spec.omega_wide > 0.0) || !(spec.omega_tight >= spec.omega_wide))
    throw ConfigError("gaussian_covariance_oracle: need omega_tight >= omega_wide > 0");
  if (!(constants.t0 > 0.0))
    throw ConfigError("gaussian_covariance_oracle: constants carry no time scale");

  const double w1 = spec.omega_tight * constants.t0;  // dimensionless frequencies
  const double w2 = spec.omega_wide * constants.t0;

  // Exact quarter-period rotation in the w-scaled frame maps
  // (theta, L) -> (L/w, -w theta); conjugating the covariance swaps the
  // diagonal with weights 1/w^2 and w^2 and flips the sign of the cross term.
  const auto quarter = [](Covariance2 c, double w) {
    return Covariance2{c.var_l / (w * w), c.var_theta * (w * w), -c.covar};
  };

  Covariance2 c{0.5 / w1, 0.5 * w1, 0.0};  // tight ground state
  std::vector<Covariance2> per_cycle;
  per_cycle.reserve(static_cast<size_t>(spec.n_cycles));
  for (int cycle = 0; cycle < spec.n_cycles; ++cycle) {
    c = quarter(c, w2);  // free evolution in the wide trap
    c = quarter(c, w1);  // then in the tight trap
    per_cycle.push_back(c);
  }
  return per_cycle;
}

}  // namespace rotor
