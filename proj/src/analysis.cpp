#include "rotor/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "rotor/errors.hpp"
#include "rotor/fft.hpp"

namespace rotor {

namespace {

double wrap_to_period(double x, double period) {
  return x - period * std::round(x / period);
}

}  // namespace

MomentReport moments(const RotorState& state, double omega_ref) {
  if (!(omega_ref > 0.0)) throw ConfigError("moments: omega_ref must be positive");
  const int n = state.grid.n_points;
  const double dtheta = state.grid.spacing();
  const double period = state.grid.period;

  std::vector<double> prob(n);
  double total = 0.0;
  for (int j = 0; j < n; ++j) {
    prob[j] = std::norm(state.amplitudes[j]) * dtheta;
    total += prob[j];
  }

  // Center the branch cut opposite the circular mean of the distribution.
  const double f = 2.0 * M_PI / period;
  std::complex<double> z = 0.0;
  for (int j = 0; j < n; ++j) z += prob[j] * std::polar(1.0, f * state.grid.theta_values[j]);
  z /= total;
  const double resultant = std::abs(z);
  const double center = std::arg(z) / f;

  std::vector<double> u(n);
  for (int j = 0; j < n; ++j) u[j] = wrap_to_period(state.grid.theta_values[j] - center, period);

  MomentReport r;
  r.spread_warning = resultant < 0.6;
  double mu = 0.0;
  for (int j = 0; j < n; ++j) mu += prob[j] * u[j];
  mu /= total;
  double var_u = 0.0;
  for (int j = 0; j < n; ++j) var_u += prob[j] * (u[j] - mu) * (u[j] - mu);
  var_u /= total;
  r.mean_theta = wrap_to_period(center + mu, period);
  r.var_theta = var_u;

  // Momentum moments in the spectral representation.
  std::vector<std::complex<double>> spec = state.amplitudes;
  fft::forward(spec);
  double sw = 0.0, ml = 0.0, ml2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double w = std::norm(spec[k]);
    const double l = state.grid.wavenumbers[k];
    sw += w;
    ml += w * l;
    ml2 += w * l * l;
  }
  r.mean_l = ml / sw;
  r.var_l = ml2 / sw - r.mean_l * r.mean_l;

  // Symmetrized covariance: Re<psi| u L psi> - <u><L>.
  std::vector<std::complex<double>> lpsi = spec;
  for (int k = 0; k < n; ++k) lpsi[k] *= state.grid.wavenumbers[k];
  fft::inverse(lpsi);
  std::complex<double> ul = 0.0;
  for (int j = 0; j < n; ++j) ul += std::conj(state.amplitudes[j]) * u[j] * lpsi[j];
  const double cov = (ul.real() * dtheta) / total - mu * r.mean_l;
  r.covar_theta_l = cov;

  const double a = omega_ref * r.var_theta;
  const double b = r.var_l / omega_ref;
  const double half_diff = 0.5 * (a - b);
  const double radius = std::sqrt(half_diff * half_diff + cov * cov);
  r.min_variance_ratio = 2.0 * (0.5 * (a + b) - radius);

  if (std::abs(2.0 * cov) < 1e-12 * (a + b) && std::abs(a - b) < 1e-12 * (a + b)) {
    r.squeeze_angle = 0.0;  // circular, orientation undefined
  } else {
    // Major axis at atan2/2, minor axis a quarter turn away.
    double angle = 0.5 * std::atan2(2.0 * cov, a - b) + 0.5 * M_PI;
    angle = std::fmod(angle, M_PI);
    if (angle < 0.0) angle += M_PI;
    r.squeeze_angle = angle;
  }
  return r;
}

WignerMap wigner(const RotorState& state, const std::vector<double>& l_grid,
                 const WignerOptions& options) {
  if (l_grid.empty()) throw ConfigError("wigner: empty momentum grid");
  if (options.theta_stride < 1) throw ConfigError("wigner: stride must be at least 1");
  const int n = state.grid.n_points;
  const double dtheta = state.grid.spacing();
  const double period = state.grid.period;

  WignerMap map;
  double outside = 0.0;
  for (int j = 0; j < n; ++j)
    if (std::abs(state.grid.theta_values[j]) >= 0.25 * period)
      outside += std::norm(state.amplitudes[j]) * dtheta;
  if (outside > 1e-6) {
    if (options.strict)
      throw NumericalError(
          "wigner: state is not localized inside a quarter period (the line transform "
          "needs probability outside |theta| < period/4 below 1e-6)");
    map.localization_warning = true;
  }

  // Support window: the line transform treats the state as zero outside it.
  int lo = 0, hi = n - 1;
  double peak = 0.0;
  for (int j = 0; j < n; ++j) peak = std::max(peak, std::abs(state.amplitudes[j]));
  while (lo < n && std::abs(state.amplitudes[lo]) < 1e-16 * peak) ++lo;
  while (hi > 0 && std::abs(state.amplitudes[hi]) < 1e-16 * peak) --hi;

  for (int j = 0; j < n; j += options.theta_stride)
    map.theta_values.push_back(state.grid.theta_values[j]);
  map.l_values = l_grid;
  map.values.assign(map.theta_values.size() * l_grid.size(), 0.0);

  const size_t nl = l_grid.size();
  for (size_t it = 0; it < map.theta_values.size(); ++it) {
    const int j = static_cast<int>(it) * options.theta_stride;
    const int kmax = std::min(hi - j, j - lo);
    for (size_t il = 0; il < nl; ++il) {
      const double phase = 2.0 * l_grid[il] * dtheta;
      // k = 0 term plus conjugate pairs.
      double acc = std::norm(state.amplitudes[j]);
      for (int k = 1; k <= kmax; ++k) {
        const std::complex<double> prod =
            std::conj(state.amplitudes[j + k]) * state.amplitudes[j - k];
        acc += 2.0 * (prod.real() * std::cos(phase * k) - prod.imag() * std::sin(phase * k));
      }
      map.values[it * nl + il] = acc * dtheta / M_PI;
    }
  }
  return map;
}

double potential_mean(const RotorState& state, const RotorConstants& constants) {
  double m = 0.0, w = 0.0;
  for (int j = 0; j < state.grid.n_points; ++j) {
    const double p = std::norm(state.amplitudes[j]);
    m += p * bare_potential(state.grid.theta_values[j], constants);
    w += p;
  }
  return m / w;
}

double potential_variance(const RotorState& state, const DrivePoint&,
                          const RotorConstants& constants, const SystemParams&) {
  double m = 0.0, m2 = 0.0, w = 0.0;
  for (int j = 0; j < state.grid.n_points; ++j) {
    const double p = std::norm(state.amplitudes[j]);
    const double v = bare_potential(state.grid.theta_values[j], constants);
    m += p * v;
    m2 += p * v * v;
    w += p;
  }
  m /= w;
  // Cancellation can leave a tiny negative residue for near-point masses.
  return std::max(0.0, m2 / w - m * m);
}

G2Series g2_series(const Trajectory& trajectory, const DriveSchedule&,
                   const RotorConstants&, const SystemParams& params, double min_photons) {
  if (!(min_photons > 0.0)) throw ConfigError("g2_series: photon floor must be positive");
  if (trajectory.samples.empty()) throw ConfigError("g2_series: trajectory carries no samples");

  G2Series out;
  out.times.reserve(trajectory.samples.size());
  size_t n_valid = 0;
  for (const auto& s : trajectory.samples) {
    const double de = s.delta + params.U0 * s.mean_potential;
    const double denom = 0.25 * params.kappa * params.kappa + de * de;
    const double n_photon = s.eta * s.eta * s.noise_factor / denom;
    out.times.push_back(s.time);
    out.mean_photon_numbers.push_back(n_photon);
    if (n_photon < min_photons) {
      out.g2_values.push_back(std::numeric_limits<double>::quiet_NaN());
      out.valid.push_back(false);
      continue;
    }
    const double lambda = 4.0 * params.U0 * params.U0 * de * de / (denom * denom);
    out.g2_values.push_back(1.0 + lambda * s.var_potential);
    out.valid.push_back(true);
    ++n_valid;
  }
  if (n_valid == 0)
    throw NumericalError("g2_series: photon number below the floor at every sample");
  return out;
}

SampleFn make_sampler(const RotorConstants& constants, const SystemParams& params,
                      double omega_ref) {
  return [constants, params, omega_ref](const RotorState& state, const DrivePoint& drive,
                                        double factor, TrajectorySample& out) {
    const MomentReport m = moments(state, omega_ref);
    out.mean_theta = m.mean_theta;
    out.var_theta = m.var_theta;
    out.mean_l = m.mean_l;
    out.var_l = m.var_l;
    out.covar_theta_l = m.covar_theta_l;
    out.squeeze_angle = m.squeeze_angle;
    out.min_variance_ratio = m.min_variance_ratio;
    out.mean_potential = potential_mean(state, constants);
    out.var_potential = potential_variance(state, drive, constants, params);
    out.n_photons = steady_photon_number(out.mean_potential, drive, params) * factor;
  };
}

}  // namespace rotor
