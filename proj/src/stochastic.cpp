#include "rotor/stochastic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "rotor/analysis.hpp"
#include "rotor/errors.hpp"
#include "rotor/protocol.hpp"

namespace rotor {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Box-Muller, cosine branch only: exactly two engine draws per call, which
// keeps streams reproducible across standard libraries.
double standard_gaussian(std::mt19937_64& rng) {
  const double u1 = ((rng() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
  const double u2 = (rng() >> 11) * 0x1.0p-53;          // [0, 1)
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

double uniform_unit(std::mt19937_64& rng) { return ((rng() >> 11) + 1.0) * 0x1.0p-53; }

}  // namespace

IntensityPath sample_intensity_path(long long n_steps, double dt, double kappa,
                                    double mean_photons, std::mt19937_64& rng,
                                    std::vector<std::string>* warnings) {
  if (n_steps < 0) throw ConfigError("sample_intensity_path: negative step count");
  if (!(dt > 0.0)) throw ConfigError("sample_intensity_path: dt must be positive");
  if (!(kappa > 0.0)) throw ConfigError("sample_intensity_path: kappa must be positive");
  if (!(mean_photons > 0.0))
    throw ConfigError("sample_intensity_path: mean photon number must be positive");
  if (warnings && dt * kappa >= 1.0)
    warnings->push_back(
        "sample_intensity_path: step exceeds the cavity correlation time 1/kappa; "
        "the noise will look white");

  IntensityPath path;
  path.dt = dt;
  path.correlation_time = 1.0 / kappa;
  path.factors.resize(static_cast<size_t>(n_steps));

  const double sigma = std::sqrt(1.0 / mean_photons);
  const double decay = std::exp(-kappa * dt);
  const double kick = sigma * std::sqrt(1.0 - decay * decay);

  double x = 1.0 + sigma * standard_gaussian(rng);  // stationary start
  for (long long k = 0; k < n_steps; ++k) {
    path.factors[static_cast<size_t>(k)] = std::max(0.0, x);
    x = 1.0 + (x - 1.0) * decay + kick * standard_gaussian(rng);
  }
  return path;
}

double sample_atom_number(double nominal_N, double sigma_rel, std::mt19937_64& rng) {
  if (!(nominal_N >= 1.0))
    throw ConfigError("sample_atom_number: nominal atom number must be at least 1");
  if (!(sigma_rel >= 0.0) || sigma_rel >= 0.5)
    throw ConfigError("sample_atom_number: relative spread must lie in [0, 0.5)");
  if (sigma_rel == 0.0) return nominal_N;
  const double draw = nominal_N * (1.0 + sigma_rel * standard_gaussian(rng));
  return std::max(1.0, static_cast<double>(std::llround(draw)));
}

double sample_atom_number_poisson(double nominal_N, std::mt19937_64& rng) {
  if (!(nominal_N >= 1.0))
    throw ConfigError("sample_atom_number_poisson: nominal atom number must be at least 1");
  if (nominal_N > 1000.0) {
    const double draw = nominal_N + std::sqrt(nominal_N) * standard_gaussian(rng);
    return std::max(1.0, static_cast<double>(std::llround(draw)));
  }
  // Count exponential arrivals; summing -log(u) avoids the e^-lambda underflow
  // of the classic product form.
  double t = 0.0;
  long long count = -1;
  while (t <= nominal_N) {
    t += -std::log(uniform_unit(rng));
    ++count;
  }
  return std::max(1.0, static_cast<double>(count));
}

std::uint64_t trajectory_seed(std::uint64_t master_seed, int trajectory_index) {
  std::uint64_t z =
      master_seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(trajectory_index) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

double resolve_omega_ref(const EnsembleConfig& config, const RotorConstants& constants) {
  if (config.omega_ref > 0.0) return config.omega_ref;
  double best = 0.0;
  for (const Segment& seg : config.schedule.segments) {
    for (const DrivePoint& d : {seg.start, seg.end}) {
      try {
        best = std::max(best, harmonic_frequency(d, constants, config.params));
      } catch (const std::runtime_error&) {
        // flat well at this drive, not a reference candidate
      }
    }
  }
  return best;
}

SystemParams fluctuated_params(const SystemParams& nominal, const NoiseConfig& noise,
                               std::mt19937_64& rng) {
  SystemParams p = nominal;
  if (noise.atom_number_sigma_rel > 0.0) {
    p.N = noise.atom_distribution == AtomDistribution::poisson
              ? sample_atom_number_poisson(nominal.N, rng)
              : sample_atom_number(nominal.N, noise.atom_number_sigma_rel, rng);
    if (noise.atom_scaling == AtomScaling::fixed_volume) p.c2 = nominal.c2 * (p.N / nominal.N);
  }
  return p;
}

// The double-valued observables that get ensemble statistics.
constexpr double TrajectorySample::*kAggregated[] = {
    &TrajectorySample::tau,           &TrajectorySample::mean_theta,
    &TrajectorySample::var_theta,     &TrajectorySample::mean_l,
    &TrajectorySample::var_l,         &TrajectorySample::covar_theta_l,
    &TrajectorySample::squeeze_angle, &TrajectorySample::min_variance_ratio,
    &TrajectorySample::mean_potential, &TrajectorySample::var_potential,
    &TrajectorySample::eta,           &TrajectorySample::delta,
    &TrajectorySample::noise_factor,  &TrajectorySample::n_photons,
};

}  // namespace

EnsembleStats run_ensemble(const EnsembleConfig& config, const NoiseConfig& noise) {
  if (noise.n_trajectories < 1)
    throw ConfigError("run_ensemble: need at least one trajectory");
  if (!(noise.atom_number_sigma_rel >= 0.0))
    throw ConfigError("run_ensemble: atom_number_sigma_rel must be non-negative");
  if (config.schedule.segments.empty())
    throw ConfigError("run_ensemble: empty drive schedule");
  if (config.sample_stride < 1)
    throw ConfigError("run_ensemble: sample_stride must be at least 1");
  if (config.n_workers < 1)
    throw ConfigError("run_ensemble: need at least one worker");

  const RotorConstants nominal_constants = derive_constants(config.params);
  const double omega_ref = resolve_omega_ref(config, nominal_constants);
  if (!(omega_ref > 0.0) && !(config.dt > 0.0))
    throw ConfigError(
        "run_ensemble: no drive on the schedule defines a trap frequency; "
        "set omega_ref or dt explicitly");
  const double dt_seconds = config.dt > 0.0 ? config.dt : config.dt_fraction / omega_ref;
  // Yardstick for min_variance_ratio, shared across trajectories.
  const double omega_ref_scaled =
      omega_ref > 0.0 ? omega_ref * nominal_constants.t0 : 1.0;

  EnsembleStats stats;
  stats.n_requested = noise.n_trajectories;
  stats.omega_ref = omega_ref;
  stats.dt = dt_seconds;
  if (noise.photon_noise_enabled && config.params.kappa > 0.0 &&
      dt_seconds * config.params.kappa >= 1.0)
    stats.warnings.push_back(
        "run_ensemble: time step exceeds the cavity correlation time; intensity "
        "noise will look white");

  const AngularGrid grid = AngularGrid::make(config.n_points);
  const size_t n_fields = std::size(kAggregated);
  // Welford running moments. Among other things this keeps an ensemble of
  // bitwise-identical trajectories exactly degenerate: zero spread, mean equal
  // to the single-trajectory result.
  std::vector<std::vector<double>> means, m2s;

  const int n_traj = noise.n_trajectories;
  std::vector<Trajectory> results(n_traj);
  std::vector<std::string> errors(n_traj);
  std::vector<char> succeeded(n_traj, 0);

  auto run_one = [&](int i) {
    try {
      std::mt19937_64 rng(trajectory_seed(noise.seed, i));
      const SystemParams params_i = fluctuated_params(config.params, noise, rng);
      const RotorConstants constants_i = derive_constants(params_i);

      const DrivePoint entry_drive = config.schedule.segments.front().start;
      const RotorState start =
          ground_state(grid, sample_effective_potential(grid, constants_i, entry_drive, params_i),
                       constants_i, config.ground_state_tol);

      EvolveOptions opt;
      opt.dt = dt_seconds / constants_i.t0;
      opt.sample_stride = config.sample_stride;
      opt.strict = config.strict;
      opt.sampler = make_sampler(constants_i, params_i, omega_ref_scaled);

      double nbar_entry = 0.0;
      if (noise.photon_noise_enabled) {
        opt.noise_source = [&](int, long long n_steps, const RotorState& st,
                               const DrivePoint& d) {
          nbar_entry = steady_photon_number(potential_mean(st, constants_i), d, params_i);
          if (!(nbar_entry > 0.0)) {
            nbar_entry = 0.0;
            return std::vector<double>(static_cast<size_t>(n_steps), 1.0);
          }
          return sample_intensity_path(n_steps, dt_seconds, params_i.kappa, nbar_entry, rng)
              .factors;
        };
        if (noise.refresh_photon_noise_per_step)
          opt.noise_deviation_scale = [&](const RotorState& st, const DrivePoint& d) {
            if (!(nbar_entry > 0.0)) return 1.0;
            const double nbar_now =
                steady_photon_number(potential_mean(st, constants_i), d, params_i);
            return nbar_now > 0.0 ? std::sqrt(nbar_entry / nbar_now) : 1.0;
          };
      }

      results[i] = evolve(start, config.schedule, constants_i, params_i, opt);
      succeeded[i] = 1;
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  };

  const int n_workers = std::min(config.n_workers, n_traj);
  if (n_workers <= 1) {
    for (int i = 0; i < n_traj; ++i) run_one(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w)
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < n_traj; i = next.fetch_add(1)) run_one(i);
      });
    for (std::thread& t : pool) t.join();
  }

  for (int i = 0; i < n_traj; ++i) {
    if (!succeeded[i]) {
      stats.failures.push_back("trajectory " + std::to_string(i) + ": " + errors[i]);
      continue;
    }
    const Trajectory& traj = results[i];
    if (stats.n_succeeded == 0) {
      stats.times.reserve(traj.samples.size());
      for (const TrajectorySample& s : traj.samples) stats.times.push_back(s.time);
      means.assign(traj.samples.size(), std::vector<double>(n_fields, 0.0));
      m2s = means;
    } else if (traj.samples.size() != stats.times.size()) {
      stats.failures.push_back("trajectory " + std::to_string(i) +
                               ": sample count differs from the rest of the ensemble");
      continue;
    }
    ++stats.n_succeeded;
    const double count = static_cast<double>(stats.n_succeeded);
    for (size_t k = 0; k < traj.samples.size(); ++k)
      for (size_t f = 0; f < n_fields; ++f) {
        const double v = traj.samples[k].*kAggregated[f];
        const double delta = v - means[k][f];
        means[k][f] += delta / count;
        m2s[k][f] += delta * (v - means[k][f]);
      }
  }

  if (stats.n_succeeded == 0)
    throw NumericalError("run_ensemble: every trajectory failed; first error: " +
                         (stats.failures.empty() ? std::string("none recorded")
                                                 : stats.failures.front()));

  const double n = static_cast<double>(stats.n_succeeded);
  stats.mean.resize(stats.times.size());
  stats.std_error.resize(stats.times.size());
  for (size_t k = 0; k < stats.times.size(); ++k) {
    stats.mean[k].time = stats.times[k];
    stats.std_error[k].time = stats.times[k];
    for (size_t f = 0; f < n_fields; ++f) {
      stats.mean[k].*kAggregated[f] = means[k][f];
      double se = 0.0;
      if (stats.n_succeeded > 1)
        se = std::sqrt(std::max(0.0, m2s[k][f]) / (n - 1.0) / n);
      stats.std_error[k].*kAggregated[f] = se;
    }
  }
  return stats;
}

}  // namespace rotor
