#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rotor/dynamics.hpp"
#include "rotor/model.hpp"
#include "rotor/schedule.hpp"
#include "rotor/trajectory.hpp"

namespace rotor {

enum class AtomScaling {
  fixed_density,  // c2 tracks nothing: collisions set by density, which is held
  fixed_volume,   // c2 scales with N: same trap volume, density follows N
};

enum class AtomDistribution { gaussian, poisson };

struct NoiseConfig {
  bool photon_noise_enabled = false;
  double atom_number_sigma_rel = 0.05;  // 0 disables atom-number noise
  std::uint64_t seed = 0;
  int n_trajectories = 1;
  AtomScaling atom_scaling = AtomScaling::fixed_density;
  // poisson draws N ~ Poisson(nominal) whenever sigma_rel > 0; the sigma_rel
  // value itself is ignored there (a Poisson spread is fixed at 1/sqrt(N)).
  AtomDistribution atom_distribution = AtomDistribution::gaussian;
  // Rescale the photon-noise variance to the instantaneous mean photon number
  // every step instead of once per segment.
  bool refresh_photon_noise_per_step = false;
};

// Multiplicative intensity factors for the cavity term, one per time step.
struct IntensityPath {
  std::vector<double> factors;
  double dt = 0.0;                // seconds between factors
  double correlation_time = 0.0;  // 1/kappa
};

// Stationary Ornstein-Uhlenbeck intensity: mean 1, variance 1/mean_photons
// (coherent-state shot noise), correlation time 1/kappa. The update is the
// exact OU transition kernel, so dt only limits how finely the correlation is
// resolved (warns when dt >= 1/kappa). Stored factors are clipped at 0; the
// underlying process is propagated unclipped to keep the moments exact.
IntensityPath sample_intensity_path(long long n_steps, double dt, double kappa,
                                    double mean_photons, std::mt19937_64& rng,
                                    std::vector<std::string>* warnings = nullptr);

// Gaussian shot-to-shot atom number: nominal * (1 + sigma_rel * xi), rounded,
// floored at 1. sigma_rel = 0 returns the nominal exactly (not rounded), so
// zero-strength noise stays bitwise neutral. sigma_rel must be < 0.5.
double sample_atom_number(double nominal_N, double sigma_rel, std::mt19937_64& rng);

// Poisson alternative, floored at 1. Exact arrival counting up to lambda =
// 1000, Gaussian approximation above.
double sample_atom_number_poisson(double nominal_N, std::mt19937_64& rng);

// Documented seed-splitting rule: trajectory i draws from
// mix(master + (i+1) * golden_gamma) where mix is the SplitMix64 finalizer.
std::uint64_t trajectory_seed(std::uint64_t master_seed, int trajectory_index);

// Everything run_ensemble needs besides the noise settings. The initial state
// of every trajectory is the ground state of the first segment's entry drive,
// computed in that trajectory's own (possibly fluctuated) potential.
struct EnsembleConfig {
  SystemParams params;     // nominal working point
  DriveSchedule schedule;  // fixed lab program, timed in seconds
  int n_points = 1024;
  double dt = 0.0;            // seconds per step; 0 derives from dt_fraction
  double dt_fraction = 0.02;  // of 1/omega_ref
  // Reference trap frequency, rad/s. 0 = the largest harmonic frequency over
  // the schedule's segment endpoint drives. Also sets the phase-space scale
  // for min_variance_ratio, shared by all trajectories.
  double omega_ref = 0.0;
  long long sample_stride = 1;
  double ground_state_tol = 1e-9;
  bool strict = false;
  // Trajectories run on this many threads. Results are aggregated in
  // trajectory order, so the statistics are bitwise identical for any count.
  int n_workers = 1;
};

// Across-trajectory mean and standard error per sample time, field by field.
// mean[k] and std_error[k] reuse the TrajectorySample layout; time carries the
// shared sample time. Angles are averaged raw, so a squeeze_angle ensemble
// straddling the 0/pi wrap needs care downstream.
struct EnsembleStats {
  std::vector<double> times;  // seconds
  std::vector<TrajectorySample> mean;
  std::vector<TrajectorySample> std_error;
  int n_requested = 0;
  int n_succeeded = 0;
  double omega_ref = 0.0;  // rad/s actually used
  double dt = 0.0;         // seconds actually used
  std::vector<std::string> failures;  // one entry per failed trajectory
  std::vector<std::string> warnings;
};

// Independent trajectories with per-trajectory atom number and intensity
// noise. Photon-noise variance uses the mean photon number at each segment
// entry (per step behind the config flag). Failures are collected, not fatal;
// only an ensemble with zero survivors throws.
EnsembleStats run_ensemble(const EnsembleConfig& config, const NoiseConfig& noise);

}  // namespace rotor
