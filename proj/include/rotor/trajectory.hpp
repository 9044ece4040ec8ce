#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rotor/model.hpp"
#include "rotor/state.hpp"

namespace rotor {

// One observation record along a trajectory. The moment fields are filled by
// the sampler callback; the bookkeeping fields (times, drive, noise factor)
// by the propagator itself.
struct TrajectorySample {
  double time = 0.0;  // seconds
  double tau = 0.0;   // dimensionless

  double mean_theta = 0.0;
  double var_theta = 0.0;
  double mean_l = 0.0;
  double var_l = 0.0;
  double covar_theta_l = 0.0;
  double squeeze_angle = 0.0;
  double min_variance_ratio = 0.0;

  double mean_potential = 0.0;  // bare well-depth units
  double var_potential = 0.0;

  double eta = 0.0;
  double delta = 0.0;
  double noise_factor = 1.0;
  double n_photons = 0.0;
};

// Fills the moment fields of a sample from the current state and drive.
using SampleFn = std::function<void(const RotorState& state, const DrivePoint& drive,
                                    double noise_factor, TrajectorySample& out)>;

struct Trajectory {
  std::vector<TrajectorySample> samples;
  std::vector<double> snapshot_times;  // dimensionless
  std::vector<RotorState> snapshots;
  RotorState final_state;
  std::vector<std::string> warnings;
};

}  // namespace rotor
