#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rotor/model.hpp"
#include "rotor/schedule.hpp"
#include "rotor/stochastic.hpp"

namespace rotor {

// Config structs mirror the JSON file and keep its units (plain Hz,
// microseconds). Conversion to the library's rad/s and seconds happens in the
// to_* helpers, so parse -> serialize -> parse reproduces every number
// bit for bit.

struct DriveConfig {
  double pump_hz = 0.0;
  double detuning_hz = 0.0;

  DrivePoint to_drive() const;
};

struct SystemConfig {
  double atom_number = 1.0;
  double spin_coupling_hz = 0.0;     // c2 / 2pi
  double quadratic_shift_hz = 0.0;   // q / 2pi
  double cavity_coupling_hz = 0.0;   // U0 / 2pi
  double cavity_linewidth_hz = 0.0;  // kappa / 2pi

  SystemParams to_params() const;
};

struct GridConfig {
  int n_points = 1024;
};

struct EvolutionConfig {
  double dt_us = 0.0;  // 0 = derive from dt_fraction and the trap frequency
  double dt_fraction = 0.02;
  long long sample_stride = 16;
  double ground_state_tol = 1e-9;
};

// Bang-bang squeezing program built from two drive points.
struct ProtocolConfig {
  int n_cycles = 1;
  double switch_time_us = 1.0;
  DriveConfig tight;
  DriveConfig wide;
};

struct SegmentConfig {
  double duration_us = 0.0;
  std::string shape = "constant";
  DriveConfig from;
  DriveConfig to;  // defaults to `from` when the file omits it

  Segment to_segment() const;
};

struct NoiseSection {
  bool photon_noise = false;
  double atom_sigma_rel = 0.0;
  int trajectories = 1;
  std::string atom_scaling = "fixed_density";
  std::string atom_distribution = "gaussian";
  bool refresh_photon_noise_per_step = false;

  NoiseConfig to_noise(std::uint64_t seed) const;
};

struct ObserverSection {
  bool moments = true;
  bool g2 = true;
  std::vector<double> wigner_times_us;
  double wigner_l_max = 30.0;
  int wigner_n_l = 61;
};

struct CalibrationSection {
  double tight_hz = 0.0;
  double wide_hz = 0.0;
  double max_pump_hz = 1e9;
  bool rescale_system = true;
};

struct RunConfig {
  SystemConfig system;
  GridConfig grid;
  EvolutionConfig evolution;
  std::optional<ProtocolConfig> protocol;
  std::vector<SegmentConfig> schedule;  // empty = no explicit schedule
  NoiseSection noise;
  ObserverSection observers;
  std::optional<CalibrationSection> calibration;
  std::string input_state;
  std::string output_dir = "out";
  std::uint64_t seed = 1;
  bool strict = false;
};

// Throws ConfigError naming the offending key path on unknown keys, type
// mismatches and out-of-range values. A config may carry a protocol or an
// explicit schedule, not both.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config_file(const std::string& path);

// Canonical form: fixed key order, every field explicit. Feeding the output
// back through parse_config yields the identical configuration.
std::string serialize_config(const RunConfig& config);

}  // namespace rotor
