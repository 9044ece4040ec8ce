#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rotor/model.hpp"
#include "rotor/schedule.hpp"
#include "rotor/state.hpp"
#include "rotor/trajectory.hpp"

namespace rotor {

// Potential samples are values of the (effective) potential on the grid, in
// well-depth units; the dimensionless Hamiltonian is l^2/2 + beta * V.
std::vector<double> sample_bare_potential(const AngularGrid& grid, const RotorConstants& k);
std::vector<double> sample_effective_potential(const AngularGrid& grid, const RotorConstants& k,
                                               const DrivePoint& drive, const SystemParams& params);

struct StationaryStates {
  std::vector<double> energies;  // ascending, dimensionless
  std::vector<RotorState> states;
};

// Dense diagonalization of the discretized Hamiltonian; k lowest pairs.
StationaryStates stationary_states(const AngularGrid& grid, const std::vector<double>& potential,
                                   const RotorConstants& constants, int k);

// Imaginary-time split-operator relaxation to the lowest state.
RotorState ground_state(const AngularGrid& grid, const std::vector<double>& potential,
                        const RotorConstants& constants, double tol = 1e-9);

double state_energy(const RotorState& state, const std::vector<double>& potential,
                    const RotorConstants& constants);

// One Strang step: half kick, full kinetic, half kick. dt is dimensionless;
// a negative dt propagates backwards.
void step(RotorState& state, const std::vector<double>& potential,
          const RotorConstants& constants, double dt);

// Per-segment intensity factors, one per step. Called when the propagator
// enters a segment, with the state and drive at that instant.
using NoiseSourceFn = std::function<std::vector<double>(
    int segment_index, long long n_steps, const RotorState& entry_state, const DrivePoint& entry_drive)>;

struct EvolveOptions {
  double dt = 0.0;  // dimensionless, required > 0
  const std::vector<double>* noise_path = nullptr;  // per-step factors, full length
  NoiseSourceFn noise_source;                       // alternative to noise_path
  // Optional per-step rescaling of the noise deviation: the applied factor is
  // 1 + (factor - 1) * scale(state, nominal_drive), floored at 0. Lets a noise
  // source drawn against segment-entry statistics track the instantaneous
  // state. Never called when the factor is exactly 1.
  std::function<double(const RotorState&, const DrivePoint&)> noise_deviation_scale;
  SampleFn sampler;
  long long sample_stride = 1;        // record every this many steps ( <=0 disables)
  std::vector<double> snapshot_taus;  // absolute dimensionless times
  bool strict = false;                // promote schedule quantization warnings to errors
};

// Step counts per segment from cumulative rounding, so that concatenating
// schedule pieces never shifts the global step lattice.
struct CompiledSchedule {
  double dt = 0.0;
  std::vector<long long> steps_per_segment;
  std::vector<double> tau_starts;  // schedule-local, segment entry times
  std::vector<double> tau_lengths;
  long long total_steps = 0;
  double total_tau = 0.0;
};

CompiledSchedule compile_schedule(const DriveSchedule& schedule, const RotorConstants& constants,
                                  double dt, bool strict = false,
                                  std::vector<std::string>* warnings = nullptr);

// Drive at schedule-local time tau (right-continuous at boundaries, left
// limit at the very end).
DrivePoint drive_at(const DriveSchedule& schedule, const CompiledSchedule& compiled, double tau);

Trajectory evolve(const RotorState& initial, const DriveSchedule& schedule,
                  const RotorConstants& constants, const SystemParams& params,
                  const EvolveOptions& options);

struct ClassicalPoint {
  double theta = 0.0;
  double l_theta = 0.0;
};

// Velocity-Verlet integration of the classical limit: theta'' = -beta dV_eff/dtheta,
// dimensionless time. Returns one point per step, initial included.
std::vector<ClassicalPoint> ehrenfest_reference(const ClassicalPoint& start,
                                                const DriveSchedule& schedule,
                                                const RotorConstants& constants,
                                                const SystemParams& params, double dt);

// Step size heuristic: a fixed fraction of the fastest trap period.
double default_time_step(double omega_max_dimensionless, double fraction = 0.02);

}  // namespace rotor
