#include "rotor/dynamics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>

#include "rotor/errors.hpp"
#include "rotor/fft.hpp"

namespace rotor {

namespace {

std::vector<std::complex<double>> build_kick(const std::vector<double>& potential, double beta,
                                             double dt) {
  std::vector<std::complex<double>> kick(potential.size());
  const double half = 0.5 * dt;
  for (size_t j = 0; j < potential.size(); ++j)
    kick[j] = std::polar(1.0, -beta * potential[j] * half);
  return kick;
}

std::vector<std::complex<double>> build_kinetic(const AngularGrid& grid, double dt) {
  std::vector<std::complex<double>> phase(grid.wavenumbers.size());
  for (size_t f = 0; f < phase.size(); ++f) {
    const double l = grid.wavenumbers[f];
    phase[f] = std::polar(1.0, -0.5 * l * l * dt);
  }
  return phase;
}

void apply_strang(RotorState& state, const std::vector<std::complex<double>>& kick,
                  const std::vector<std::complex<double>>& kinetic) {
  auto& a = state.amplitudes;
  for (size_t j = 0; j < a.size(); ++j) a[j] *= kick[j];
  fft::forward(a);
  for (size_t f = 0; f < a.size(); ++f) a[f] *= kinetic[f];
  fft::inverse(a);
  for (size_t j = 0; j < a.size(); ++j) a[j] *= kick[j];
}

void check_sizes(const RotorState& state, const std::vector<double>& potential) {
  if (state.grid.n_points <= 0 || state.amplitudes.size() != potential.size() ||
      static_cast<int>(potential.size()) != state.grid.n_points)
    throw ConfigError("dynamics: potential samples do not match the state grid");
}

// Curvature estimate at the well bottom for relaxation step sizing.
double curvature_frequency(const std::vector<double>& potential, const AngularGrid& grid,
                           double beta) {
  const int n = grid.n_points;
  const int c = n / 2;  // theta = 0 lands exactly on the grid
  const double d2 = (potential[(c + 1) % n] - 2.0 * potential[c] + potential[(c - 1 + n) % n]) /
                    (grid.spacing() * grid.spacing());
  const double w2 = beta * d2;
  return w2 > 0.0 ? std::sqrt(w2) : 1.0;
}

}  // namespace

std::vector<double> sample_bare_potential(const AngularGrid& grid, const RotorConstants& k) {
  std::vector<double> v(grid.n_points);
  for (int j = 0; j < grid.n_points; ++j) v[j] = bare_potential(grid.theta_values[j], k);
  return v;
}

std::vector<double> sample_effective_potential(const AngularGrid& grid, const RotorConstants& k,
                                               const DrivePoint& drive,
                                               const SystemParams& params) {
  std::vector<double> v(grid.n_points);
  for (int j = 0; j < grid.n_points; ++j)
    v[j] = effective_potential(grid.theta_values[j], k, drive, params);
  return v;
}

double state_energy(const RotorState& state, const std::vector<double>& potential,
                    const RotorConstants& constants) {
  check_sizes(state, potential);
  double pot = 0.0, den = 0.0;
  for (size_t j = 0; j < state.amplitudes.size(); ++j) {
    const double w = std::norm(state.amplitudes[j]);
    pot += w * potential[j];
    den += w;
  }
  std::vector<std::complex<double>> spec = state.amplitudes;
  fft::forward(spec);
  double kin = 0.0, sden = 0.0;
  for (size_t f = 0; f < spec.size(); ++f) {
    const double w = std::norm(spec[f]);
    const double l = state.grid.wavenumbers[f];
    kin += 0.5 * l * l * w;
    sden += w;
  }
  return kin / sden + constants.beta * pot / den;
}

StationaryStates stationary_states(const AngularGrid& grid, const std::vector<double>& potential,
                                   const RotorConstants& constants, int k) {
  if (grid.n_points > 4096)
    throw ConfigError("stationary_states: grid too large for a dense solve (max 4096)");
  if (k < 1 || k > grid.n_points / 4)
    throw ConfigError("stationary_states: requested count must be in [1, n_points/4]");
  if (static_cast<int>(potential.size()) != grid.n_points)
    throw ConfigError("stationary_states: potential samples do not match the grid");

  const int n = grid.n_points;
  Eigen::MatrixXd H(n, n);

  // Kinetic block by applying the spectral operator to each basis vector.
  std::vector<std::complex<double>> col(n);
  for (int j = 0; j < n; ++j) {
    std::fill(col.begin(), col.end(), std::complex<double>(0.0, 0.0));
    col[j] = 1.0;
    fft::forward(col);
    for (int f = 0; f < n; ++f) {
      const double l = grid.wavenumbers[f];
      col[f] *= 0.5 * l * l;
    }
    fft::inverse(col);
    for (int i = 0; i < n; ++i) H(i, j) = col[i].real();
  }
  H = 0.5 * (H + H.transpose()).eval();
  for (int j = 0; j < n; ++j) H(j, j) += constants.beta * potential[j];

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H);
  if (solver.info() != Eigen::Success)
    throw NumericalError("stationary_states: eigensolver failed to converge");

  StationaryStates out;
  out.energies.resize(k);
  out.states.reserve(k);
  const double scale = 1.0 / std::sqrt(grid.spacing());
  for (int i = 0; i < k; ++i) {
    out.energies[i] = solver.eigenvalues()(i);
    RotorState s;
    s.grid = grid;
    s.amplitudes.resize(n);
    // Fix the overall sign by the largest component.
    int arg = 0;
    for (int j = 1; j < n; ++j)
      if (std::abs(solver.eigenvectors()(j, i)) > std::abs(solver.eigenvectors()(arg, i))) arg = j;
    const double sign = solver.eigenvectors()(arg, i) >= 0.0 ? 1.0 : -1.0;
    for (int j = 0; j < n; ++j) s.amplitudes[j] = sign * scale * solver.eigenvectors()(j, i);
    out.states.push_back(std::move(s));
  }
  return out;
}

RotorState ground_state(const AngularGrid& grid, const std::vector<double>& potential,
                        const RotorConstants& constants, double tol) {
  if (!(tol > 0.0)) throw ConfigError("ground_state: tolerance must be positive");
  if (static_cast<int>(potential.size()) != grid.n_points)
    throw ConfigError("ground_state: potential samples do not match the grid");

  RotorState state = uniform_state(grid);
  const double omega = curvature_frequency(potential, grid, constants.beta);

  // Staged relaxation: the split-operator fixed point at imaginary step dtau
  // carries an O((omega*dtau)^2) bias, so finish on a step small enough for
  // the requested tolerance.
  std::vector<double> stages = {0.5, 0.1, 0.02};
  const double target = std::sqrt(24.0 * tol);
  while (stages.back() > target && stages.size() < 8) stages.push_back(stages.back() / 5.0);

  long long spent = 0;
  const long long max_iters = 200000;
  double energy = state_energy(state, potential, constants);
  for (size_t stage = 0; stage < stages.size(); ++stage) {
    const double dtau = stages[stage] / omega;
    std::vector<double> decay(grid.n_points);
    const double half = 0.5 * dtau;
    for (int j = 0; j < grid.n_points; ++j)
      decay[j] = std::exp(-constants.beta * potential[j] * half);
    std::vector<double> kin(grid.n_points);
    for (int f = 0; f < grid.n_points; ++f) {
      const double l = grid.wavenumbers[f];
      kin[f] = std::exp(-0.5 * l * l * dtau);
    }
    const bool last = stage + 1 == stages.size();
    const double bias = stages[stage] * stages[stage] / 24.0;
    const double goal = last ? 0.3 * tol : 0.03 * bias;
    // A 25-step block only closes this fraction of the remaining gap, so the
    // per-block energy change must be compared against goal * rate.
    const double rate = -std::expm1(-100.0 * omega * dtau);
    const double thresh = goal * rate;

    bool settled = false;
    while (!settled) {
      for (int it = 0; it < 25; ++it) {
        auto& a = state.amplitudes;
        for (int j = 0; j < grid.n_points; ++j) a[j] *= decay[j];
        fft::forward(a);
        for (int f = 0; f < grid.n_points; ++f) a[f] *= kin[f];
        fft::inverse(a);
        for (int j = 0; j < grid.n_points; ++j) a[j] *= decay[j];
        state.normalize();
      }
      spent += 25;
      const double next = state_energy(state, potential, constants);
      settled = std::abs(next - energy) < thresh * std::max(1.0, std::abs(next));
      energy = next;
      if (spent > max_iters)
        throw NumericalError("ground_state: relaxation did not converge");
    }
  }
  state.time = 0.0;
  return state;
}

void step(RotorState& state, const std::vector<double>& potential,
          const RotorConstants& constants, double dt) {
  check_sizes(state, potential);
  if (dt == 0.0 || !std::isfinite(dt)) throw ConfigError("step: dt must be finite and nonzero");
  const auto kick = build_kick(potential, constants.beta, dt);
  const auto kinetic = build_kinetic(state.grid, dt);
  apply_strang(state, kick, kinetic);
  state.time += dt;
}

double DriveSchedule::total_duration() const {
  double t = 0.0;
  for (const auto& s : segments) t += s.duration;
  return t;
}

DrivePoint interpolate(const Segment& seg, double u) {
  switch (seg.shape) {
    case SegmentShape::constant:
      return seg.start;
    case SegmentShape::linear:
      break;
    case SegmentShape::smoothstep:
      u = u * u * (3.0 - 2.0 * u);
      break;
  }
  DrivePoint d;
  d.eta = seg.start.eta + u * (seg.end.eta - seg.start.eta);
  d.delta = seg.start.delta + u * (seg.end.delta - seg.start.delta);
  return d;
}

CompiledSchedule compile_schedule(const DriveSchedule& schedule, const RotorConstants& constants,
                                  double dt, bool strict, std::vector<std::string>* warnings) {
  if (!(dt > 0.0)) throw ConfigError("compile_schedule: dt must be positive");
  CompiledSchedule c;
  c.dt = dt;
  double cum = 0.0;
  long long prev = 0;
  for (size_t s = 0; s < schedule.segments.size(); ++s) {
    const Segment& seg = schedule.segments[s];
    if (!(seg.duration >= 0.0))
      throw ConfigError("compile_schedule: segment durations must be non-negative");
    const double len = seg.duration / constants.t0;
    c.tau_starts.push_back(cum);
    c.tau_lengths.push_back(len);
    cum += len;
    const long long b = std::llround(cum / dt);
    const long long steps = b - prev;
    if (len > 0.0 && steps == 0) {
      const std::string msg = "schedule segment " + std::to_string(s) +
                              " is shorter than half a time step and is treated as instantaneous";
      if (strict) throw NumericalError("compile_schedule: " + msg);
      if (warnings) warnings->push_back(msg);
    }
    c.steps_per_segment.push_back(steps);
    prev = b;
  }
  c.total_steps = prev;
  c.total_tau = cum;
  return c;
}

DrivePoint drive_at(const DriveSchedule& schedule, const CompiledSchedule& compiled, double tau) {
  const auto& segs = schedule.segments;
  for (size_t s = 0; s < segs.size(); ++s) {
    const double len = compiled.tau_lengths[s];
    if (len > 0.0 && tau < compiled.tau_starts[s] + len) {
      const double u = std::clamp((tau - compiled.tau_starts[s]) / len, 0.0, 1.0);
      return interpolate(segs[s], u);
    }
  }
  if (segs.empty()) return DrivePoint{};
  return interpolate(segs.back(), 1.0);
}

Trajectory evolve(const RotorState& initial, const DriveSchedule& schedule,
                  const RotorConstants& constants, const SystemParams& params,
                  const EvolveOptions& options) {
  if (!(options.dt > 0.0)) throw ConfigError("evolve: dt must be positive");
  if (options.noise_path && options.noise_source)
    throw ConfigError("evolve: give either a noise path or a noise source, not both");

  Trajectory traj;
  const CompiledSchedule compiled =
      compile_schedule(schedule, constants, options.dt, options.strict, &traj.warnings);
  if (options.noise_path &&
      static_cast<long long>(options.noise_path->size()) != compiled.total_steps)
    throw ConfigError("evolve: noise path length does not match the schedule step count");

  RotorState state = initial;
  const double t_start = initial.time;
  const double dt = options.dt;

  // Snapshot requests resolved to step indices up front.
  std::multimap<long long, size_t> snapshot_at;
  for (size_t i = 0; i < options.snapshot_taus.size(); ++i) {
    long long k = std::llround((options.snapshot_taus[i] - t_start) / dt);
    k = std::clamp<long long>(k, 0, compiled.total_steps);
    snapshot_at.emplace(k, i);
  }
  traj.snapshot_times.resize(options.snapshot_taus.size(), t_start);
  traj.snapshots.resize(options.snapshot_taus.size());
  auto capture = [&](long long k) {
    auto range = snapshot_at.equal_range(k);
    for (auto it = range.first; it != range.second; ++it) {
      traj.snapshot_times[it->second] = state.time;
      traj.snapshots[it->second] = state;
    }
  };

  const bool sampling = static_cast<bool>(options.sampler) && options.sample_stride > 0;
  auto record = [&](long long k, double factor) {
    if (!sampling) return;
    TrajectorySample s;
    s.tau = t_start + k * dt;
    s.time = s.tau * constants.t0;
    const DrivePoint d = drive_at(schedule, compiled, k * dt);
    s.eta = d.eta;
    s.delta = d.delta;
    s.noise_factor = factor;
    options.sampler(state, d, factor, s);
    traj.samples.push_back(s);
  };

  const auto kinetic = build_kinetic(state.grid, dt);
  std::vector<double> veff;
  std::vector<std::complex<double>> kick;
  DrivePoint cached_drive;
  bool cache_valid = false;

  long long k = 0;
  record(0, 1.0);
  capture(0);
  for (size_t s = 0; s < schedule.segments.size(); ++s) {
    const long long n = compiled.steps_per_segment[s];
    if (n == 0) continue;
    const Segment& seg = schedule.segments[s];
    const double len = compiled.tau_lengths[s];

    std::vector<double> seg_factors;
    if (options.noise_source) {
      const DrivePoint entry = drive_at(schedule, compiled, compiled.tau_starts[s]);
      seg_factors = options.noise_source(static_cast<int>(s), n, state, entry);
      if (static_cast<long long>(seg_factors.size()) != n)
        throw ConfigError("evolve: noise source returned a wrong-length segment");
    }

    for (long long i = 0; i < n; ++i, ++k) {
      const double tau_mid = (k + 0.5) * dt;
      const double u = std::clamp((tau_mid - compiled.tau_starts[s]) / len, 0.0, 1.0);
      DrivePoint d = interpolate(seg, u);
      double factor = options.noise_path  ? (*options.noise_path)[k]
                      : !seg_factors.empty() ? seg_factors[i]
                                             : 1.0;
      if (factor != 1.0 && options.noise_deviation_scale)
        factor = std::max(0.0, 1.0 + (factor - 1.0) * options.noise_deviation_scale(state, d));
      d.eta *= std::sqrt(factor);
      if (!cache_valid || d.eta != cached_drive.eta || d.delta != cached_drive.delta) {
        veff = sample_effective_potential(state.grid, constants, d, params);
        kick = build_kick(veff, constants.beta, dt);
        cached_drive = d;
        cache_valid = true;
      }
      apply_strang(state, kick, kinetic);
      state.time = t_start + (k + 1) * dt;
      const long long done = k + 1;
      if (sampling && (done % options.sample_stride == 0 || done == compiled.total_steps))
        record(done, factor);
      capture(done);
    }
  }
  traj.final_state = std::move(state);
  return traj;
}

std::vector<ClassicalPoint> ehrenfest_reference(const ClassicalPoint& start,
                                                const DriveSchedule& schedule,
                                                const RotorConstants& constants,
                                                const SystemParams& params, double dt) {
  const CompiledSchedule compiled = compile_schedule(schedule, constants, dt);
  std::vector<ClassicalPoint> out;
  out.reserve(compiled.total_steps + 1);
  out.push_back(start);

  auto force = [&](double theta, double tau) {
    const DrivePoint d = drive_at(schedule, compiled, tau);
    return -constants.beta * effective_potential_gradient(theta, constants, d, params);
  };

  ClassicalPoint p = start;
  double acc = force(p.theta, 0.0);
  for (long long k = 0; k < compiled.total_steps; ++k) {
    p.theta += p.l_theta * dt + 0.5 * acc * dt * dt;
    const double acc_next = force(p.theta, (k + 1) * dt);
    p.l_theta += 0.5 * (acc + acc_next) * dt;
    acc = acc_next;
    out.push_back(p);
  }
  return out;
}

double default_time_step(double omega_max_dimensionless, double fraction) {
  if (!(omega_max_dimensionless > 0.0))
    throw ConfigError("default_time_step: frequency must be positive");
  return fraction / omega_max_dimensionless;
}

}  // namespace rotor
