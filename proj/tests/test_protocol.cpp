#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "rotor/analysis.hpp"
#include "rotor/dynamics.hpp"
#include "rotor/errors.hpp"
#include "rotor/protocol.hpp"

using namespace rotor;

namespace {

struct Kit {
  SystemParams params;
  RotorConstants constants;
};

Kit make_kit(double N, double q, double U0 = 0.0, double kappa = 1.0) {
  Kit k;
  k.params.N = N;
  k.params.c2 = N;  // t0 = 1, so seconds and dimensionless time coincide
  k.params.q = q;
  k.params.U0 = U0;
  k.params.kappa = kappa;
  k.constants = derive_constants(k.params);
  return k;
}

struct WorkingPoint {
  SystemParams params;
  RotorConstants constants;
  DrivePoint tight, wide;
  double f_tight = 0.0, f_wide = 0.0;
};

// Trap pair styled on the experimental numbers: wide trap is the bare rotor
// with the drive off, tight trap boosts the curvature with a resonant drive.
WorkingPoint default_working_point() {
  const double two_pi = 2.0 * M_PI;
  const double N = 1e4, kappa = two_pi * 1e6, ratio = 1e-3;
  WorkingPoint wp;
  wp.f_tight = two_pi * 43e3;
  wp.f_wide = two_pi * 7e3;

  const double chi1 = N + 1.5;
  const double beta = 8.0 * ratio * chi1;
  const double omega0 = std::sqrt(beta * (2.0 * chi1 + 8.0 * ratio * chi1));
  const double t0 = omega0 / wp.f_wide;
  const double U0 = 20.0 * kappa / N;
  const double c2 = N / t0;
  const double q = beta * c2 / N;
  const double boost = (wp.f_tight / wp.f_wide) * (wp.f_tight / wp.f_wide);

  wp.params.N = N;
  wp.params.c2 = c2;
  wp.params.q = q;
  wp.params.U0 = U0;
  wp.params.kappa = kappa;
  wp.constants = derive_constants(wp.params);
  wp.tight = {0.5 * kappa * std::sqrt((boost - 1.0) * q / U0), 0.0};
  wp.wide = {0.0, -U0 * N};
  return wp;
}

double omega_bare(const RotorConstants& c) {
  return std::sqrt(c.beta * (2.0 * c.chi1 + 8.0 * c.chi2));
}

// Deep cavity kit with an exact 2:1 trap frequency ratio.
const Kit kCavity = make_kit(2e4, 48.0, 1.0, 1000.0);
const DrivePoint kTight{6000.0, 0.0};  // curvature scale 1 + 36e6/(48*250e3) = 4
const DrivePoint kWide{0.0, 0.0};

RotorState tight_ground_state(int n) {
  const AngularGrid g = AngularGrid::make(n);
  return ground_state(g, sample_effective_potential(g, kCavity.constants, kTight, kCavity.params),
                      kCavity.constants, 1e-10);
}

}  // namespace

TEST_CASE("harmonic frequency from the bare well curvature") {
  // Hand-built constants with chi2 = 0: omega = sqrt(2 q chi1 / I), here
  // beta = q I, t0 = I (hbar = 1).
  RotorConstants c;
  c.chi1 = 5.0;
  c.chi2 = 0.0;
  c.beta = 12.0;  // q = 3, I = 4
  c.t0 = 4.0;
  SystemParams p;
  p.q = 3.0;
  CHECK(harmonic_frequency(DrivePoint{}, c, p) ==
        doctest::Approx(std::sqrt(2.0 * 3.0 * 5.0 / 4.0)).epsilon(1e-14));
}

TEST_CASE("harmonic frequency matches the sampled effective curvature") {
  const Kit kit = make_kit(100.0, 20.0, 1.0, 1000.0);
  const DrivePoint d{800.0, -300.0};
  const double omega = harmonic_frequency(d, kit.constants, kit.params);

  const double h = 1e-4;
  const double vpp = (effective_potential(h, kit.constants, d, kit.params) -
                      2.0 * effective_potential(0.0, kit.constants, d, kit.params) +
                      effective_potential(-h, kit.constants, d, kit.params)) /
                     (h * h);
  const double omega_fd = std::sqrt(kit.constants.beta * vpp) / kit.constants.t0;
  CHECK(omega == doctest::Approx(omega_fd).epsilon(1e-6));
}

TEST_CASE("scaling the potential scales the frequency by its square root") {
  const Kit kit = make_kit(100.0, 20.0, 1.0, 1000.0);
  const DrivePoint d{800.0, -300.0};
  const double base = harmonic_frequency(d, kit.constants, kit.params);
  RotorConstants scaled = kit.constants;
  scaled.beta *= 2.25;
  CHECK(harmonic_frequency(d, scaled, kit.params) ==
        doctest::Approx(1.5 * base).epsilon(1e-12));
}

TEST_CASE("working point lands on the designed trap frequencies") {
  const WorkingPoint wp = default_working_point();
  CHECK(harmonic_frequency(wp.wide, wp.constants, wp.params) ==
        doctest::Approx(wp.f_wide).epsilon(1e-12));
  CHECK(harmonic_frequency(wp.tight, wp.constants, wp.params) ==
        doctest::Approx(wp.f_tight).epsilon(1e-12));
}

TEST_CASE("harmonic frequency rejects flat or inverted wells") {
  const Kit free_rotor = make_kit(100.0, 0.0);
  CHECK_THROWS_AS(harmonic_frequency(DrivePoint{}, free_rotor.constants, free_rotor.params),
                  NumericalError);
  CHECK_THROWS_AS(harmonic_frequency(DrivePoint{1.0, 0.0}, free_rotor.constants,
                                     free_rotor.params),
                  NumericalError);

  Kit no_cavity = make_kit(100.0, 8.0);
  no_cavity.params.kappa = 0.0;
  CHECK_THROWS_AS(harmonic_frequency(DrivePoint{1.0, 0.0}, no_cavity.constants,
                                     no_cavity.params),
                  ConfigError);

  // Attractive-to-repulsive coupling strong enough to invert the curvature.
  const Kit blue = make_kit(100.0, 8.0, -1.0, 10.0);
  CHECK_THROWS_AS(harmonic_frequency(DrivePoint{20.0, 0.0}, blue.constants, blue.params),
                  NumericalError);
}

TEST_CASE("squeeze schedule layout") {
  SqueezeProtocolSpec spec;
  spec.n_cycles = 1;
  spec.omega_tight = 4.0;
  spec.omega_wide = 1.0;
  spec.switch_time = 0.01;
  spec.drive_tight = {9.0, -2.0};
  spec.drive_wide = {0.0, 0.0};

  const DriveSchedule s = make_squeeze_schedule(spec);
  REQUIRE(s.segments.size() == 4);
  CHECK(s.segments[0].shape == SegmentShape::smoothstep);
  CHECK(s.segments[0].duration == 0.01);
  CHECK(s.segments[1].shape == SegmentShape::constant);
  CHECK(s.segments[1].duration == doctest::Approx(M_PI / 2.0));
  CHECK(s.segments[2].shape == SegmentShape::smoothstep);
  CHECK(s.segments[3].duration == doctest::Approx(M_PI / 8.0));

  // Contiguity: each segment starts where the previous one ended, the first
  // leaves the tight trap the caller prepared in.
  CHECK(s.segments[0].start.eta == 9.0);
  for (size_t i = 1; i < s.segments.size(); ++i) {
    CHECK(s.segments[i].start.eta == s.segments[i - 1].end.eta);
    CHECK(s.segments[i].start.delta == s.segments[i - 1].end.delta);
  }
  CHECK(s.segments[3].end.eta == 9.0);

  double sum = 0.0;
  for (const auto& seg : s.segments) sum += seg.duration;
  CHECK(s.total_duration() == sum);

  spec.n_cycles = 0;
  const DriveSchedule empty = make_squeeze_schedule(spec);
  CHECK(empty.segments.empty());
  CHECK(empty.total_duration() == 0.0);

  spec.n_cycles = 3;
  CHECK(make_squeeze_schedule(spec).segments.size() == 12);
}

TEST_CASE("five cycles at the experimental frequencies take around 200 us") {
  const WorkingPoint wp = default_working_point();
  SqueezeProtocolSpec spec;
  spec.n_cycles = 5;
  spec.omega_tight = wp.f_tight;
  spec.omega_wide = wp.f_wide;
  spec.switch_time = 1e-6;
  spec.drive_tight = wp.tight;
  spec.drive_wide = wp.wide;

  const double total = make_squeeze_schedule(spec).total_duration();
  CHECK(total > 150e-6);
  CHECK(total < 250e-6);
  // No warning: 1 us against a 3.7 us tight period still counts as fast.
  std::vector<std::string> warnings;
  make_squeeze_schedule(spec, &warnings);
  CHECK(warnings.empty());
}

TEST_CASE("squeeze schedule validation and slow-switch warning") {
  SqueezeProtocolSpec spec;
  spec.n_cycles = 1;
  spec.omega_tight = 1.0;
  spec.omega_wide = 2.0;
  CHECK_THROWS_AS(make_squeeze_schedule(spec), ConfigError);
  spec.omega_wide = 1.0;
  CHECK_THROWS_AS(make_squeeze_schedule(spec), ConfigError);  // needs contrast
  spec.omega_tight = 4.0;
  spec.switch_time = -1.0;
  CHECK_THROWS_AS(make_squeeze_schedule(spec), ConfigError);
  spec.switch_time = 0.0;
  spec.n_cycles = -1;
  CHECK_THROWS_AS(make_squeeze_schedule(spec), ConfigError);

  spec.n_cycles = 1;
  spec.switch_time = 1.0;  // a quarter of the tight period: not diabatic
  std::vector<std::string> warnings;
  make_squeeze_schedule(spec, &warnings);
  REQUIRE(warnings.size() == 1);
}

TEST_CASE("splitting a hold does not change the evolved state") {
  const double omega_t = harmonic_frequency(kTight, kCavity.constants, kCavity.params);
  const double omega_w = harmonic_frequency(kWide, kCavity.constants, kCavity.params);

  SqueezeProtocolSpec spec;
  spec.n_cycles = 1;
  spec.omega_tight = omega_t;
  spec.omega_wide = omega_w;
  spec.switch_time = 0.0;
  spec.drive_tight = kTight;
  spec.drive_wide = kWide;

  const DriveSchedule whole = make_squeeze_schedule(spec);
  DriveSchedule split = whole;
  Segment& hold = split.segments[1];
  const double half = 0.5 * hold.duration;
  hold.duration = half;
  split.segments.insert(split.segments.begin() + 2, hold);
  REQUIRE(split.segments.size() == 5);

  const RotorState start = tight_ground_state(1024);
  EvolveOptions opt;
  opt.dt = 0.01 / omega_t;
  const RotorState a = evolve(start, whole, kCavity.constants, kCavity.params, opt).final_state;
  const RotorState b = evolve(start, split, kCavity.constants, kCavity.params, opt).final_state;

  double diff = 0.0;
  for (int j = 0; j < a.grid.n_points; ++j)
    diff = std::max(diff, std::abs(a.amplitudes[j] - b.amplitudes[j]));
  CHECK(diff <= 1e-12);
}

TEST_CASE("projection onto the same trap keeps all weight in the ground state") {
  const AngularGrid g = AngularGrid::make(512);
  const std::vector<double> v = sample_bare_potential(g, kCavity.constants);
  const RotorState gs = ground_state(g, v, kCavity.constants, 1e-10);
  const DiabaticityReport r = diabaticity_report(gs, v, kCavity.constants, 4);
  REQUIRE(r.weights.size() == 4);
  CHECK(r.weights[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.residual < 1e-9);
}

TEST_CASE("tight-to-wide projection matches the gaussian overlap law") {
  // Frequencies differ by exactly 2, so lambda = (2-1)/(2+1) = 1/3 and the
  // even weights are w_{2m} = ((2m)!/(4^m m!^2)) sqrt(1-lambda^2) lambda^(2m).
  const AngularGrid g = AngularGrid::make(512);
  const RotorState tight_gs =
      ground_state(g, sample_effective_potential(g, kCavity.constants, kTight, kCavity.params),
                   kCavity.constants, 1e-10);
  const std::vector<double> wide_v = sample_bare_potential(g, kCavity.constants);
  const DiabaticityReport r = diabaticity_report(tight_gs, wide_v, kCavity.constants, 6);
  REQUIRE(r.weights.size() == 6);

  const double lambda = 1.0 / 3.0;
  const double root = std::sqrt(1.0 - lambda * lambda);
  CHECK(r.weights[0] == doctest::Approx(root).epsilon(1e-2));
  CHECK(r.weights[2] == doctest::Approx(0.5 * root * lambda * lambda).epsilon(1e-2));
  CHECK(r.weights[4] ==
        doctest::Approx(0.375 * root * lambda * lambda * lambda * lambda).epsilon(1e-2));

  // Parity selection: the projection cannot populate odd states.
  CHECK(r.weights[1] < 1e-10);
  CHECK(r.weights[3] < 1e-10);
  CHECK(r.weights[5] < 1e-10);

  double sum = r.residual;
  for (double w : r.weights) sum += w;
  CHECK(sum <= 1.0 + 1e-10);
  CHECK(r.residual < 1e-3);

  CHECK_THROWS_AS(diabaticity_report(tight_gs, wide_v, kCavity.constants, 1), ConfigError);
}

TEST_CASE("covariance oracle follows the closed-form cycle map") {
  SqueezeProtocolSpec spec;
  spec.n_cycles = 4;
  spec.omega_tight = 40.0;
  spec.omega_wide = 15.0;

  RotorConstants c;
  c.t0 = 0.25;  // dimensionless frequencies 10 and 3.75
  const std::vector<Covariance2> cycles = gaussian_covariance_oracle(spec, c);
  REQUIRE(cycles.size() == 4);

  const double w1 = 10.0;
  const double r = 3.75 / 10.0;
  double ratio = 1.0;
  for (int n = 0; n < 4; ++n) {
    ratio *= r * r;
    CHECK(cycles[n].var_theta == doctest::Approx(0.5 / w1 * ratio).epsilon(1e-12));
    CHECK(cycles[n].var_l == doctest::Approx(0.5 * w1 / ratio).epsilon(1e-12));
    CHECK(cycles[n].covar == 0.0);
    const double det =
        cycles[n].var_theta * cycles[n].var_l - cycles[n].covar * cycles[n].covar;
    CHECK(det == doctest::Approx(0.25).epsilon(1e-12));
  }

  // Equal frequencies: allowed here, and nothing happens.
  spec.omega_wide = spec.omega_tight;
  for (const Covariance2& cc : gaussian_covariance_oracle(spec, c)) {
    CHECK(cc.var_theta == doctest::Approx(0.5 / w1).epsilon(1e-12));
    CHECK(cc.var_l == doctest::Approx(0.5 * w1).epsilon(1e-12));
  }

  spec.omega_wide = 50.0;
  CHECK_THROWS_AS(gaussian_covariance_oracle(spec, c), ConfigError);
  spec.omega_wide = 15.0;
  spec.n_cycles = 0;
  CHECK(gaussian_covariance_oracle(spec, c).empty());
}

TEST_CASE("simulated protocol reproduces the oracle and keeps squeezing") {
  // Multi-cycle fidelity needs ideal conditions on three counts: a deep well
  // (small angular spread), gentle contrast (the anti-squeezed quadrature
  // grows by (w1/w2)^2 per cycle and eventually probes the sin^2 flattening),
  // and a wide cavity line, or the dispersive shift U0 V saturates the
  // arctan and the tight trap itself turns anharmonic.
  const Kit kit = make_kit(2e5, 48.0, 1.0, 1e5);
  const DrivePoint tight{std::sqrt(1.25 * 48.0 * 0.25 * 1e10), 0.0};  // ratio exactly 3:2
  const DrivePoint wide{0.0, 0.0};
  const double omega_t = harmonic_frequency(tight, kit.constants, kit.params);
  const double omega_w = harmonic_frequency(wide, kit.constants, kit.params);
  REQUIRE(omega_t == doctest::Approx(1.5 * omega_w).epsilon(1e-12));
  REQUIRE(omega_w == doctest::Approx(omega_bare(kit.constants)).epsilon(1e-12));

  SqueezeProtocolSpec spec;
  spec.n_cycles = 3;
  spec.omega_tight = omega_t;
  spec.omega_wide = omega_w;
  spec.switch_time = 0.0;
  spec.drive_tight = tight;
  spec.drive_wide = wide;
  const DriveSchedule sched = make_squeeze_schedule(spec);
  const std::vector<Covariance2> oracle = gaussian_covariance_oracle(spec, kit.constants);

  const AngularGrid g = AngularGrid::make(4096);
  const RotorState start = ground_state(
      g, sample_effective_potential(g, kit.constants, tight, kit.params), kit.constants, 1e-10);

  const double cycle_tau = 0.5 * M_PI * (1.0 / omega_w + 1.0 / omega_t);
  EvolveOptions opt;
  opt.dt = 0.005 / omega_t;
  opt.snapshot_taus = {cycle_tau, 2.0 * cycle_tau};
  const Trajectory traj = evolve(start, sched, kit.constants, kit.params, opt);
  REQUIRE(traj.snapshots.size() == 2);

  const MomentReport after1 = moments(traj.snapshots[0], omega_t);
  CHECK(after1.var_theta == doctest::Approx(oracle[0].var_theta).epsilon(2e-2));
  CHECK(after1.var_l == doctest::Approx(oracle[0].var_l).epsilon(2e-2));
  CHECK(std::abs(after1.covar_theta_l) <
        0.05 * std::sqrt(after1.var_theta * after1.var_l));

  const MomentReport after2 = moments(traj.snapshots[1], omega_t);
  const MomentReport after3 = moments(traj.final_state, omega_t);
  CHECK(after1.min_variance_ratio < 1.0);
  CHECK(after2.min_variance_ratio < after1.min_variance_ratio);
  CHECK(after3.min_variance_ratio < after2.min_variance_ratio);
}
