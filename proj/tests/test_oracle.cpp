#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "rotor/errors.hpp"
#include "rotor/oracle.hpp"

using namespace rotor;

namespace {

// Exact sector content at q = 0: total spin F runs from N down in steps of 2,
// each value once in the lz = 0 sector, with energy (c2/N) F(F+1).
std::vector<double> algebraic_levels(int N, double c2) {
  std::vector<double> levels;
  for (int f = N % 2; f <= N; f += 2)
    levels.push_back(c2 / N * f * (f + 1.0));
  return levels;
}

}  // namespace

TEST_CASE("sector bases enumerate completely") {
  CHECK(make_fock_basis(1).dimension() == 1);
  CHECK(make_fock_basis(2).dimension() == 2);
  CHECK(make_fock_basis(7).dimension() == 4);
  CHECK(make_fock_basis(8).dimension() == 5);
  CHECK(make_fock_basis(100).dimension() == 51);

  const FockBasis two = make_fock_basis(2);
  REQUIRE(two.dimension() == 2);
  CHECK(two.states[0] == std::array<int, 3>{0, 2, 0});
  CHECK(two.states[1] == std::array<int, 3>{1, 0, 1});

  for (const auto& [n_plus, n_zero, n_minus] : make_fock_basis(9, -3).states) {
    CHECK(n_plus + n_zero + n_minus == 9);
    CHECK(n_plus - n_minus == -3);
    CHECK(n_zero >= 0);
  }
  CHECK(make_fock_basis(9, 3).dimension() == make_fock_basis(9, -3).dimension());
  CHECK(make_fock_basis(4, 4).dimension() == 1);

  CHECK_THROWS_AS(make_fock_basis(3, 4), ConfigError);
  CHECK_THROWS_AS(make_fock_basis(-1), ConfigError);
}

TEST_CASE("smallest sectors diagonalize by hand") {
  const Eigen::MatrixXd one = build_hamiltonian(make_fock_basis(1), 0.8, 0.3);
  REQUIRE(one.rows() == 1);
  CHECK(one(0, 0) == doctest::Approx(2.0 * 0.8 - 0.3).epsilon(1e-14));

  const std::vector<double> two = exact_spectrum(2, 1.7, 0.0);
  REQUIRE(two.size() == 2);
  CHECK(two[0] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(two[1] == doctest::Approx(3.0 * 1.7).epsilon(1e-12));
}

TEST_CASE("sector matrices are symmetric") {
  for (int lz : {0, 2, -5}) {
    const Eigen::MatrixXd h = build_hamiltonian(make_fock_basis(11, lz), 1.3, 0.45);
    CHECK((h - h.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("full-space assembly is block diagonal in the magnetization") {
  const int N = 5;
  const double c2 = 1.1, q = 0.35;

  std::vector<FockBasis> sectors;
  std::vector<int> offsets;
  int dim = 0;
  for (int lz = -N; lz <= N; ++lz) {
    offsets.push_back(dim);
    sectors.push_back(make_fock_basis(N, lz));
    dim += sectors.back().dimension();
  }
  CHECK(dim == (N + 1) * (N + 2) / 2);

  Eigen::MatrixXd raise = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd magnetization = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd n_zero = Eigen::MatrixXd::Zero(dim, dim);
  for (size_t s = 0; s < sectors.size(); ++s) {
    if (s + 1 < sectors.size())
      raise.block(offsets[s + 1], offsets[s], sectors[s + 1].dimension(),
                  sectors[s].dimension()) = raising_block(sectors[s + 1], sectors[s]);
    for (int j = 0; j < sectors[s].dimension(); ++j) {
      magnetization(offsets[s] + j, offsets[s] + j) = sectors[s].lz;
      n_zero(offsets[s] + j, offsets[s] + j) = sectors[s].states[j][1];
    }
  }

  const Eigen::MatrixXd f2 = magnetization * magnetization +
                             0.5 * (raise * raise.transpose() + raise.transpose() * raise);
  const Eigen::MatrixXd h = (c2 / N) * f2 - q * n_zero;

  CHECK((h - h.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((f2 * magnetization - magnetization * f2).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((h * magnetization - magnetization * h).cwiseAbs().maxCoeff() < 1e-12);

  // Every sector block of the full assembly reproduces the sector builder.
  for (size_t s = 0; s < sectors.size(); ++s) {
    const int d = sectors[s].dimension();
    const Eigen::MatrixXd block = h.block(offsets[s], offsets[s], d, d);
    const Eigen::MatrixXd direct = build_hamiltonian(sectors[s], c2, q);
    CHECK((block - direct).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("zero-field spectra follow the total-spin algebra") {
  for (int N : {7, 8, 15}) {
    const double c2 = 0.9;
    const std::vector<double> exact = exact_spectrum(N, c2, 0.0);
    const std::vector<double> algebra = algebraic_levels(N, c2);
    REQUIRE(exact.size() == algebra.size());
    const double scale = algebra.back();
    for (size_t k = 0; k < exact.size(); ++k)
      CHECK(std::abs(exact[k] - algebra[k]) < 1e-10 * scale);

    const Eigen::MatrixXd h = build_hamiltonian(make_fock_basis(N), c2, 0.0);
    double algebra_trace = 0.0;
    for (double e : algebra) algebra_trace += e;
    CHECK(h.trace() == doctest::Approx(algebra_trace).epsilon(1e-12));
  }
}

TEST_CASE("spectra are magnetization-reversal symmetric") {
  const std::vector<double> up = exact_spectrum(9, 1.3, 0.7, 3);
  const std::vector<double> down = exact_spectrum(9, 1.3, 0.7, -3);
  REQUIRE(up.size() == down.size());
  for (size_t k = 0; k < up.size(); ++k)
    CHECK(up[k] == doctest::Approx(down[k]).epsilon(1e-12).scale(1.0));
}

TEST_CASE("strong quadratic shift empties the side modes") {
  const double c2 = 1.0, q = 1000.0;
  const int N = 6;
  const double gs = exact_spectrum(N, c2, q).front();
  // Polar condensate: energy -qN plus the 2 c2 zero-point of F^2.
  CHECK(std::abs(gs + q * N - 2.0 * c2) < 0.05 * c2);
}

TEST_CASE("ground state descends monotonically in the quadratic shift") {
  double previous = exact_spectrum(8, 1.0, 0.0).front();
  for (double q : {0.2, 0.5, 1.0, 2.0}) {
    const double gs = exact_spectrum(8, 1.0, q).front();
    CHECK(gs < previous);
    previous = gs;
  }
}

TEST_CASE("first gap approaches the pair-excitation energy") {
  const double c2 = 1.0, q = 0.3;
  const std::vector<double> levels = exact_spectrum(40, c2, q);
  const double pair_gap = 2.0 * std::sqrt(q * (q + 4.0 * c2));
  CHECK(levels[1] - levels[0] == doctest::Approx(pair_gap).epsilon(0.05));
}

TEST_CASE("oversized sectors are rejected") {
  CHECK_THROWS_AS(build_hamiltonian(make_fock_basis(20), 1.0, 0.0, 10), ConfigError);
  CHECK_THROWS_AS(exact_spectrum(20, 1.0, 0.0, 0, 10), ConfigError);
  CHECK_NOTHROW(exact_spectrum(20, 1.0, 0.0, 0, 11));
  CHECK_THROWS_AS(raising_block(make_fock_basis(5, 2), make_fock_basis(5, 0)), ConfigError);
  CHECK_THROWS_AS(raising_block(make_fock_basis(5, 1), make_fock_basis(6, 0)), ConfigError);
}

TEST_CASE("free-rotor comparison has closed-form gap deviations") {
  const auto reports = compare_with_rotor({12}, 1.0, 0.0, 5, 256);
  REQUIRE(reports.size() == 1);
  const SpectrumComparison& cmp = reports[0];
  REQUIRE(cmp.variants.size() == 4);

  // Kinetic c2/N, reflection-even sector: rotor gaps l^2 with l = 2m against
  // exact gaps F(F+1) with F = 2m, so the deviations are 1/3, 1/5, 1/7, ...
  const RotorVariant* even_full = nullptr;
  for (const RotorVariant& v : cmp.variants)
    if (v.even_parity_only && v.kinetic_prefactor == doctest::Approx(1.0 / 12.0).epsilon(1e-12))
      even_full = &v;
  REQUIRE(even_full != nullptr);
  REQUIRE(even_full->relative_deviations.size() >= 4);
  CHECK(even_full->relative_deviations[0] == 0.0);
  CHECK(even_full->relative_deviations[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(even_full->relative_deviations[2] == doctest::Approx(1.0 / 5.0).epsilon(1e-9));
  CHECK(even_full->relative_deviations[3] == doctest::Approx(1.0 / 7.0).epsilon(1e-9));
  for (size_t k = 0; k + 1 < even_full->pairing.size(); ++k)
    CHECK(even_full->pairing[k] == static_cast<int>(k));

  // The halved kinetic convention cannot reproduce the free spectrum: its
  // first even gap is 2 (c2/N) against the exact 6 (c2/N).
  for (const RotorVariant& v : cmp.variants)
    if (v.even_parity_only && v.kinetic_prefactor == doctest::Approx(1.0 / 24.0).epsilon(1e-12))
      CHECK(v.relative_deviations[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("gap ratio against the halved convention settles with system size") {
  const auto reports = compare_with_rotor({10, 20, 40}, 1.0, 0.0, 4, 256);
  std::vector<double> ratios;
  for (const SpectrumComparison& cmp : reports) {
    const double exact_gap = cmp.exact_levels[1] - cmp.exact_levels[0];
    for (const RotorVariant& v : cmp.variants)
      if (!v.even_parity_only &&
          v.kinetic_prefactor == doctest::Approx(cmp.c2 / (2.0 * cmp.N)).epsilon(1e-12))
        ratios.push_back(exact_gap / (v.rotor_levels[1] - v.rotor_levels[0]));
  }
  REQUIRE(ratios.size() == 3);
  CHECK(std::abs(ratios[2] - ratios[1]) <= std::abs(ratios[1] - ratios[0]) + 1e-12);
  CHECK(ratios[2] == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("one mapping convention improves with atom number") {
  const double c2 = 1.0, q = 0.4;
  const auto reports = compare_with_rotor({10, 20, 40}, c2, q, 6, 256);
  REQUIRE(reports.size() == 3);

  std::vector<double> metric;  // worst of the first three gap deviations
  for (const SpectrumComparison& cmp : reports) {
    REQUIRE(cmp.variants.size() == 4);
    const RotorVariant* even_full = nullptr;
    for (const RotorVariant& v : cmp.variants) {
      REQUIRE(v.rotor_levels.size() >= 4);
      CHECK(std::is_sorted(v.rotor_levels.begin(), v.rotor_levels.end()));
      if (v.even_parity_only &&
          v.kinetic_prefactor == doctest::Approx(cmp.c2 / cmp.N).epsilon(1e-12))
        even_full = &v;
    }
    REQUIRE(even_full != nullptr);
    double worst = 0.0;
    for (size_t k = 1; k <= 3; ++k)
      worst = std::max(worst, even_full->relative_deviations[k]);
    metric.push_back(worst);
    MESSAGE("N = ", cmp.N, " worst deviation ", worst);
  }
  CHECK(metric[1] < metric[0]);
  CHECK(metric[2] < metric[1]);
  CHECK(metric[2] < 0.25);

  // Every reflection-even level must also appear in the unrestricted list of
  // the same kinetic convention.
  for (const SpectrumComparison& cmp : reports)
    for (const RotorVariant& even : cmp.variants) {
      if (!even.even_parity_only) continue;
      for (const RotorVariant& all : cmp.variants) {
        if (all.even_parity_only || all.kinetic_prefactor != even.kinetic_prefactor) continue;
        for (double level : even.rotor_levels) {
          if (level > all.rotor_levels.back()) continue;  // beyond the truncation
          double closest = 1e300;
          for (double candidate : all.rotor_levels)
            closest = std::min(closest, std::abs(candidate - level));
          CHECK(closest < 1e-9 * std::max(1.0, std::abs(level)));
        }
      }
    }

  CHECK_THROWS_AS(compare_with_rotor({10}, c2, q, 1, 256), ConfigError);
}
