#include "rotor/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rotor/dynamics.hpp"
#include "rotor/errors.hpp"

namespace rotor {

FockBasis make_fock_basis(int N, int lz) {
  if (N < 0) throw ConfigError("make_fock_basis: negative atom number");
  FockBasis basis;
  basis.N = N;
  basis.lz = lz;
  for (int n_minus = std::max(0, -lz);; ++n_minus) {
    const int n_plus = n_minus + lz;
    const int n_zero = N - n_plus - n_minus;
    if (n_zero < 0) break;
    basis.states.push_back({n_plus, n_zero, n_minus});
  }
  if (basis.states.empty())
    throw ConfigError("make_fock_basis: empty sector, |lz| exceeds the atom number");
  return basis;
}

Eigen::MatrixXd raising_block(const FockBasis& to, const FockBasis& from) {
  if (to.N != from.N || to.lz != from.lz + 1)
    throw ConfigError("raising_block: target sector must sit one magnetization unit above");
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(to.dimension(), from.dimension());
  // Within a sector n_minus alone identifies the state, so target indices are
  // offsets from the sector's smallest n_minus.
  const int to_base = to.states.front()[2];
  for (int j = 0; j < from.dimension(); ++j) {
    const auto [n_plus, n_zero, n_minus] = from.states[j];
    if (n_zero > 0)  // b+^dag b0
      block(n_minus - to_base, j) += std::sqrt(2.0 * (n_plus + 1) * n_zero);
    if (n_minus > 0)  // b0^dag b-
      block(n_minus - 1 - to_base, j) += std::sqrt(2.0 * (n_zero + 1) * n_minus);
  }
  return block;
}

Eigen::MatrixXd build_hamiltonian(const FockBasis& basis, double c2, double q,
                                  int dimension_cap) {
  if (basis.N < 1) throw ConfigError("build_hamiltonian: need at least one atom");
  if (basis.dimension() > dimension_cap)
    throw ConfigError("build_hamiltonian: sector dimension " +
                      std::to_string(basis.dimension()) + " exceeds the cap of " +
                      std::to_string(dimension_cap));

  const int d = basis.dimension();
  Eigen::MatrixXd f2 = static_cast<double>(basis.lz) * basis.lz *
                       Eigen::MatrixXd::Identity(d, d);
  if (std::abs(basis.lz + 1) <= basis.N) {
    const Eigen::MatrixXd up = raising_block(make_fock_basis(basis.N, basis.lz + 1), basis);
    f2 += 0.5 * up.transpose() * up;  // F- F+
  }
  if (std::abs(basis.lz - 1) <= basis.N) {
    const Eigen::MatrixXd down = raising_block(basis, make_fock_basis(basis.N, basis.lz - 1));
    f2 += 0.5 * down * down.transpose();  // F+ F-
  }

  Eigen::MatrixXd h = (c2 / basis.N) * f2;
  for (int j = 0; j < d; ++j) h(j, j) -= q * basis.states[j][1];
  return h;
}

std::vector<double> exact_spectrum(int N, double c2, double q, int lz, int dimension_cap) {
  const Eigen::MatrixXd h = build_hamiltonian(make_fock_basis(N, lz), c2, q, dimension_cap);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericalError("exact_spectrum: eigensolver failed to converge");
  return {solver.eigenvalues().data(), solver.eigenvalues().data() + h.rows()};
}

namespace {

// <psi|P|psi> with P the theta -> -theta reflection; +1 even, -1 odd. The
// grid maps j to (n - j) mod n under reflection.
double reflection_expectation(const RotorState& state) {
  const int n = state.grid.n_points;
  const double dtheta = state.grid.spacing();
  double value = 0.0;
  for (int j = 0; j < n; ++j) {
    const int mirrored = j == 0 ? 0 : n - j;
    value += (std::conj(state.amplitudes[mirrored]) * state.amplitudes[j]).real();
  }
  return value * dtheta;
}

// Reflection commutes with the Hamiltonian, but a dense solver returns
// arbitrary mixtures inside degenerate clusters (free-rotor pairs, deep-well
// doublets). The trace of the reflection over a cluster is basis independent,
// so it counts the even states without needing to unmix them.
std::vector<double> even_sector_levels(const std::vector<double>& energies,
                                       const std::vector<RotorState>& states) {
  std::vector<double> even;
  const size_t count = energies.size();
  size_t i = 0;
  while (i < count) {
    size_t j = i + 1;
    while (j < count &&
           energies[j] - energies[j - 1] <= 1e-8 * std::max(1.0, std::abs(energies[j])))
      ++j;
    double trace = 0.0;
    for (size_t m = i; m < j; ++m) trace += reflection_expectation(states[m]);
    const auto n_even = static_cast<long long>(
        std::clamp(std::llround((static_cast<double>(j - i) + trace) / 2.0), 0LL,
                   static_cast<long long>(j - i)));
    for (long long m = 0; m < n_even; ++m) even.push_back(energies[i + static_cast<size_t>(m)]);
    i = j;
  }
  return even;
}

RotorVariant make_variant(double kinetic_prefactor, bool even_only,
                          std::vector<double> levels,
                          const std::vector<double>& exact_levels, int n_levels) {
  RotorVariant v;
  v.kinetic_prefactor = kinetic_prefactor;
  v.even_parity_only = even_only;
  if (static_cast<int>(levels.size()) > n_levels) levels.resize(n_levels);
  v.rotor_levels = std::move(levels);
  const size_t n_pairs = std::min(v.rotor_levels.size(), exact_levels.size());
  v.pairing.resize(n_pairs);
  v.relative_deviations.assign(n_pairs, 0.0);
  for (size_t k = 0; k < n_pairs; ++k) v.pairing[k] = static_cast<int>(k);
  for (size_t k = 1; k < n_pairs; ++k) {
    const double exact_gap = exact_levels[k] - exact_levels[0];
    if (exact_gap > 0.0)
      v.relative_deviations[k] =
          std::abs((v.rotor_levels[k] - v.rotor_levels[0]) - exact_gap) / exact_gap;
  }
  return v;
}

}  // namespace

std::vector<SpectrumComparison> compare_with_rotor(const std::vector<int>& N_list, double c2,
                                                   double q, int n_levels, int n_points) {
  if (n_levels < 2) throw ConfigError("compare_with_rotor: need at least two levels");
  const AngularGrid grid = AngularGrid::make(n_points);
  std::vector<SpectrumComparison> out;
  out.reserve(N_list.size());

  for (int N : N_list) {
    SpectrumComparison cmp;
    cmp.N = N;
    cmp.c2 = c2;
    cmp.q = q;
    cmp.exact_levels = exact_spectrum(N, c2, q);
    if (static_cast<int>(cmp.exact_levels.size()) > n_levels)
      cmp.exact_levels.resize(n_levels);

    SystemParams params;
    params.N = N;
    params.c2 = c2;
    params.q = q;
    const RotorConstants constants = derive_constants(params);
    const std::vector<double> potential = sample_bare_potential(grid, constants);
    const int k = std::min(2 * n_levels + 4, grid.n_points / 4);

    // The physical rotor Hamiltonian s E0 (l^2/2 + (beta/s) V) has kinetic
    // prefactor s E0 / 2: s = 2 gives c2/N, s = 1 the mapping's c2/(2N).
    for (const double s : {2.0, 1.0}) {
      RotorConstants scaled = constants;
      scaled.beta = constants.beta / s;
      const StationaryStates solved = stationary_states(grid, potential, scaled, k);
      std::vector<double> all(solved.energies.size());
      for (size_t i = 0; i < all.size(); ++i) all[i] = s * constants.E0 * solved.energies[i];
      const std::vector<double> even = even_sector_levels(all, solved.states);
      cmp.variants.push_back(
          make_variant(s * constants.E0 / 2.0, false, all, cmp.exact_levels, n_levels));
      cmp.variants.push_back(
          make_variant(s * constants.E0 / 2.0, true, even, cmp.exact_levels, n_levels));
    }
    out.push_back(std::move(cmp));
  }
  return out;
}

}  // namespace rotor
