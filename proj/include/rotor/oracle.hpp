#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "rotor/model.hpp"

namespace rotor {

// Occupation basis (n_plus, n_zero, n_minus) of the three Zeeman modes at
// fixed atom number, restricted to one magnetization sector
// n_plus - n_minus = lz. States are ordered by ascending n_minus.
struct FockBasis {
  int N = 0;
  int lz = 0;
  std::vector<std::array<int, 3>> states;

  int dimension() const { return static_cast<int>(states.size()); }
};

// Complete sector enumeration. Throws ConfigError when the sector is empty
// (|lz| > N) or N is negative. The lz = 0 sector has floor(N/2)+1 states.
FockBasis make_fock_basis(int N, int lz = 0);

// Matrix of the collective raising operator sqrt(2)(b+^dag b0 + b0^dag b-)
// mapping `from` into `to`; requires to.lz == from.lz + 1 at equal N. These
// rectangular blocks are the ladder pieces everything else is assembled from.
Eigen::MatrixXd raising_block(const FockBasis& to, const FockBasis& from);

// Sector matrix of (c2/N) F^2 - q n0. F^2 is built from the ladder blocks as
// lz^2 + (F+ F- + F- F+)/2, i.e. Fx^2 + Fy^2 + Fz^2. Real symmetric.
// Rejects bases larger than dimension_cap.
Eigen::MatrixXd build_hamiltonian(const FockBasis& basis, double c2, double q,
                                  int dimension_cap = 5000);

// Ascending eigenvalues of the sector Hamiltonian, same units as c2 and q.
std::vector<double> exact_spectrum(int N, double c2, double q, int lz = 0,
                                   int dimension_cap = 5000);

// One reading of the spin-to-rotor correspondence. The literature writes the
// collision term both as (c2/N) F^2 and as c2 L^2/(2N); on top of that the
// rotor's reflection sector is a choice. Each variant is one combination.
struct RotorVariant {
  double kinetic_prefactor = 0.0;  // multiplies l^2: c2/N or c2/(2N)
  bool even_parity_only = false;   // keep only theta -> -theta symmetric states
  std::vector<double> rotor_levels;  // ascending, same units as exact_levels
  // pairing[k] is the rotor index compared against exact level k (identity on
  // the overlap of the two sorted lists).
  std::vector<int> pairing;
  // Deviations of excitation gaps, not absolute energies: entry k >= 1 holds
  // |(R_k - R_0) - (E_k - E_0)| / (E_k - E_0); entry 0 is 0 by construction.
  std::vector<double> relative_deviations;
};

struct SpectrumComparison {
  int N = 0;
  double c2 = 0.0;
  double q = 0.0;
  std::vector<double> exact_levels;   // lz = 0 sector, ascending, truncated
  std::vector<RotorVariant> variants;  // {c2/N, c2/(2N)} x {all, even}
};

// Exact sector spectra against the discretized planar rotor, one comparison
// per atom number. The rotor side reuses the simulator's grid Hamiltonian
// l^2/2 + beta V(theta): scaling beta reproduces either kinetic convention.
std::vector<SpectrumComparison> compare_with_rotor(const std::vector<int>& N_list,
                                                   double c2, double q,
                                                   int n_levels = 8,
                                                   int n_points = 512);

}  // namespace rotor
