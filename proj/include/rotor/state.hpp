#pragma once

#include <complex>
#include <vector>

#include "rotor/grid.hpp"

namespace rotor {

// Wavefunction samples on an AngularGrid. Normalization convention:
// sum |psi_j|^2 * dtheta = 1. Time is dimensionless (units of I/hbar).
struct RotorState {
  AngularGrid grid;
  std::vector<std::complex<double>> amplitudes;
  double time = 0.0;

  double norm() const;
  void normalize();
};

RotorState uniform_state(const AngularGrid& grid);

// <a|b> with the grid measure.
std::complex<double> inner_product(const RotorState& a, const RotorState& b);
double fidelity(const RotorState& a, const RotorState& b);

}  // namespace rotor
