#pragma once

#include <vector>

namespace rotor {

// Uniform periodic angular grid together with its conjugate momentum lattice.
// theta_values start at -period/2; wavenumbers are FFT-ordered multiples of
// 2*pi/period (for the default period pi that means even integers).
struct AngularGrid {
  int n_points = 0;
  double period = 0.0;
  std::vector<double> theta_values;
  std::vector<double> wavenumbers;

  double spacing() const { return period / n_points; }

  static AngularGrid make(int n_points, double period);
  static AngularGrid make(int n_points);
};

}  // namespace rotor
