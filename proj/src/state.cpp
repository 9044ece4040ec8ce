#include "rotor/state.hpp"

#include <cmath>

#include "rotor/errors.hpp"

namespace rotor {

double RotorState::norm() const {
  double s = 0.0;
  for (const auto& z : amplitudes) s += std::norm(z);
  return s * grid.spacing();
}

void RotorState::normalize() {
  const double n = norm();
  if (!(n > 0.0)) throw NumericalError("RotorState: cannot normalize a zero state");
  const double scale = 1.0 / std::sqrt(n);
  for (auto& z : amplitudes) z *= scale;
}

RotorState uniform_state(const AngularGrid& grid) {
  RotorState s;
  s.grid = grid;
  s.amplitudes.assign(grid.n_points, std::complex<double>(1.0, 0.0));
  s.normalize();
  return s;
}

std::complex<double> inner_product(const RotorState& a, const RotorState& b) {
  if (a.amplitudes.size() != b.amplitudes.size())
    throw ConfigError("inner_product: mismatched grids");
  std::complex<double> s = 0.0;
  for (size_t j = 0; j < a.amplitudes.size(); ++j)
    s += std::conj(a.amplitudes[j]) * b.amplitudes[j];
  return s * a.grid.spacing();
}

double fidelity(const RotorState& a, const RotorState& b) {
  return std::abs(inner_product(a, b));
}

}  // namespace rotor
