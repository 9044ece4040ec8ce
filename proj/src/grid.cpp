#include "rotor/grid.hpp"

#include <cmath>

#include "rotor/errors.hpp"

namespace rotor {

namespace {
constexpr double kPi = 3.14159265358979323846;

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }
}  // namespace

AngularGrid AngularGrid::make(int n_points, double period) {
  if (!power_of_two(n_points) || n_points < 8)
    throw ConfigError("AngularGrid: n_points must be a power of two, at least 8");
  if (!(period > 0.0)) throw ConfigError("AngularGrid: period must be positive");

  AngularGrid g;
  g.n_points = n_points;
  g.period = period;
  g.theta_values.resize(n_points);
  g.wavenumbers.resize(n_points);
  const double dtheta = period / n_points;
  const double unit = 2.0 * kPi / period;
  for (int j = 0; j < n_points; ++j) {
    g.theta_values[j] = -0.5 * period + j * dtheta;
    const int f = (j < n_points / 2) ? j : j - n_points;
    g.wavenumbers[j] = unit * f;
  }
  return g;
}

AngularGrid AngularGrid::make(int n_points) { return make(n_points, kPi); }

}  // namespace rotor
