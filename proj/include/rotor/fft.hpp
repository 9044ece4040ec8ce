#pragma once

#include <complex>
#include <vector>

namespace rotor::fft {

// In-place transforms, power-of-two lengths. forward() is the plain unnormalized
// DFT; inverse() includes the 1/n factor so inverse(forward(x)) == x up to
// round-off. Plans are cached per length and shared executions are thread-safe.
void forward(std::vector<std::complex<double>>& data);
void inverse(std::vector<std::complex<double>>& data);

}  // namespace rotor::fft
