#include "rotor/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace rotor::fft {
namespace {

struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

// Plan creation/destruction is not thread-safe in FFTW; execution via the
// new-array interface is. Plans are created unaligned so they apply to any
// caller buffer.
std::mutex plan_mutex;

PlanPair make_plans(int n) {
  std::lock_guard<std::mutex> lock(plan_mutex);
  fftw_complex* scratch = fftw_alloc_complex(static_cast<size_t>(n));
  if (!scratch) throw std::bad_alloc();
  PlanPair p;
  p.fwd = fftw_plan_dft_1d(n, scratch, scratch, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  p.bwd = fftw_plan_dft_1d(n, scratch, scratch, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(scratch);
  if (!p.fwd || !p.bwd) throw std::runtime_error("fft: plan creation failed");
  return p;
}

const PlanPair& plans_for(int n) {
  thread_local std::map<int, PlanPair> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_plans(n)).first;
  return it->second;
}

}  // namespace

void forward(std::vector<std::complex<double>>& data) {
  const PlanPair& p = plans_for(static_cast<int>(data.size()));
  auto* raw = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(p.fwd, raw, raw);
}

void inverse(std::vector<std::complex<double>>& data) {
  const PlanPair& p = plans_for(static_cast<int>(data.size()));
  auto* raw = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(p.bwd, raw, raw);
  const double inv = 1.0 / static_cast<double>(data.size());
  for (auto& z : data) z *= inv;
}

}  // namespace rotor::fft
