#include "tcq/fft.hpp"

#include <mutex>

#include <fftw3.h>

#include "tcq/errors.hpp"

namespace tcq {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

fft_plan::fft_plan(std::vector<int> dims) : dims_(std::move(dims)) {
  for (int d : dims_) {
    if (d < 1) throw error("fft extent must be positive");
    size_ *= static_cast<std::size_t>(d);
  }
  std::lock_guard lock(planner_mutex());
  auto* buf = fftw_alloc_complex(size_);
  const int rank = static_cast<int>(dims_.size());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  fwd_ = fftw_plan_dft(rank, dims_.data(), buf, buf, FFTW_FORWARD, flags);
  bwd_ = fftw_plan_dft(rank, dims_.data(), buf, buf, FFTW_BACKWARD, flags);
  fftw_free(buf);
  if (!fwd_ || !bwd_) throw error("could not create FFT plan");
}

fft_plan::~fft_plan() {
  std::lock_guard lock(planner_mutex());
  if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  if (bwd_) fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
}

void fft_plan::forward(std::complex<double>* data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(fwd_), p, p);
}

void fft_plan::backward(std::complex<double>* data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(bwd_), p, p);
}

}  // namespace tcq
