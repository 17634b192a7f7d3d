#pragma once

#include <complex>
#include <vector>

namespace tcq {

// in-place complex FFT of a row-major array with the given extents; unnormalised
class fft_plan {
 public:
  explicit fft_plan(std::vector<int> dims);
  ~fft_plan();
  fft_plan(const fft_plan&) = delete;
  fft_plan& operator=(const fft_plan&) = delete;

  void forward(std::complex<double>* data) const;   // sum x exp(-i k j)
  void backward(std::complex<double>* data) const;  // sum x exp(+i k j)
  std::size_t size() const { return size_; }
  const std::vector<int>& dims() const { return dims_; }

 private:
  std::vector<int> dims_;
  std::size_t size_ = 1;
  void* fwd_ = nullptr;
  void* bwd_ = nullptr;
};

}  // namespace tcq
