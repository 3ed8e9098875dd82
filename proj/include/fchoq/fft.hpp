#pragma once
// Owning wrapper around a pair of FFTW real<->complex plans of fixed shape.

#include <fftw3.h>

#include <complex>
#include <cstring>
#include <mutex>
#include <span>
#include <stdexcept>
#include <vector>

namespace fchoq {

namespace detail {
// FFTW's planner is not thread-safe.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
} // namespace detail

/// Threads used by plans created after this call.
inline void set_fft_threads(int n) {
  if (n < 1) throw std::invalid_argument("set_fft_threads: need n >= 1");
  std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
  static const bool ready = fftw_init_threads() != 0;
  if (!ready) throw std::runtime_error("set_fft_threads: fftw_init_threads failed");
  fftw_plan_with_nthreads(n);
}

/// Unnormalised forward r2c and backward c2r transforms. The complex
/// half-spectrum has shape n[0] x ... x (n[d-1]/2 + 1).
class RealFft {
 public:
  explicit RealFft(std::vector<int> shape) : shape_(std::move(shape)) {
    real_size_ = 1;
    for (int n : shape_) real_size_ *= static_cast<std::size_t>(n);
    complex_size_ = real_size_ / static_cast<std::size_t>(shape_.back()) * static_cast<std::size_t>(shape_.back() / 2 + 1);
    real_ = fftw_alloc_real(real_size_);
    cplx_ = fftw_alloc_complex(complex_size_);
    if (!real_ || !cplx_) throw std::bad_alloc();
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    const int rank = static_cast<int>(shape_.size());
    fwd_ = fftw_plan_dft_r2c(rank, shape_.data(), real_, cplx_, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_c2r(rank, shape_.data(), cplx_, real_, FFTW_ESTIMATE);
    if (!fwd_ || !bwd_) throw std::runtime_error("RealFft: plan creation failed");
  }

  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  ~RealFft() {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(real_);
    fftw_free(cplx_);
  }

  const std::vector<int>& shape() const { return shape_; }
  std::size_t real_size() const { return real_size_; }
  std::size_t complex_size() const { return complex_size_; }

  void forward(std::span<const double> in, std::vector<std::complex<double>>& out) {
    if (in.size() != real_size_) throw std::invalid_argument("RealFft::forward: size mismatch");
    std::memcpy(real_, in.data(), real_size_ * sizeof(double));
    fftw_execute(fwd_);
    out.resize(complex_size_);
    std::memcpy(static_cast<void*>(out.data()), cplx_, complex_size_ * sizeof(fftw_complex));
  }

  /// c2r destroys its input in FFTW, so the spectrum is copied first.
  void backward(std::span<const std::complex<double>> in, std::vector<double>& out) {
    if (in.size() != complex_size_) throw std::invalid_argument("RealFft::backward: size mismatch");
    std::memcpy(static_cast<void*>(cplx_), in.data(), complex_size_ * sizeof(fftw_complex));
    fftw_execute(bwd_);
    out.resize(real_size_);
    std::memcpy(out.data(), real_, real_size_ * sizeof(double));
  }

 private:
  std::vector<int> shape_;
  std::size_t real_size_ = 0, complex_size_ = 0;
  double* real_ = nullptr;
  fftw_complex* cplx_ = nullptr;
  fftw_plan fwd_ = nullptr, bwd_ = nullptr;
};

} // namespace fchoq
