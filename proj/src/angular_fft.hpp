#pragma once

#include <complex>
#include <memory>
#include <vector>

namespace gpv::detail {

// Batched length-Nt complex transforms over `rows` contiguous rows.
// Plans are built with FFTW_ESTIMATE so the algorithm choice, and therefore
// the rounding, is identical from run to run.
class AngularFFT {
public:
  AngularFFT(int rows, int Nt);
  ~AngularFFT();
  AngularFFT(const AngularFFT&) = delete;
  AngularFFT& operator=(const AngularFFT&) = delete;

  // Unnormalized forward (exp(-i k theta)) and backward (exp(+i k theta)) transforms.
  void forward(const std::complex<double>* in, std::complex<double>* out) const;
  void backward(const std::complex<double>* in, std::complex<double>* out) const;

  int rows() const { return rows_; }
  int Nt() const { return nt_; }

private:
  int rows_, nt_;
  void* fwd_;
  void* bwd_;
};

std::shared_ptr<const AngularFFT> angular_fft(int rows, int Nt);

// Signed wavenumber of FFT bin k; the Nyquist bin maps to 0.
inline double wavenumber(int k, int Nt) {
  if (2 * k == Nt) return 0.0;
  return 2 * k < Nt ? static_cast<double>(k) : static_cast<double>(k - Nt);
}

}  // namespace gpv::detail
