#include "skyear/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>

namespace skyear {

RealFft::RealFft(int size) : size_(size) {
  real_ = fftw_alloc_real(static_cast<std::size_t>(size_));
  auto* spectrum = fftw_alloc_complex(static_cast<std::size_t>(bins()));
  spectrum_ = spectrum;
  forward_plan_ = fftw_plan_dft_r2c_1d(size_, real_, spectrum, FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_c2r_1d(size_, spectrum, real_, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  fftw_free(real_);
  fftw_free(spectrum_);
}

void RealFft::forward(std::span<const double> in, std::span<std::complex<double>> out) {
  std::copy(in.begin(), in.end(), real_);
  fftw_execute(static_cast<fftw_plan>(forward_plan_));
  std::memcpy(out.data(), spectrum_, sizeof(fftw_complex) * static_cast<std::size_t>(bins()));
}

void RealFft::inverse(std::span<const std::complex<double>> in, std::span<double> out) {
  // c2r destroys its input, so it always runs on the internal copy.
  std::memcpy(spectrum_, in.data(), sizeof(fftw_complex) * static_cast<std::size_t>(bins()));
  fftw_execute(static_cast<fftw_plan>(inverse_plan_));
  std::copy(real_, real_ + size_, out.begin());
}

int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace skyear
