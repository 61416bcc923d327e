#pragma once

#include <complex>
#include <span>
#include <vector>

namespace skyear {

// Owning wrapper around a pair of FFTW real-to-complex / complex-to-real plans.
// Not thread-safe: FFTW plan creation must happen on one thread.
class RealFft {
 public:
  explicit RealFft(int size);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  int size() const { return size_; }
  int bins() const { return size_ / 2 + 1; }

  // in.size() == size(); out.size() == bins().
  void forward(std::span<const double> in, std::span<std::complex<double>> out);
  // Unnormalized inverse: inverse(forward(x)) == size() * x.
  void inverse(std::span<const std::complex<double>> in, std::span<double> out);

 private:
  int size_;
  double* real_ = nullptr;
  void* spectrum_ = nullptr;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

int next_pow2(int n);

}  // namespace skyear
