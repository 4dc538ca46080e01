#pragma once
// Low-level dense vector kernels used by the history convolutions.
//
// Every kernel exists in a portable scalar form plus optional SIMD variants
// (AVX2 on x86-64, NEON on aarch64) compiled only when the toolchain supports
// them and selected at runtime from CPU capabilities.  All variants compute
// the same quantity with a fixed summation order per variant, so results are
// deterministic for a given build + machine.  The FRACSIM_KERNEL environment
// variable ("scalar", "avx2", "neon") forces a specific variant.

#include <cstddef>
#include <span>

namespace fracsim::kern {

struct Impl {
  const char* name;
  double (*dot)(const double*, const double*, std::size_t);
  // y[i] += a * x[i]
  void (*axpy)(double*, const double*, double, std::size_t);
  // y[i] += a0 x0[i] + a1 x1[i] + a2 x2[i] + a3 x3[i]  (one memory sweep)
  void (*axpy4)(double*, const double*, const double*, const double*, const double*, double,
                double, double, double, std::size_t);
};

double dot_scalar(const double* a, const double* b, std::size_t n);
void axpy_scalar(double* y, const double* x, double a, std::size_t n);
void axpy4_scalar(double* y, const double* x0, const double* x1, const double* x2,
                  const double* x3, double a0, double a1, double a2, double a3, std::size_t n);

// All variants compiled into this build (scalar first).
std::span<const Impl> implementations();

// The variant selected for this process (CPU detection + env override).
const Impl& active();

inline double dot(const double* a, const double* b, std::size_t n) {
  return active().dot(a, b, n);
}
inline void axpy(double* y, const double* x, double a, std::size_t n) {
  active().axpy(y, x, a, n);
}
inline void axpy4(double* y, const double* x0, const double* x1, const double* x2,
                  const double* x3, double a0, double a1, double a2, double a3, std::size_t n) {
  active().axpy4(y, x0, x1, x2, x3, a0, a1, a2, a3, n);
}

}  // namespace fracsim::kern
