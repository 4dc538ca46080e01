#include "fracsim/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <vector>

namespace fracsim::kern {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  // Four independent accumulators: enough ILP to keep the FMA pipes busy
  // while preserving a fixed, reproducible summation order.
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  double s = (s0 + s1) + (s2 + s3);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double* y, const double* x, double a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void axpy4_scalar(double* y, const double* x0, const double* x1, const double* x2,
                  const double* x3, double a0, double a1, double a2, double a3, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    y[i] += a0 * x0[i] + a1 * x1[i] + a2 * x2[i] + a3 * x3[i];
}

#if defined(FRACSIM_HAVE_AVX2)
double dot_avx2(const double* a, const double* b, std::size_t n);
void axpy_avx2(double* y, const double* x, double a, std::size_t n);
void axpy4_avx2(double* y, const double* x0, const double* x1, const double* x2, const double* x3,
                double a0, double a1, double a2, double a3, std::size_t n);
#endif
#if defined(FRACSIM_HAVE_NEON)
double dot_neon(const double* a, const double* b, std::size_t n);
void axpy_neon(double* y, const double* x, double a, std::size_t n);
void axpy4_neon(double* y, const double* x0, const double* x1, const double* x2, const double* x3,
                double a0, double a1, double a2, double a3, std::size_t n);
#endif

namespace {

std::vector<Impl> build_impls() {
  std::vector<Impl> v;
  v.push_back({"scalar", &dot_scalar, &axpy_scalar, &axpy4_scalar});
#if defined(FRACSIM_HAVE_AVX2)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    v.push_back({"avx2", &dot_avx2, &axpy_avx2, &axpy4_avx2});
#endif
#if defined(FRACSIM_HAVE_NEON)
  v.push_back({"neon", &dot_neon, &axpy_neon, &axpy4_neon});
#endif
  return v;
}

const std::vector<Impl>& impls() {
  static const std::vector<Impl> v = build_impls();
  return v;
}

const Impl* select() {
  const auto& v = impls();
  if (const char* want = std::getenv("FRACSIM_KERNEL")) {
    for (const auto& impl : v)
      if (std::strcmp(impl.name, want) == 0) return &impl;
  }
  return &v.back();  // best available (SIMD variants registered after scalar)
}

}  // namespace

std::span<const Impl> implementations() { return {impls().data(), impls().size()}; }

const Impl& active() {
  static const Impl* chosen = select();
  return *chosen;
}

}  // namespace fracsim::kern
