// NEON vector kernels for aarch64 builds (NEON is architecturally guaranteed).
#include <arm_neon.h>

#include <cstddef>

namespace fracsim::kern {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  float64x2_t acc2 = vdupq_n_f64(0.0);
  float64x2_t acc3 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    acc2 = vfmaq_f64(acc2, vld1q_f64(a + i + 4), vld1q_f64(b + i + 4));
    acc3 = vfmaq_f64(acc3, vld1q_f64(a + i + 6), vld1q_f64(b + i + 6));
  }
  for (; i + 2 <= n; i += 2) acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
  float64x2_t acc = vaddq_f64(vaddq_f64(acc0, acc1), vaddq_f64(acc2, acc3));
  double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_neon(double* y, const double* x, double a, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    vst1q_f64(y + i + 2, vfmaq_f64(vld1q_f64(y + i + 2), va, vld1q_f64(x + i + 2)));
    vst1q_f64(y + i + 4, vfmaq_f64(vld1q_f64(y + i + 4), va, vld1q_f64(x + i + 4)));
    vst1q_f64(y + i + 6, vfmaq_f64(vld1q_f64(y + i + 6), va, vld1q_f64(x + i + 6)));
  }
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void axpy4_neon(double* y, const double* x0, const double* x1, const double* x2, const double* x3,
                double a0, double a1, double a2, double a3, std::size_t n) {
  const float64x2_t v0 = vdupq_n_f64(a0);
  const float64x2_t v1 = vdupq_n_f64(a1);
  const float64x2_t v2 = vdupq_n_f64(a2);
  const float64x2_t v3 = vdupq_n_f64(a3);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t acc = vld1q_f64(y + i);
    acc = vfmaq_f64(acc, v0, vld1q_f64(x0 + i));
    acc = vfmaq_f64(acc, v1, vld1q_f64(x1 + i));
    acc = vfmaq_f64(acc, v2, vld1q_f64(x2 + i));
    acc = vfmaq_f64(acc, v3, vld1q_f64(x3 + i));
    vst1q_f64(y + i, acc);
  }
  for (; i < n; ++i) y[i] += a0 * x0[i] + a1 * x1[i] + a2 * x2[i] + a3 * x3[i];
}

}  // namespace fracsim::kern
