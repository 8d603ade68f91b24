#include <cmath>

#include "stf/simd/kernels.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>

namespace stf::simd {

// No gather on NEON: lanes are loaded pairwise, accumulated in two float64x2.
double gather_dot_neon(const double* coeff, const std::int32_t* idx, const double* table, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    float64x2_t t0 = {table[idx[i]], table[idx[i + 1]]};
    float64x2_t t1 = {table[idx[i + 2]], table[idx[i + 3]]};
    lo = vfmaq_f64(lo, vld1q_f64(coeff + i), t0);
    hi = vfmaq_f64(hi, vld1q_f64(coeff + i + 2), t1);
  }
  double lanes[4] = {vgetq_lane_f64(lo, 0), vgetq_lane_f64(lo, 1), vgetq_lane_f64(hi, 0), vgetq_lane_f64(hi, 1)};
  for (std::size_t l = 0; i < n; ++i, ++l) lanes[l] = std::fma(coeff[i], table[idx[i]], lanes[l]);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

}  // namespace stf::simd

#else

namespace stf::simd {

double gather_dot_neon(const double* coeff, const std::int32_t* idx, const double* table, std::size_t n) {
  return gather_dot_scalar(coeff, idx, table, n);
}

}  // namespace stf::simd

#endif
