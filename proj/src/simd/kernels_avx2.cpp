#include <cmath>

#include "stf/simd/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>

namespace stf::simd {

__attribute__((target("avx2,fma"))) double gather_dot_avx2(const double* coeff, const std::int32_t* idx, const double* table,
                                                            std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m128i vi = _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + i));
    __m256d t = _mm256_i32gather_pd(table, vi, 8);
    __m256d c = _mm256_loadu_pd(coeff + i);
    acc = _mm256_fmadd_pd(c, t, acc);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  for (std::size_t l = 0; i < n; ++i, ++l) lanes[l] = std::fma(coeff[i], table[idx[i]], lanes[l]);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

}  // namespace stf::simd

#else

namespace stf::simd {

double gather_dot_avx2(const double* coeff, const std::int32_t* idx, const double* table, std::size_t n) {
  return gather_dot_scalar(coeff, idx, table, n);
}

}  // namespace stf::simd

#endif
