#include <cmath>

#include "stf/simd/kernels.hpp"

namespace stf::simd {

// Reference lane-by-lane mirror of the vector kernels. Built with
// -ffp-contract=off so only the explicit std::fma calls fuse.
double gather_dot_scalar(const double* coeff, const std::int32_t* idx, const double* table, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    for (std::size_t l = 0; l < 4; ++l) acc[l] = std::fma(coeff[i + l], table[idx[i + l]], acc[l]);
  for (std::size_t l = 0; i < n; ++i, ++l) acc[l] = std::fma(coeff[i], table[idx[i]], acc[l]);
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

}  // namespace stf::simd
