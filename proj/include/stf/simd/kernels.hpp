#pragma once

// Gather-dot kernel sum_i coeff[i] * table[idx[i]], the inner loop of the
// series sampler. All variants accumulate in four lanes with fused
// multiply-adds and reduce as (l0 + l1) + (l2 + l3), so they agree bit for bit.

#include <cstddef>
#include <cstdint>
#include <string>

namespace stf::simd {

enum class Isa { Scalar, Avx2, Neon };

using GatherDotFn = double (*)(const double* coeff, const std::int32_t* idx, const double* table, std::size_t n);

double gather_dot_scalar(const double* coeff, const std::int32_t* idx, const double* table, std::size_t n);
double gather_dot_avx2(const double* coeff, const std::int32_t* idx, const double* table, std::size_t n);
double gather_dot_neon(const double* coeff, const std::int32_t* idx, const double* table, std::size_t n);

bool isa_available(Isa isa);
std::string isa_name(Isa isa);
GatherDotFn gather_dot_for(Isa isa);

/// Best available ISA; STF_SIMD=scalar|avx2|neon forces a choice when available.
Isa active_isa();
double gather_dot(const double* coeff, const std::int32_t* idx, const double* table, std::size_t n);

}  // namespace stf::simd
