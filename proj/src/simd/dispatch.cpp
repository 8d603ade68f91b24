#include <cstdlib>
#include <string>

#include "stf/simd/kernels.hpp"

namespace stf::simd {

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(__x86_64__) || defined(__i386__)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

std::string isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "?";
}

GatherDotFn gather_dot_for(Isa isa) {
  if (!isa_available(isa)) return gather_dot_scalar;
  switch (isa) {
    case Isa::Avx2: return gather_dot_avx2;
    case Isa::Neon: return gather_dot_neon;
    case Isa::Scalar: break;
  }
  return gather_dot_scalar;
}

namespace {

Isa detect() {
  if (const char* forced = std::getenv("STF_SIMD")) {
    std::string f(forced);
    for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon})
      if (f == isa_name(isa) && isa_available(isa)) return isa;
  }
  if (isa_available(Isa::Avx2)) return Isa::Avx2;
  if (isa_available(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

}  // namespace

Isa active_isa() {
  static const Isa isa = detect();
  return isa;
}

double gather_dot(const double* coeff, const std::int32_t* idx, const double* table, std::size_t n) {
  static const GatherDotFn fn = gather_dot_for(active_isa());
  return fn(coeff, idx, table, n);
}

}  // namespace stf::simd
