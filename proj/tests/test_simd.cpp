#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <random>
#include <vector>

#include "stf/simd/kernels.hpp"

using namespace stf::simd;

namespace {

std::uint64_t bits(double x) {
  std::uint64_t b;
  std::memcpy(&b, &x, sizeof b);
  return b;
}

}  // namespace

TEST_CASE("scalar kernel matches a plain four-lane reference") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3, 3);
  for (std::size_t n = 0; n <= 33; ++n) {
    std::vector<double> coeff(n), table(17);
    std::vector<std::int32_t> idx(n);
    for (auto& t : table) t = u(rng);
    for (std::size_t i = 0; i < n; ++i) {
      coeff[i] = u(rng);
      idx[i] = static_cast<std::int32_t>(rng() % table.size());
    }
    double lane[4] = {0, 0, 0, 0};
    for (std::size_t i = 0; i < n; ++i) lane[i % 4] = std::fma(coeff[i], table[static_cast<std::size_t>(idx[i])], lane[i % 4]);
    double expect = (lane[0] + lane[1]) + (lane[2] + lane[3]);
    CHECK(bits(gather_dot_scalar(coeff.data(), idx.data(), table.data(), n)) == bits(expect));
  }
}

TEST_CASE("vector kernels are bit-identical to the scalar kernel") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (Isa isa : {Isa::Avx2, Isa::Neon}) {
    if (!isa_available(isa)) {
      MESSAGE(isa_name(isa) << " not available on this machine; skipped");
      continue;
    }
    GatherDotFn fn = gather_dot_for(isa);
    for (int trial = 0; trial < 200; ++trial)
      for (std::size_t n = 0; n <= 33; ++n) {
        std::vector<double> coeff(n), table(1 + rng() % 64);
        std::vector<std::int32_t> idx(n);
        for (auto& t : table) t = u(rng) * std::pow(10.0, static_cast<double>(rng() % 9) - 4);
        for (std::size_t i = 0; i < n; ++i) {
          coeff[i] = u(rng);
          idx[i] = static_cast<std::int32_t>(rng() % table.size());
        }
        CHECK(bits(fn(coeff.data(), idx.data(), table.data(), n)) == bits(gather_dot_scalar(coeff.data(), idx.data(), table.data(), n)));
      }
  }
}

TEST_CASE("dispatch honours STF_SIMD") {
  const char* forced = std::getenv("STF_SIMD");
  CHECK(isa_available(Isa::Scalar));
  CHECK(isa_available(active_isa()));
  if (forced && std::strcmp(forced, "scalar") == 0)
    CHECK(active_isa() == Isa::Scalar);
  else if (!forced && isa_available(Isa::Avx2))
    CHECK(active_isa() == Isa::Avx2);
  double c[3] = {1, 2, 3}, t[2] = {10, 100};
  std::int32_t i[3] = {0, 1, 0};
  CHECK(gather_dot(c, i, t, 3) == 240.0);
}
