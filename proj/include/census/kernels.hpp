#pragma once

// Batch scans over agent columns. Every kernel has a scalar reference
// implementation and, on x86-64, an AVX2 variant chosen at runtime. The two
// must agree bit-for-bit; tests/kernels_test.cpp holds them to that.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace census::kernels {

enum class Isa { scalar, avx2 };

struct MinMax {
  std::int64_t min;
  std::int64_t max;
};

/// Instruction set the dispatching entry points use.
Isa active_isa();
/// Best instruction set this CPU and build support.
Isa best_isa();
/// Pin the dispatch target (tests and benchmarks). Falls back to scalar if the
/// requested set is unavailable; returns the set actually selected.
Isa select_isa(Isa isa);
std::string_view isa_name(Isa isa);

// Dispatching entry points.

/// pre: values non-empty.
MinMax minmax_i64(std::span<const std::int64_t> values);
std::size_t count_equal_i64(std::span<const std::int64_t> values, std::int64_t target);
/// out[i] = floor(num[i] / den[i] + 0.5); requires |quotient| < 2^51.
void round_quotient_f64(std::span<const double> num, std::span<const double> den,
                        std::span<std::int64_t> out);

namespace scalar {
MinMax minmax_i64(std::span<const std::int64_t> values);
std::size_t count_equal_i64(std::span<const std::int64_t> values, std::int64_t target);
void round_quotient_f64(std::span<const double> num, std::span<const double> den,
                        std::span<std::int64_t> out);
}  // namespace scalar

#if defined(CENSUS_HAVE_AVX2_TU)
namespace avx2 {
MinMax minmax_i64(std::span<const std::int64_t> values);
std::size_t count_equal_i64(std::span<const std::int64_t> values, std::int64_t target);
void round_quotient_f64(std::span<const double> num, std::span<const double> den,
                        std::span<std::int64_t> out);
}  // namespace avx2
#endif

}  // namespace census::kernels
