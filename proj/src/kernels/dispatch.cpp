#include <atomic>

#include "census/kernels.hpp"

namespace census::kernels {

namespace {

Isa detect() {
#if defined(CENSUS_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2")) return Isa::avx2;
#endif
  return Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

Isa best_isa() {
  static const Isa best = detect();
  return best;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

Isa select_isa(Isa isa) {
  const Isa chosen = (isa == Isa::avx2 && best_isa() != Isa::avx2) ? Isa::scalar : isa;
  current().store(chosen, std::memory_order_relaxed);
  return chosen;
}

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

MinMax minmax_i64(std::span<const std::int64_t> values) {
#if defined(CENSUS_HAVE_AVX2_TU)
  if (active_isa() == Isa::avx2) return avx2::minmax_i64(values);
#endif
  return scalar::minmax_i64(values);
}

std::size_t count_equal_i64(std::span<const std::int64_t> values, std::int64_t target) {
#if defined(CENSUS_HAVE_AVX2_TU)
  if (active_isa() == Isa::avx2) return avx2::count_equal_i64(values, target);
#endif
  return scalar::count_equal_i64(values, target);
}

void round_quotient_f64(std::span<const double> num, std::span<const double> den,
                        std::span<std::int64_t> out) {
#if defined(CENSUS_HAVE_AVX2_TU)
  if (active_isa() == Isa::avx2) return avx2::round_quotient_f64(num, den, out);
#endif
  scalar::round_quotient_f64(num, den, out);
}

}  // namespace census::kernels
