// Compiled with -mavx2; only reached after best_isa() confirmed support.

#include <immintrin.h>

#include "census/kernels.hpp"

namespace census::kernels::avx2 {

namespace {

inline std::int64_t lane_min(__m256i v) {
  alignas(32) std::int64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), v);
  std::int64_t m = lanes[0];
  for (int i = 1; i < 4; ++i) m = lanes[i] < m ? lanes[i] : m;
  return m;
}

inline std::int64_t lane_max(__m256i v) {
  alignas(32) std::int64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), v);
  std::int64_t m = lanes[0];
  for (int i = 1; i < 4; ++i) m = lanes[i] > m ? lanes[i] : m;
  return m;
}

}  // namespace

MinMax minmax_i64(std::span<const std::int64_t> values) {
  const std::size_t n = values.size();
  const std::int64_t* p = values.data();
  std::size_t i = 0;
  MinMax r{p[0], p[0]};
  if (n >= 4) {
    __m256i vmin = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p));
    __m256i vmax = vmin;
    for (i = 4; i + 4 <= n; i += 4) {
      const __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p + i));
      vmin = _mm256_blendv_epi8(vmin, x, _mm256_cmpgt_epi64(vmin, x));
      vmax = _mm256_blendv_epi8(vmax, x, _mm256_cmpgt_epi64(x, vmax));
    }
    r = {lane_min(vmin), lane_max(vmax)};
  }
  for (; i < n; ++i) {
    if (p[i] < r.min) r.min = p[i];
    if (p[i] > r.max) r.max = p[i];
  }
  return r;
}

std::size_t count_equal_i64(std::span<const std::int64_t> values, std::int64_t target) {
  const std::size_t n = values.size();
  const std::int64_t* p = values.data();
  const __m256i t = _mm256_set1_epi64x(target);
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p + i));
    const int mask = _mm256_movemask_pd(_mm256_castsi256_pd(_mm256_cmpeq_epi64(x, t)));
    count += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(mask)));
  }
  for (; i < n; ++i) count += (p[i] == target);
  return count;
}

void round_quotient_f64(std::span<const double> num, std::span<const double> den,
                        std::span<std::int64_t> out) {
  const std::size_t n = out.size();
  // 2^52 + 2^51: adding it leaves the integer in the low mantissa bits.
  const __m256d magic = _mm256_set1_pd(6755399441055744.0);
  const __m256i magic_bits = _mm256_castpd_si256(magic);
  const __m256d half = _mm256_set1_pd(0.5);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d q = _mm256_div_pd(_mm256_loadu_pd(num.data() + i), _mm256_loadu_pd(den.data() + i));
    const __m256d r = _mm256_floor_pd(_mm256_add_pd(q, half));
    const __m256i bits = _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(r, magic)), magic_bits);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out.data() + i), bits);
  }
  if (i < n) {
    scalar::round_quotient_f64(num.subspan(i), den.subspan(i), out.subspan(i));
  }
}

}  // namespace census::kernels::avx2
