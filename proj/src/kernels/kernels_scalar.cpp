#include "census/kernels.hpp"

#include <cmath>

namespace census::kernels::scalar {

MinMax minmax_i64(std::span<const std::int64_t> values) {
  MinMax r{values[0], values[0]};
  for (const std::int64_t x : values.subspan(1)) {
    if (x < r.min) r.min = x;
    if (x > r.max) r.max = x;
  }
  return r;
}

std::size_t count_equal_i64(std::span<const std::int64_t> values, std::int64_t target) {
  std::size_t count = 0;
  for (const std::int64_t x : values) count += (x == target);
  return count;
}

void round_quotient_f64(std::span<const double> num, std::span<const double> den,
                        std::span<std::int64_t> out) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::int64_t>(std::floor(num[i] / den[i] + 0.5));
  }
}

}  // namespace census::kernels::scalar
