#include "census/engine.hpp"

namespace census {

std::uint64_t default_probe_window(std::uint32_t n) {
  const double w = 10.0 * n * std::log(static_cast<double>(n));
  return std::max<std::uint64_t>(n, static_cast<std::uint64_t>(std::ceil(w)));
}

namespace detail {

void PhaseTracker::ensure(std::uint32_t p) {
  if (p >= count_.size()) {
    count_.resize(p + 1, 0);
    all_reached_.resize(p + 1);
    first_reached_.resize(p + 1);
  }
}

void PhaseTracker::init(std::uint32_t n, std::uint32_t initial_phase) {
  ensure(initial_phase);
  count_[initial_phase] = n;
  min_ = max_ = initial_phase;
  all_reached_[initial_phase] = 0;
  first_reached_[initial_phase] = 0;
}

void PhaseTracker::move(std::uint32_t from, std::uint32_t to, std::uint64_t t) {
  ensure(std::max(from, to) + 1);
  --count_[from];
  ++count_[to];
  if (to > max_) {
    for (std::uint32_t p = max_ + 1; p <= to; ++p) {
      if (!first_reached_[p]) first_reached_[p] = t;
    }
    max_ = to;
  }
  if (to < min_) {
    // A reset sends an agent back; earlier records stay as they were.
    min_ = to;
    return;
  }
  while (count_[min_] == 0 && min_ < max_) {
    ++min_;
    if (!all_reached_[min_]) all_reached_[min_] = t;
  }
}

std::vector<PhaseInterval> PhaseTracker::intervals() const {
  std::vector<PhaseInterval> out;
  for (std::uint32_t p = 0; p + 1 < first_reached_.size(); ++p) {
    if (all_reached_[p] && first_reached_[p + 1]) {
      out.push_back({p, *all_reached_[p], *first_reached_[p + 1] - 1});
    }
  }
  return out;
}

}  // namespace detail

}  // namespace census
