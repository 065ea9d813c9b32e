#include "hyperrate/residual_stats.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace hyperrate {

std::int32_t median_small(std::span<const std::int32_t> values) {
  if (values.empty()) {
    throw std::invalid_argument("median of empty list");
  }
  // Lists here are at most subset-sized; a plain sort of a stack copy wins.
  std::array<std::int32_t, 64> local{};
  std::vector<std::int32_t> heap;
  std::int32_t *buf = local.data();
  if (values.size() > local.size()) {
    heap.assign(values.begin(), values.end());
    buf = heap.data();
  } else {
    std::copy(values.begin(), values.end(), buf);
  }
  std::sort(buf, buf + values.size());
  return buf[(values.size() - 1) / 2];
}

LineStatistics::LineStatistics(int subset_length, std::int32_t median_cap)
    : subset_length_(subset_length), median_cap_(median_cap) {
  if (subset_length < 1) {
    throw std::invalid_argument("subset length must be >= 1");
  }
  if (median_cap < 0) {
    throw std::invalid_argument("median cap must be >= 0");
  }
  subset_.reserve(static_cast<std::size_t>(subset_length));
}

void LineStatistics::push_residual(std::int32_t residual) {
  subset_.push_back(residual < 0 ? -residual : residual);
  if (static_cast<int>(subset_.size()) == subset_length_) {
    medians_.push_back(median_small(subset_));
    subset_.clear();
  }
}

std::int32_t LineStatistics::finalize_line() {
  if (!subset_.empty()) {
    medians_.push_back(median_small(subset_));
    subset_.clear();
  }
  if (medians_.empty()) {
    throw std::logic_error("finalize_line with no residuals pushed");
  }
  const std::int32_t m = median_small(medians_);
  medians_.clear();
  return std::min(m, median_cap_);
}

}  // namespace hyperrate
