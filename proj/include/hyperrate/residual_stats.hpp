#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace hyperrate {

/// Exact median of a small list; for even lengths the lower of the two middle
/// elements (pure selection, no averaging). Throws on empty input.
std::int32_t median_small(std::span<const std::int32_t> values);

/// Streaming median-of-medians over the magnitudes of one band's residuals
/// for the current spectral line. Residual magnitudes fill a subset buffer;
/// each full subset of subset_length entries contributes one median, the
/// trailing partial subset contributes its own, and finalize_line() takes
/// the median of those medians, clamped to [0, median_cap].
class LineStatistics {
public:
  LineStatistics(int subset_length, std::int32_t median_cap);

  void push_residual(std::int32_t residual);

  /// Median of subset medians for the line just finished; resets buffers.
  /// Throws std::logic_error if nothing was pushed since the last reset.
  std::int32_t finalize_line();

  [[nodiscard]] int pending_subset_size() const { return static_cast<int>(subset_.size()); }
  [[nodiscard]] int subset_median_count() const { return static_cast<int>(medians_.size()); }

private:
  int subset_length_;
  std::int32_t median_cap_;
  std::vector<std::int32_t> subset_;
  std::vector<std::int32_t> medians_;
};

}  // namespace hyperrate
