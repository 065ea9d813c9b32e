#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hyperrate/quantizer.hpp"

namespace hyperrate {

/// Closed-form rate (bits/sample) of an i.i.d. Laplacian source with scale
/// parameter 1/m, quantized by a uniform scalar quantizer of step q.
/// Both arguments must be positive.
double eval_rate(double m, double q);

/// Precomputed fixed-point rate table: entry(m, delta) = round(1000 *
/// eval_rate(m, 2*delta+1)) for m in [1,1023], with the m=0 row pinned to 0
/// (a zero-scale source is a point mass). 1024 x 256 uint16 entries, 512 KiB.
/// Lookups through lookup() are tallied so controller cost can be reported.
class RateLut {
public:
  static constexpr int median_range = 1024;  // rows: m in [0, 1023]
  static constexpr int delta_range = 256;    // cols: delta in [0, 255]

  static RateLut build();
  static RateLut load(const std::string &path);
  void dump(const std::string &path) const;

  /// Raw table read, no lookup accounting (oracles, serialization).
  [[nodiscard]] std::uint16_t entry(int m, int delta) const {
    return table_[static_cast<std::size_t>(m) * delta_range + static_cast<std::size_t>(delta)];
  }

  /// Millibits/sample for (m, step); counts one lookup.
  std::uint32_t lookup(int m, StepSize step) {
    ++lookups_;
    return entry(m, step.delta());
  }

  [[nodiscard]] std::uint64_t lookup_count() const { return lookups_; }
  void reset_lookup_count() { lookups_ = 0; }

  [[nodiscard]] std::uint16_t max_entry() const;

private:
  RateLut() = default;
  void verify_monotone() const;  // throws std::logic_error on violation

  std::vector<std::uint16_t> table_;
  std::uint64_t lookups_ = 0;
};

}  // namespace hyperrate
