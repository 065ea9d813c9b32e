#pragma once

#include <cstdint>
#include <stdexcept>

namespace hyperrate {

/// Odd uniform quantizer step. delta() = (q-1)/2 is both the worst-case
/// per-sample reconstruction error and the rate-table column index.
struct StepSize {
  static constexpr int max_step = 511;

  std::int32_t q = 1;

  [[nodiscard]] constexpr std::int32_t delta() const { return (q - 1) / 2; }

  static StepSize from_step(std::int32_t q) {
    if (q < 1 || q > max_step || (q % 2) == 0) {
      throw std::invalid_argument("step size must be odd and in [1,511]");
    }
    return {q};
  }

  static StepSize from_delta(std::int32_t delta) {
    if (delta < 0 || delta > (max_step - 1) / 2) {
      throw std::invalid_argument("delta must be in [0,255]");
    }
    return {2 * delta + 1};
  }

  constexpr bool operator==(const StepSize &) const = default;
};

/// q = sgn(r) * floor((|r| + (Q-1)/2) / Q); guarantees |r - q*Q| <= (Q-1)/2.
constexpr std::int32_t quantize(std::int32_t residual, StepSize step) {
  const std::int64_t magnitude = residual < 0 ? -static_cast<std::int64_t>(residual) : residual;
  const std::int64_t index = (magnitude + step.delta()) / step.q;
  return static_cast<std::int32_t>(residual < 0 ? -index : index);
}

/// Midpoint reconstruction of a quantizer index.
constexpr std::int32_t dequantize(std::int32_t index, StepSize step) {
  return index * step.q;
}

}  // namespace hyperrate
