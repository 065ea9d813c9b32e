#pragma once

#include <cstdint>
#include <span>

#include "hyperrate/quantizer.hpp"
#include "hyperrate/rate_model.hpp"

namespace hyperrate {

struct ControllerConfig {
  std::int64_t target_millibits = 2000;  // user rate target, millibits/sample
  std::int32_t q_max = 511;              // odd cap on the step size
  std::int32_t tau = 5;                  // feedback damping, in lines
  std::int32_t window = 1;               // |I|, lines entering the feedback
  std::int32_t q_init = 1;               // step for the first line

  void validate() const;

  bool operator==(const ControllerConfig &) const = default;
};

/// Per-line step selection and feedback target adjustment. One instance per
/// encode, driven at each line's final pixel: update_target() with the line's
/// measured payload bits, then select_next_step() with the band medians.
class RateController {
public:
  RateController(const ControllerConfig &config, std::int32_t n_bands,
                 std::int64_t samples_per_line);

  [[nodiscard]] StepSize current_step() const { return step_; }
  [[nodiscard]] std::int64_t target_millibits() const { return target_millibits_; }
  [[nodiscard]] std::uint64_t produced_payload_bits() const { return produced_bits_; }
  [[nodiscard]] std::int64_t lines_done() const { return lines_done_; }
  [[nodiscard]] std::int64_t last_predicted_millibits() const { return last_predicted_; }

  /// Folds one finished line's payload size into the running budget and
  /// re-derives the working target: the accumulated budget surplus/deficit,
  /// spread over tau lines, is added to the user rate.
  void update_target(std::int64_t actual_line_bits);

  /// Walks the step up or down in strides of 2 from the previous line's step
  /// until the summed table rate crosses the per-line target, then rolls back
  /// one stride if the previous candidate was strictly closer. Returns (and
  /// latches) the step for the next line.
  StepSize select_next_step(std::span<const std::int32_t> band_medians, RateLut &lut);

private:
  [[nodiscard]] std::int64_t line_rate_sum(std::span<const std::int32_t> band_medians,
                                           std::int32_t q, RateLut &lut) const;

  ControllerConfig config_;
  std::int32_t n_bands_;
  std::int64_t samples_per_line_;
  StepSize step_;
  std::int64_t target_millibits_;
  std::uint64_t produced_bits_ = 0;
  std::int64_t lines_done_ = 0;
  std::int64_t last_predicted_ = 0;
};

}  // namespace hyperrate
