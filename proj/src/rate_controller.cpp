#include "hyperrate/rate_controller.hpp"

#include <cstdlib>
#include <stdexcept>

namespace hyperrate {

void ControllerConfig::validate() const {
  if (target_millibits <= 0) {
    throw std::invalid_argument("rate target must be positive");
  }
  if (q_max < 1 || q_max > StepSize::max_step || (q_max % 2) == 0) {
    throw std::invalid_argument("q_max must be odd and in [1,511]");
  }
  if (tau < 1) {
    throw std::invalid_argument("tau must be >= 1");
  }
  if (window < 1) {
    throw std::invalid_argument("feedback window must be >= 1");
  }
  if (q_init < 1 || q_init > q_max || (q_init % 2) == 0) {
    throw std::invalid_argument("q_init must be odd and in [1,q_max]");
  }
}

RateController::RateController(const ControllerConfig &config, std::int32_t n_bands,
                               std::int64_t samples_per_line)
    : config_(config),
      n_bands_(n_bands),
      samples_per_line_(samples_per_line),
      step_{config.q_init},
      target_millibits_(config.target_millibits) {
  config_.validate();
  if (n_bands < 1 || samples_per_line < 1) {
    throw std::invalid_argument("controller needs at least one band and one sample per line");
  }
}

void RateController::update_target(std::int64_t actual_line_bits) {
  produced_bits_ += static_cast<std::uint64_t>(actual_line_bits);
  ++lines_done_;
  const std::int64_t budget_mb = config_.target_millibits * lines_done_ * samples_per_line_;
  const std::int64_t produced_mb = static_cast<std::int64_t>(produced_bits_) * 1000;
  const std::int64_t correction =
      (budget_mb - produced_mb) / (static_cast<std::int64_t>(config_.tau) * samples_per_line_);
  target_millibits_ = config_.target_millibits + correction;
  if (target_millibits_ < 0) {
    target_millibits_ = 0;
  }
}

std::int64_t RateController::line_rate_sum(std::span<const std::int32_t> band_medians,
                                           std::int32_t q, RateLut &lut) const {
  const StepSize step{q};
  std::int64_t sum = 0;
  for (const std::int32_t m : band_medians) {
    sum += lut.lookup(m, step);
  }
  return sum;
}

StepSize RateController::select_next_step(std::span<const std::int32_t> band_medians,
                                          RateLut &lut) {
  if (static_cast<std::int32_t>(band_medians.size()) != n_bands_) {
    throw std::invalid_argument("median vector length must equal the band count");
  }
  const std::int64_t line_target = target_millibits_ * n_bands_;

  std::int32_t q = step_.q;
  std::int64_t rate = line_rate_sum(band_medians, q, lut);
  std::int64_t rate_prev = rate;
  if (rate >= line_target) {
    while (rate >= line_target && q < config_.q_max) {
      rate_prev = rate;
      q += 2;
      rate = line_rate_sum(band_medians, q, lut);
    }
    if (std::llabs(rate - line_target) > std::llabs(rate_prev - line_target)) {
      q -= 2;
      rate = rate_prev;
    }
  } else {
    while (rate <= line_target && q > 1) {
      rate_prev = rate;
      q -= 2;
      rate = line_rate_sum(band_medians, q, lut);
    }
    if (std::llabs(rate - line_target) > std::llabs(rate_prev - line_target)) {
      q += 2;
      rate = rate_prev;
    }
  }
  last_predicted_ = rate;
  step_ = StepSize{q};
  return step_;
}

}  // namespace hyperrate
