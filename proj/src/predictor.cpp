#include "hyperrate/predictor.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace hyperrate {

void PredictorConfig::validate(const CubeGeometry &geometry) const {
  if (num_prev_bands < 0 || num_prev_bands > geometry.n_bands - 1) {
    throw std::invalid_argument("num_prev_bands must be in [0, n_bands-1]");
  }
  if (weight_resolution < 4 || weight_resolution > 19) {
    throw std::invalid_argument("weight_resolution must be in [4,19]");
  }
  if (adapt_shift_initial < 0 || adapt_shift_final < adapt_shift_initial ||
      adapt_shift_final > 30 || adapt_shift_interval < 1) {
    throw std::invalid_argument("bad adaptation exponent schedule");
  }
  if (register_size < required_register_bits(geometry) || register_size > 64) {
    throw std::invalid_argument("register_size too small for this geometry");
  }
}

int PredictorConfig::required_register_bits(const CubeGeometry &geometry) const {
  const std::uint64_t range = static_cast<std::uint64_t>(geometry.max_sample()) -
                              static_cast<std::uint64_t>(geometry.min_sample());
  const std::uint64_t diff_max = 4 * range;                     // |4*recon - sigma|
  const std::uint64_t weight_max = 1ull << (weight_resolution + 3);
  const std::uint64_t terms = static_cast<std::uint64_t>(num_prev_bands) + 3;
  // |4*w.d + sigma*2^res| plus the rounding constant
  const std::uint64_t bound = 4 * terms * weight_max * diff_max +
                              (diff_max << weight_resolution) +
                              (1ull << (weight_resolution + 1));
  return std::bit_width(bound) + 1;  // sign bit
}

Predictor::Predictor(const CubeGeometry &geometry, const PredictorConfig &config)
    : geometry_(geometry), config_(config) {
  geometry_.validate();
  config_.validate(geometry_);
  weight_max_ = (std::int32_t{1} << (config_.weight_resolution + 3)) - 1;
  weight_min_ = -(std::int32_t{1} << (config_.weight_resolution + 3));

  const auto cols = static_cast<std::size_t>(geometry_.n_cols);
  const auto n_weights = static_cast<std::size_t>(config_.num_prev_bands) + 3;
  bands_.resize(static_cast<std::size_t>(geometry_.n_bands));
  for (auto &band : bands_) {
    band.prev_row.assign(cols, 0);
    band.curr_row.assign(cols, 0);
    band.weights.assign(n_weights, 0);
    if (config_.num_prev_bands > 0) {
      band.weights[0] = 7 << (config_.weight_resolution - 3);  // 7/8 of unit scale
    }
  }
  diffs_.assign(n_weights, 0);
}

std::int64_t Predictor::local_sum(const BandState &band, int x, int y) const {
  if (y == 0) {
    return 4ll * band.curr_row[static_cast<std::size_t>(x - 1)];
  }
  const auto &prev = band.prev_row;
  const auto &curr = band.curr_row;
  const std::int64_t n = prev[static_cast<std::size_t>(x)];
  if (x == 0) {
    return 3 * n + prev[1 < geometry_.n_cols ? 1u : 0u];
  }
  const std::int64_t w = curr[static_cast<std::size_t>(x - 1)];
  const std::int64_t nw = prev[static_cast<std::size_t>(x - 1)];
  const std::int64_t ne =
      x + 1 < geometry_.n_cols ? prev[static_cast<std::size_t>(x + 1)] : n;
  return w + n + nw + ne;
}

void Predictor::gather_differences(int x, int y, int z) {
  const std::size_t n_central = static_cast<std::size_t>(config_.num_prev_bands);
  if (x == 0 && y == 0) {
    std::fill(diffs_.begin(), diffs_.end(), 0);
    return;
  }
  for (std::size_t p = 1; p <= n_central; ++p) {
    if (static_cast<std::size_t>(z) < p) {
      diffs_[p - 1] = 0;
      continue;
    }
    const BandState &ref = bands_[static_cast<std::size_t>(z) - p];
    diffs_[p - 1] =
        4ll * ref.curr_row[static_cast<std::size_t>(x)] - local_sum(ref, x, y);
  }
  const BandState &band = bands_[static_cast<std::size_t>(z)];
  const std::int64_t sigma = local_sum(band, x, y);
  if (y == 0) {
    diffs_[n_central] = 0;
    diffs_[n_central + 1] = 0;
    diffs_[n_central + 2] = 0;
    return;
  }
  const std::int64_t n = band.prev_row[static_cast<std::size_t>(x)];
  const std::int64_t w = x > 0 ? band.curr_row[static_cast<std::size_t>(x - 1)] : n;
  const std::int64_t nw = x > 0 ? band.prev_row[static_cast<std::size_t>(x - 1)] : n;
  diffs_[n_central] = 4 * n - sigma;
  diffs_[n_central + 1] = 4 * w - sigma;
  diffs_[n_central + 2] = 4 * nw - sigma;
}

std::int32_t Predictor::predict(int x, int y, int z) {
  BandState &band = bands_[static_cast<std::size_t>(z)];
  if (x == 0 && band.last_row_started != y) {
    if (y > 0) {
      std::swap(band.prev_row, band.curr_row);
    }
    band.last_row_started = y;
  }

  std::int32_t prediction = 0;
  if (x == 0 && y == 0) {
    gather_differences(x, y, z);
    const std::int32_t spectral_floor = std::max(config_.num_prev_bands, 1);
    prediction = z < spectral_floor ? geometry_.mid_sample()
                                    : bands_[static_cast<std::size_t>(z) - 1].curr_row[0];
  } else {
    gather_differences(x, y, z);
    const std::int64_t sigma = local_sum(band, x, y);
    std::int64_t inner = 0;
    for (std::size_t i = 0; i < diffs_.size(); ++i) {
      inner += static_cast<std::int64_t>(band.weights[i]) * diffs_[i];
    }
    const int shift = config_.weight_resolution + 2;
    const std::int64_t numerator =
        4 * inner + (sigma << config_.weight_resolution) + (1ll << (shift - 1));
    prediction = static_cast<std::int32_t>(numerator >> shift);
  }
  prediction = std::clamp(prediction, geometry_.min_sample(), geometry_.max_sample());

  pending_index_ = static_cast<std::int64_t>(
      (static_cast<std::size_t>(y) * static_cast<std::size_t>(geometry_.n_bands) +
       static_cast<std::size_t>(z)) *
          static_cast<std::size_t>(geometry_.n_cols) +
      static_cast<std::size_t>(x));
  pending_prediction_ = prediction;
  return prediction;
}

void Predictor::update(int x, int y, int z, std::int32_t reconstructed) {
  BandState &band = bands_[static_cast<std::size_t>(z)];
  const auto index = static_cast<std::int64_t>(
      (static_cast<std::size_t>(y) * static_cast<std::size_t>(geometry_.n_bands) +
       static_cast<std::size_t>(z)) *
          static_cast<std::size_t>(geometry_.n_cols) +
      static_cast<std::size_t>(x));
  if (index != pending_index_) {
    throw std::logic_error("update() must follow predict() for the same position");
  }
  pending_index_ = -1;

  const std::int32_t error = reconstructed - pending_prediction_;
  if (error != 0) {
    const std::int64_t sign = error > 0 ? 1 : -1;
    const std::int32_t shift =
        std::min<std::int64_t>(config_.adapt_shift_final,
                               config_.adapt_shift_initial +
                                   band.samples_coded / config_.adapt_shift_interval);
    for (std::size_t i = 0; i < diffs_.size(); ++i) {
      const std::int64_t updated =
          static_cast<std::int64_t>(band.weights[i]) + ((sign * diffs_[i]) >> shift);
      band.weights[i] = static_cast<std::int32_t>(
          std::clamp<std::int64_t>(updated, weight_min_, weight_max_));
    }
  }
  band.curr_row[static_cast<std::size_t>(x)] = reconstructed;
  ++band.samples_coded;
}

}  // namespace hyperrate
