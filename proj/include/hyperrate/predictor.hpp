#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hyperrate/image.hpp"

namespace hyperrate {

struct PredictorConfig {
  std::int32_t num_prev_bands = 0;       // bands of spectral context (P)
  std::int32_t weight_resolution = 13;   // fractional bits of the weight fixed point
  std::int32_t adapt_shift_initial = 4;  // sign-LMS step exponent at the start of a band
  std::int32_t adapt_shift_final = 9;    // exponent cap
  std::int32_t adapt_shift_interval = 64;  // samples per exponent increment
  std::int32_t register_size = 64;       // accumulator width the inner product must fit

  void validate(const CubeGeometry &geometry) const;

  /// Bits needed so the prediction accumulator cannot overflow for this
  /// geometry (worst-case weights times worst-case local differences).
  [[nodiscard]] int required_register_bits(const CubeGeometry &geometry) const;

  bool operator==(const PredictorConfig &) const = default;
};

/// Closed-loop adaptive linear predictor. Integer arithmetic only; encoder
/// and decoder run identical instances fed with identical reconstructed
/// samples, so their weight and history trajectories match bit for bit.
///
/// Per sample, in BIL order: predict(x,y,z) then update(x,y,z,reconstructed).
/// The prediction is round(w.d / 2^res + sigma/4) clamped to the sample
/// range, where sigma is the four-neighbor local sum of reconstructed
/// samples (first row: 4*west; first column: north substituted for the
/// missing west neighbors; right edge: north for north-east) and d holds the
/// central local differences of the previous num_prev_bands bands plus the
/// north/west/north-west directional differences of the current band.
class Predictor {
public:
  Predictor(const CubeGeometry &geometry, const PredictorConfig &config);

  std::int32_t predict(int x, int y, int z);
  void update(int x, int y, int z, std::int32_t reconstructed);

  [[nodiscard]] std::span<const std::int32_t> weights(int z) const {
    return bands_[static_cast<std::size_t>(z)].weights;
  }

private:
  struct BandState {
    std::vector<std::int32_t> prev_row;
    std::vector<std::int32_t> curr_row;
    std::vector<std::int32_t> weights;
    std::int64_t samples_coded = 0;
    std::int32_t last_row_started = -1;
  };

  [[nodiscard]] std::int64_t local_sum(const BandState &band, int x, int y) const;
  void gather_differences(int x, int y, int z);

  CubeGeometry geometry_;
  PredictorConfig config_;
  std::vector<BandState> bands_;
  std::vector<std::int64_t> diffs_;  // scratch shared by predict/update
  std::int64_t pending_index_ = -1;  // linear index predict() was last called for
  std::int32_t pending_prediction_ = 0;
  std::int32_t weight_min_ = 0;
  std::int32_t weight_max_ = 0;
};

}  // namespace hyperrate
