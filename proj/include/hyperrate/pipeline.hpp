#pragma once

#include <cstdint>
#include <vector>

#include "hyperrate/bitstream.hpp"
#include "hyperrate/image.hpp"
#include "hyperrate/predictor.hpp"
#include "hyperrate/rate_controller.hpp"
#include "hyperrate/rate_model.hpp"

namespace hyperrate {

struct EncoderConfig {
  PredictorConfig predictor;
  ControllerConfig controller;
  std::int32_t subset_length = 17;  // residual magnitudes per median subset

  void validate(const CubeGeometry &geometry) const;
};

// One row's rate-control record: the step it was coded with, its measured
// payload bits, the feedback-adjusted working target after it, and the
// controller's choice/prediction for the next row.
struct LineTrace {
  std::int32_t line = 0;
  std::int32_t q = 0;
  std::int64_t actual_bits = 0;
  std::int64_t working_target_millibits = 0;
  std::int32_t next_q = 0;
  std::int64_t predicted_band_sum_millibits = 0;
  std::uint64_t lut_lookups = 0;
};

struct EncodeResult {
  Bitstream stream;
  ImageCube reconstruction;  // encoder's in-loop reconstruction
  std::uint64_t payload_bits = 0;
  std::uint64_t lut_lookups = 0;
  double controller_seconds = 0.0;  // statistics finalization + feedback + step search
  std::vector<LineTrace> trace;
};

EncodeResult encode(const ImageCube &cube, const EncoderConfig &config, RateLut &lut,
                    bool keep_trace = false);

ImageCube decode(const Bitstream &stream);

struct Distortion {
  double snr_db = 0.0;  // +infinity when reconstruction is exact
  std::int32_t mad = 0;
  bool lossless = false;
};

Distortion measure_distortion(const ImageCube &original, const ImageCube &reconstructed);

}  // namespace hyperrate
