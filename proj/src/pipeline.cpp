#include "hyperrate/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hyperrate/entropy.hpp"
#include "hyperrate/quantizer.hpp"
#include "hyperrate/residual_stats.hpp"

namespace hyperrate {

namespace {
using Clock = std::chrono::steady_clock;

double seconds_between(Clock::time_point begin, Clock::time_point end) {
  return std::chrono::duration<double>(end - begin).count();
}
}  // namespace

void EncoderConfig::validate(const CubeGeometry &geometry) const {
  predictor.validate(geometry);
  controller.validate();
  if (subset_length < 1) {
    throw std::invalid_argument("subset_length must be positive");
  }
}

EncodeResult encode(const ImageCube &cube, const EncoderConfig &config, RateLut &lut,
                    bool keep_trace) {
  const CubeGeometry &geometry = cube.geometry();
  geometry.validate();
  config.validate(geometry);

  const std::int32_t n_cols = geometry.n_cols;
  const std::int32_t n_rows = geometry.n_rows;
  const std::int32_t n_bands = geometry.n_bands;
  const std::int64_t samples_per_line =
      static_cast<std::int64_t>(n_cols) * static_cast<std::int64_t>(n_bands);

  Predictor predictor(geometry, config.predictor);
  RateController controller(config.controller, n_bands, samples_per_line);
  std::vector<LineStatistics> stats(
      static_cast<std::size_t>(n_bands),
      LineStatistics(config.subset_length, RateLut::median_range - 1));
  std::vector<BandModel> models(static_cast<std::size_t>(n_bands));
  std::vector<std::int32_t> medians(static_cast<std::size_t>(n_bands), 0);

  RangeEncoder coder;
  EncodeResult result;
  result.reconstruction = ImageCube(geometry);
  result.stream.geometry = geometry;
  result.stream.predictor = config.predictor;
  result.stream.controller = config.controller;
  result.stream.subset_length = config.subset_length;
  result.stream.delta_table.reserve(static_cast<std::size_t>(n_rows));
  if (keep_trace) {
    result.trace.reserve(static_cast<std::size_t>(n_rows));
  }

  const std::uint64_t lookups_at_start = lut.lookup_count();
  std::uint64_t line_start_bits = 0;
  std::uint64_t line_start_lookups = lut.lookup_count();
  double controller_seconds = 0.0;

  for (std::int32_t y = 0; y < n_rows; ++y) {
    const StepSize step = controller.current_step();
    result.stream.delta_table.push_back(static_cast<std::uint8_t>(step.delta()));

    for (std::int32_t z = 0; z < n_bands; ++z) {
      for (std::int32_t x = 0; x < n_cols; ++x) {
        const std::int32_t predicted = predictor.predict(x, y, z);
        const std::int32_t residual = predicted - cube.at(x, y, z);
        stats[static_cast<std::size_t>(z)].push_residual(residual);

        const std::int32_t index = quantize(residual, step);
        encode_index(coder, models[static_cast<std::size_t>(z)], index);

        const std::int32_t reconstructed =
            std::clamp(predicted - dequantize(index, step), geometry.min_sample(),
                       geometry.max_sample());
        result.reconstruction.at(x, y, z) = reconstructed;
        predictor.update(x, y, z, reconstructed);
      }
      const auto begin = Clock::now();
      medians[static_cast<std::size_t>(z)] =
          stats[static_cast<std::size_t>(z)].finalize_line();
      controller_seconds += seconds_between(begin, Clock::now());
    }

    const std::int64_t line_bits =
        static_cast<std::int64_t>(coder.bits_emitted() - line_start_bits);
    line_start_bits = coder.bits_emitted();

    const auto begin = Clock::now();
    controller.update_target(line_bits);
    const StepSize next = controller.select_next_step(medians, lut);
    controller_seconds += seconds_between(begin, Clock::now());

    if (keep_trace) {
      result.trace.push_back({y, step.q, line_bits, controller.target_millibits(),
                              next.q, controller.last_predicted_millibits(),
                              lut.lookup_count() - line_start_lookups});
      line_start_lookups = lut.lookup_count();
    }
  }

  result.stream.payload = coder.finish();
  result.payload_bits = 8 * result.stream.payload.size();
  result.lut_lookups = lut.lookup_count() - lookups_at_start;
  result.controller_seconds = controller_seconds;
  return result;
}

ImageCube decode(const Bitstream &stream) {
  const CubeGeometry &geometry = stream.geometry;
  geometry.validate();
  if (stream.delta_table.size() != static_cast<std::size_t>(geometry.n_rows)) {
    throw CorruptStream("delta table length does not match row count");
  }

  Predictor predictor(geometry, stream.predictor);
  std::vector<BandModel> models(static_cast<std::size_t>(geometry.n_bands));
  RangeDecoder coder(stream.payload);
  ImageCube cube(geometry);

  for (std::int32_t y = 0; y < geometry.n_rows; ++y) {
    const StepSize step = StepSize::from_delta(stream.delta_table[static_cast<std::size_t>(y)]);
    for (std::int32_t z = 0; z < geometry.n_bands; ++z) {
      for (std::int32_t x = 0; x < geometry.n_cols; ++x) {
        const std::int32_t predicted = predictor.predict(x, y, z);
        const std::int32_t index = decode_index(coder, models[static_cast<std::size_t>(z)]);
        const std::int32_t reconstructed =
            std::clamp(predicted - dequantize(index, step), geometry.min_sample(),
                       geometry.max_sample());
        cube.at(x, y, z) = reconstructed;
        predictor.update(x, y, z, reconstructed);
      }
    }
  }
  return cube;
}

Distortion measure_distortion(const ImageCube &original, const ImageCube &reconstructed) {
  if (original.geometry() != reconstructed.geometry()) {
    throw std::invalid_argument("distortion requires identical geometries");
  }
  std::uint64_t signal_power = 0;
  std::uint64_t error_power = 0;
  std::int64_t mad = 0;
  const auto a = original.samples();
  const auto b = reconstructed.samples();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::int64_t s = a[i];
    const std::int64_t e = s - b[i];
    signal_power += static_cast<std::uint64_t>(s * s);
    error_power += static_cast<std::uint64_t>(e * e);
    mad = std::max(mad, e < 0 ? -e : e);
  }

  Distortion out;
  out.mad = static_cast<std::int32_t>(mad);
  out.lossless = error_power == 0;
  out.snr_db = out.lossless ? std::numeric_limits<double>::infinity()
                            : 10.0 * std::log10(static_cast<double>(signal_power) /
                                                static_cast<double>(error_power));
  return out;
}

}  // namespace hyperrate
