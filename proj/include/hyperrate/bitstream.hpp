#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "hyperrate/errors.hpp"
#include "hyperrate/image.hpp"
#include "hyperrate/predictor.hpp"
#include "hyperrate/rate_controller.hpp"

namespace hyperrate {

inline constexpr char kStreamMagic[4] = {'H', 'R', 'C', '1'};
inline constexpr std::uint16_t kStreamVersion = 1;

// Container: fixed little-endian header, one quantizer half-width byte per
// image row, then the range-coded payload.
struct Bitstream {
  CubeGeometry geometry;
  PredictorConfig predictor;
  ControllerConfig controller;
  std::int32_t subset_length = 0;
  std::vector<std::uint8_t> delta_table;
  std::vector<std::uint8_t> payload;
};

std::vector<std::uint8_t> serialize(const Bitstream &stream);
Bitstream parse_bitstream(std::span<const std::uint8_t> bytes);

void store_bitstream(const std::filesystem::path &path, const Bitstream &stream);
Bitstream load_bitstream(const std::filesystem::path &path);

}  // namespace hyperrate
