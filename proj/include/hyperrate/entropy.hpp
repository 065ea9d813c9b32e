#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "hyperrate/errors.hpp"

namespace hyperrate {

// Signed-to-unsigned fold: 0,-1,1,-2,2,... -> 0,1,2,3,4,...
constexpr std::uint32_t map_index(std::int32_t q) {
  return q >= 0 ? 2u * static_cast<std::uint32_t>(q)
                : 2u * static_cast<std::uint32_t>(-static_cast<std::int64_t>(q)) - 1u;
}

constexpr std::int32_t unmap_index(std::uint32_t u) {
  return (u & 1u) != 0 ? -static_cast<std::int32_t>((u + 1u) / 2u)
                       : static_cast<std::int32_t>(u / 2u);
}

// Adaptive bit probability, 12-bit fixed point for P(bit == 0).
struct BitProbability {
  std::uint16_t value = 2048;
};

class RangeEncoder {
public:
  void encode_bit(BitProbability &prob, std::uint32_t bit);
  void encode_bypass(std::uint32_t value, int n_bits);
  // Terminates the stream; at most 8 trailing bytes. Single use.
  std::vector<std::uint8_t> finish();
  // Bytes fully determined so far; after finish() this is exactly the output size.
  [[nodiscard]] std::uint64_t bits_emitted() const { return 8 * shifted_; }

private:
  void shift_low();
  std::vector<std::uint8_t> out_;
  std::uint64_t low_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint8_t cache_ = 0;
  std::uint64_t cache_size_ = 1;
  std::uint64_t shifted_ = 0;
  bool finished_ = false;
};

class RangeDecoder {
public:
  explicit RangeDecoder(std::span<const std::uint8_t> bytes);
  std::uint32_t decode_bit(BitProbability &prob);
  std::uint32_t decode_bypass(int n_bits);

private:
  std::uint8_t next_byte();
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint32_t code_ = 0;
};

// Adaptive contexts for one band's residual indices.
struct BandModel {
  BitProbability zero_flag;
  BitProbability sign;
  std::array<BitProbability, 24> prefix;
};

// Binarization: zero flag, sign, then magnitude-1 as Exp-Golomb(0) with
// adaptive prefix bins and bypass suffix bits.
void encode_index(RangeEncoder &coder, BandModel &model, std::int32_t q);
std::int32_t decode_index(RangeDecoder &coder, BandModel &model);

}  // namespace hyperrate
