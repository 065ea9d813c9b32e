#include "hyperrate/entropy.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <stdexcept>

namespace hyperrate {

namespace {
constexpr std::uint32_t kTopValue = 1u << 24;
constexpr int kProbBits = 12;
constexpr int kAdaptShift = 5;
}  // namespace

void RangeEncoder::shift_low() {
  if (static_cast<std::uint32_t>(low_) < 0xFF000000u || (low_ >> 32) != 0) {
    const auto carry = static_cast<std::uint8_t>(low_ >> 32);
    out_.push_back(static_cast<std::uint8_t>(cache_ + carry));
    for (; cache_size_ > 1; --cache_size_) {
      out_.push_back(static_cast<std::uint8_t>(0xFFu + carry));
    }
    cache_ = static_cast<std::uint8_t>(low_ >> 24);
  } else {
    ++cache_size_;
  }
  ++shifted_;
  low_ = (low_ & 0x00FFFFFFull) << 8;
}

void RangeEncoder::encode_bit(BitProbability &prob, std::uint32_t bit) {
  const std::uint32_t bound = (range_ >> kProbBits) * prob.value;
  if (bit == 0) {
    range_ = bound;
    prob.value += ((1u << kProbBits) - prob.value) >> kAdaptShift;
  } else {
    low_ += bound;
    range_ -= bound;
    prob.value -= prob.value >> kAdaptShift;
  }
  if (range_ < kTopValue) {
    shift_low();
    range_ <<= 8;
  }
}

void RangeEncoder::encode_bypass(std::uint32_t value, int n_bits) {
  for (int i = n_bits - 1; i >= 0; --i) {
    range_ >>= 1;
    if ((value >> i) & 1u) {
      low_ += range_;
    }
    if (range_ < kTopValue) {
      shift_low();
      range_ <<= 8;
    }
  }
}

std::vector<std::uint8_t> RangeEncoder::finish() {
  if (finished_) {
    throw std::logic_error("range encoder already finished");
  }
  finished_ = true;
  for (int i = 0; i < 5; ++i) {
    shift_low();
  }
  assert(cache_size_ == 1 && shifted_ == out_.size());
  return std::move(out_);
}

RangeDecoder::RangeDecoder(std::span<const std::uint8_t> bytes) : in_(bytes) {
  next_byte();  // encoder's initial cache byte, always discarded
  for (int i = 0; i < 4; ++i) {
    code_ = (code_ << 8) | next_byte();
  }
}

std::uint8_t RangeDecoder::next_byte() {
  if (pos_ >= in_.size()) {
    throw CorruptStream("range-coded payload ends prematurely");
  }
  return in_[pos_++];
}

std::uint32_t RangeDecoder::decode_bit(BitProbability &prob) {
  const std::uint32_t bound = (range_ >> kProbBits) * prob.value;
  std::uint32_t bit;
  if (code_ < bound) {
    range_ = bound;
    prob.value += ((1u << kProbBits) - prob.value) >> kAdaptShift;
    bit = 0;
  } else {
    code_ -= bound;
    range_ -= bound;
    prob.value -= prob.value >> kAdaptShift;
    bit = 1;
  }
  if (range_ < kTopValue) {
    range_ <<= 8;
    code_ = (code_ << 8) | next_byte();
  }
  return bit;
}

std::uint32_t RangeDecoder::decode_bypass(int n_bits) {
  std::uint32_t value = 0;
  for (int i = 0; i < n_bits; ++i) {
    range_ >>= 1;
    std::uint32_t bit = 0;
    if (code_ >= range_) {
      code_ -= range_;
      bit = 1;
    }
    value = (value << 1) | bit;
    if (range_ < kTopValue) {
      range_ <<= 8;
      code_ = (code_ << 8) | next_byte();
    }
  }
  return value;
}

void encode_index(RangeEncoder &coder, BandModel &model, std::int32_t q) {
  coder.encode_bit(model.zero_flag, q == 0 ? 0 : 1);
  if (q == 0) {
    return;
  }
  coder.encode_bit(model.sign, q < 0 ? 1 : 0);
  const auto magnitude = static_cast<std::uint32_t>(
      q < 0 ? -static_cast<std::int64_t>(q) : static_cast<std::int64_t>(q));
  const std::uint32_t group = std::bit_width(magnitude) - 1;
  const std::size_t last = model.prefix.size() - 1;
  for (std::uint32_t i = 0; i < group; ++i) {
    coder.encode_bit(model.prefix[std::min<std::size_t>(i, last)], 1);
  }
  coder.encode_bit(model.prefix[std::min<std::size_t>(group, last)], 0);
  if (group > 0) {
    coder.encode_bypass(magnitude - (1u << group), static_cast<int>(group));
  }
}

std::int32_t decode_index(RangeDecoder &coder, BandModel &model) {
  if (coder.decode_bit(model.zero_flag) == 0) {
    return 0;
  }
  const std::uint32_t negative = coder.decode_bit(model.sign);
  const std::size_t last = model.prefix.size() - 1;
  std::uint32_t group = 0;
  while (coder.decode_bit(model.prefix[std::min<std::size_t>(group, last)]) == 1) {
    if (++group > 31) {
      throw CorruptStream("residual magnitude prefix overflows 32 bits");
    }
  }
  std::uint32_t magnitude = 1u << group;
  if (group > 0) {
    magnitude |= coder.decode_bypass(static_cast<int>(group));
  }
  return negative != 0 ? -static_cast<std::int32_t>(magnitude)
                       : static_cast<std::int32_t>(magnitude);
}

}  // namespace hyperrate
