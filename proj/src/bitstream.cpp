#include "hyperrate/bitstream.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace hyperrate {

namespace {

void put_u8(std::vector<std::uint8_t> &out, std::uint8_t v) { out.push_back(v); }

void put_u16(std::vector<std::uint8_t> &out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t> &out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
}

void put_u64(std::vector<std::uint8_t> &out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
}

struct ByteReader {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (bytes.size() - pos < n) {
      throw CorruptStream("bitstream truncated");
    }
  }
  std::uint8_t u8() {
    need(1);
    return bytes[pos++];
  }
  std::uint16_t u16() {
    std::uint16_t v = u8();
    return static_cast<std::uint16_t>(v | (static_cast<std::uint16_t>(u8()) << 8));
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    }
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(u8()) << (8 * i);
    }
    return v;
  }
};

}  // namespace

std::vector<std::uint8_t> serialize(const Bitstream &stream) {
  if (stream.delta_table.size() != static_cast<std::size_t>(stream.geometry.n_rows)) {
    throw std::logic_error("delta table must hold one byte per image row");
  }
  std::vector<std::uint8_t> out;
  out.reserve(64 + stream.delta_table.size() + stream.payload.size());

  out.insert(out.end(), kStreamMagic, kStreamMagic + 4);
  put_u16(out, kStreamVersion);

  put_u32(out, static_cast<std::uint32_t>(stream.geometry.n_cols));
  put_u32(out, static_cast<std::uint32_t>(stream.geometry.n_rows));
  put_u32(out, static_cast<std::uint32_t>(stream.geometry.n_bands));
  put_u8(out, static_cast<std::uint8_t>(stream.geometry.bit_depth));
  put_u8(out, stream.geometry.is_signed ? 1 : 0);
  put_u8(out, static_cast<std::uint8_t>(stream.geometry.byte_order));

  put_u16(out, static_cast<std::uint16_t>(stream.predictor.num_prev_bands));
  put_u8(out, static_cast<std::uint8_t>(stream.predictor.weight_resolution));
  put_u8(out, static_cast<std::uint8_t>(stream.predictor.adapt_shift_initial));
  put_u8(out, static_cast<std::uint8_t>(stream.predictor.adapt_shift_final));
  put_u32(out, static_cast<std::uint32_t>(stream.predictor.adapt_shift_interval));
  put_u8(out, static_cast<std::uint8_t>(stream.predictor.register_size));

  put_u64(out, static_cast<std::uint64_t>(stream.controller.target_millibits));
  put_u16(out, static_cast<std::uint16_t>(stream.controller.q_max));
  put_u32(out, static_cast<std::uint32_t>(stream.controller.tau));
  put_u32(out, static_cast<std::uint32_t>(stream.controller.window));
  put_u16(out, static_cast<std::uint16_t>(stream.controller.q_init));

  put_u32(out, static_cast<std::uint32_t>(stream.subset_length));
  put_u64(out, stream.payload.size());

  out.insert(out.end(), stream.delta_table.begin(), stream.delta_table.end());
  out.insert(out.end(), stream.payload.begin(), stream.payload.end());
  return out;
}

Bitstream parse_bitstream(std::span<const std::uint8_t> bytes) {
  ByteReader in{bytes};

  in.need(4);
  if (std::memcmp(bytes.data(), kStreamMagic, 4) != 0) {
    throw CorruptStream("bad magic, not a hyperrate stream");
  }
  in.pos = 4;
  if (in.u16() != kStreamVersion) {
    throw CorruptStream("unsupported stream version");
  }

  Bitstream stream;
  stream.geometry.n_cols = static_cast<std::int32_t>(in.u32());
  stream.geometry.n_rows = static_cast<std::int32_t>(in.u32());
  stream.geometry.n_bands = static_cast<std::int32_t>(in.u32());
  stream.geometry.bit_depth = in.u8();
  const std::uint8_t signed_flag = in.u8();
  const std::uint8_t order_flag = in.u8();
  if (signed_flag > 1 || order_flag > 1) {
    throw CorruptStream("bad geometry flags");
  }
  stream.geometry.is_signed = signed_flag != 0;
  stream.geometry.byte_order = static_cast<ByteOrder>(order_flag);

  stream.predictor.num_prev_bands = in.u16();
  stream.predictor.weight_resolution = in.u8();
  stream.predictor.adapt_shift_initial = in.u8();
  stream.predictor.adapt_shift_final = in.u8();
  stream.predictor.adapt_shift_interval = static_cast<std::int32_t>(in.u32());
  stream.predictor.register_size = in.u8();

  stream.controller.target_millibits = static_cast<std::int64_t>(in.u64());
  stream.controller.q_max = in.u16();
  stream.controller.tau = static_cast<std::int32_t>(in.u32());
  stream.controller.window = static_cast<std::int32_t>(in.u32());
  stream.controller.q_init = in.u16();

  stream.subset_length = static_cast<std::int32_t>(in.u32());
  const std::uint64_t payload_bytes = in.u64();

  try {
    stream.geometry.validate();
    stream.predictor.validate(stream.geometry);
    stream.controller.validate();
  } catch (const std::invalid_argument &err) {
    throw CorruptStream(std::string("inconsistent header: ") + err.what());
  }
  if (stream.subset_length < 1) {
    throw CorruptStream("inconsistent header: subset length must be positive");
  }

  in.need(static_cast<std::size_t>(stream.geometry.n_rows));
  stream.delta_table.assign(bytes.begin() + static_cast<std::ptrdiff_t>(in.pos),
                            bytes.begin() + static_cast<std::ptrdiff_t>(
                                                in.pos + static_cast<std::size_t>(
                                                             stream.geometry.n_rows)));
  in.pos += static_cast<std::size_t>(stream.geometry.n_rows);

  if (bytes.size() - in.pos != payload_bytes) {
    throw CorruptStream("payload size does not match header");
  }
  stream.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(in.pos), bytes.end());
  return stream;
}

void store_bitstream(const std::filesystem::path &path, const Bitstream &stream) {
  const std::vector<std::uint8_t> bytes = serialize(stream);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  out.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

Bitstream load_bitstream(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open: " + path.string());
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return parse_bitstream(bytes);
}

}  // namespace hyperrate
