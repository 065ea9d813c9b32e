#include "hyperrate/image.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hyperrate {

namespace {

std::int32_t decode_sample(const std::uint8_t *bytes, const CubeGeometry &g) {
  std::uint32_t raw = 0;
  if (g.bytes_per_sample() == 1) {
    raw = bytes[0];
  } else if (g.byte_order == ByteOrder::little) {
    raw = static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8);
  } else {
    raw = (static_cast<std::uint32_t>(bytes[0]) << 8) | static_cast<std::uint32_t>(bytes[1]);
  }
  if (!g.is_signed) {
    return static_cast<std::int32_t>(raw);
  }
  // sign-extend from the storage width
  const int width = g.bytes_per_sample() * 8;
  const std::uint32_t sign_bit = 1u << (width - 1);
  return static_cast<std::int32_t>((raw ^ sign_bit)) - static_cast<std::int32_t>(sign_bit);
}

void encode_sample(std::int32_t value, std::uint8_t *bytes, const CubeGeometry &g) {
  const int width = g.bytes_per_sample() * 8;
  const auto raw = static_cast<std::uint32_t>(value) & ((width == 32) ? ~0u : ((1u << width) - 1));
  if (g.bytes_per_sample() == 1) {
    bytes[0] = static_cast<std::uint8_t>(raw);
  } else if (g.byte_order == ByteOrder::little) {
    bytes[0] = static_cast<std::uint8_t>(raw & 0xFF);
    bytes[1] = static_cast<std::uint8_t>(raw >> 8);
  } else {
    bytes[0] = static_cast<std::uint8_t>(raw >> 8);
    bytes[1] = static_cast<std::uint8_t>(raw & 0xFF);
  }
}

std::string trim(const std::string &s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b])) != 0) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])) != 0) --e;
  return s.substr(b, e - b);
}

}  // namespace

std::size_t CubeGeometry::sample_count() const {
  return static_cast<std::size_t>(n_cols) * static_cast<std::size_t>(n_rows) *
         static_cast<std::size_t>(n_bands);
}

std::int32_t CubeGeometry::min_sample() const {
  return is_signed ? -(std::int32_t{1} << (bit_depth - 1)) : 0;
}

std::int32_t CubeGeometry::max_sample() const {
  return is_signed ? (std::int32_t{1} << (bit_depth - 1)) - 1
                   : (std::int32_t{1} << bit_depth) - 1;
}

std::int32_t CubeGeometry::mid_sample() const {
  return is_signed ? 0 : std::int32_t{1} << (bit_depth - 1);
}

void CubeGeometry::validate() const {
  if (n_cols < 1 || n_rows < 1 || n_bands < 1) {
    throw std::invalid_argument("cube geometry: all counts must be >= 1");
  }
  if (bit_depth < 2 || bit_depth > 16) {
    throw std::invalid_argument("cube geometry: bit depth must be in [2,16]");
  }
}

ImageCube::ImageCube(const CubeGeometry &geometry) : geometry_(geometry) {
  geometry_.validate();
  samples_.assign(geometry_.sample_count(), 0);
}

ImageCube load_raw(const std::string &path, const CubeGeometry &geometry) {
  geometry.validate();
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open raw file: " + path);
  }
  const std::size_t bps = static_cast<std::size_t>(geometry.bytes_per_sample());
  const std::size_t expected = geometry.sample_count() * bps;
  std::vector<std::uint8_t> bytes(expected);
  in.read(reinterpret_cast<char *>(bytes.data()), static_cast<std::streamsize>(expected));
  if (static_cast<std::size_t>(in.gcount()) != expected) {
    throw std::runtime_error("raw file size mismatch: expected " + std::to_string(expected) +
                             " bytes in " + path);
  }
  in.get();
  if (!in.eof()) {
    throw std::runtime_error("raw file size mismatch: trailing bytes in " + path);
  }

  ImageCube cube(geometry);
  auto samples = cube.samples();
  const std::int32_t lo = geometry.min_sample();
  const std::int32_t hi = geometry.max_sample();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const std::int32_t v = decode_sample(bytes.data() + i * bps, geometry);
    if (v < lo || v > hi) {
      throw std::runtime_error("sample " + std::to_string(i) + " value " + std::to_string(v) +
                               " exceeds declared bit depth");
    }
    samples[i] = v;
  }
  return cube;
}

void store_raw(const ImageCube &cube, const std::string &path) {
  const CubeGeometry &g = cube.geometry();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open output file: " + path);
  }
  const std::size_t bps = static_cast<std::size_t>(g.bytes_per_sample());
  std::vector<std::uint8_t> bytes(cube.samples().size() * bps);
  for (std::size_t i = 0; i < cube.samples().size(); ++i) {
    encode_sample(cube.samples()[i], bytes.data() + i * bps, g);
  }
  out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw std::runtime_error("write failed: " + path);
  }
}

CubeGeometry load_geometry_sidecar(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open geometry sidecar: " + path);
  }
  CubeGeometry g;
  std::string line;
  while (std::getline(in, line)) {
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("geometry sidecar: malformed line '" + stripped + "'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key == "cols") {
      g.n_cols = std::stoi(value);
    } else if (key == "rows") {
      g.n_rows = std::stoi(value);
    } else if (key == "bands") {
      g.n_bands = std::stoi(value);
    } else if (key == "depth") {
      g.bit_depth = std::stoi(value);
    } else if (key == "signed") {
      g.is_signed = (value == "1" || value == "true" || value == "yes");
    } else if (key == "byteorder") {
      if (value == "little") {
        g.byte_order = ByteOrder::little;
      } else if (value == "big") {
        g.byte_order = ByteOrder::big;
      } else {
        throw std::runtime_error("geometry sidecar: byteorder must be little or big");
      }
    } else {
      throw std::runtime_error("geometry sidecar: unknown key '" + key + "'");
    }
  }
  g.validate();
  return g;
}

PixelType classify_pixel(int x, int z, const CubeGeometry &geometry, int subset_length) {
  if (x == geometry.n_cols - 1) {
    return z == geometry.n_bands - 1 ? PixelType::row_end_last_band : PixelType::row_end;
  }
  if (x % subset_length == subset_length - 1) {
    return PixelType::subset_end;
  }
  return PixelType::interior;
}

BilRange::BilRange(const CubeGeometry &geometry, int subset_length)
    : geometry_(geometry), subset_length_(subset_length), total_(geometry.sample_count()) {
  geometry_.validate();
  if (subset_length < 1) {
    throw std::invalid_argument("subset length must be >= 1");
  }
}

BilPosition BilRange::iterator::operator*() const {
  const CubeGeometry &g = range_->geometry_;
  const auto cols = static_cast<std::size_t>(g.n_cols);
  const auto bands = static_cast<std::size_t>(g.n_bands);
  const auto x = static_cast<std::int32_t>(index_ % cols);
  const auto z = static_cast<std::int32_t>((index_ / cols) % bands);
  const auto y = static_cast<std::int32_t>(index_ / (cols * bands));
  return {x, y, z, classify_pixel(x, z, g, range_->subset_length_)};
}

}  // namespace hyperrate
