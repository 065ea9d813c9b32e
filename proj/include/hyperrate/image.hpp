#pragma once

#include <cstddef>
#include <cstdint>
#include <iterator>
#include <span>
#include <string>
#include <vector>

namespace hyperrate {

enum class ByteOrder : std::uint8_t { little = 0, big = 1 };

/// Geometry of a raw band-interleaved-by-line sample file. Raw files are
/// headerless, so this travels out-of-band (CLI flags or key=value sidecar).
struct CubeGeometry {
  std::int32_t n_cols = 0;
  std::int32_t n_rows = 0;
  std::int32_t n_bands = 0;
  std::int32_t bit_depth = 16;
  bool is_signed = false;
  ByteOrder byte_order = ByteOrder::little;

  [[nodiscard]] std::size_t sample_count() const;
  [[nodiscard]] int bytes_per_sample() const { return bit_depth > 8 ? 2 : 1; }
  [[nodiscard]] std::int32_t min_sample() const;
  [[nodiscard]] std::int32_t max_sample() const;
  [[nodiscard]] std::int32_t mid_sample() const;

  void validate() const;  // throws std::invalid_argument

  bool operator==(const CubeGeometry &) const = default;
};

/// 3-D integer sample array stored linearly in BIL order:
/// index = (y * n_bands + z) * n_cols + x.
class ImageCube {
public:
  ImageCube() = default;
  explicit ImageCube(const CubeGeometry &geometry);

  [[nodiscard]] const CubeGeometry &geometry() const { return geometry_; }

  [[nodiscard]] std::int32_t at(int x, int y, int z) const {
    return samples_[linear_index(x, y, z)];
  }
  std::int32_t &at(int x, int y, int z) { return samples_[linear_index(x, y, z)]; }

  [[nodiscard]] std::span<const std::int32_t> samples() const { return samples_; }
  [[nodiscard]] std::span<std::int32_t> samples() { return samples_; }

  [[nodiscard]] std::size_t linear_index(int x, int y, int z) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(geometry_.n_bands) +
            static_cast<std::size_t>(z)) *
               static_cast<std::size_t>(geometry_.n_cols) +
           static_cast<std::size_t>(x);
  }

  bool operator==(const ImageCube &) const = default;

private:
  CubeGeometry geometry_{};
  std::vector<std::int32_t> samples_{};
};

ImageCube load_raw(const std::string &path, const CubeGeometry &geometry);
void store_raw(const ImageCube &cube, const std::string &path);

/// Parses a key=value sidecar: cols, rows, bands, depth, signed, byteorder.
CubeGeometry load_geometry_sidecar(const std::string &path);

/// Roles a sample position plays in the per-line statistics schedule.
///   interior        - only coded and buffered
///   subset_end      - closes a full subset of subset_length magnitudes
///   row_end         - last column: closes the partial subset and the band median
///   row_end_last_band - row_end in the last band: also runs the rate controller
enum class PixelType : std::uint8_t { interior, subset_end, row_end, row_end_last_band };

PixelType classify_pixel(int x, int z, const CubeGeometry &geometry, int subset_length);

struct BilPosition {
  std::int32_t x = 0;
  std::int32_t y = 0;
  std::int32_t z = 0;
  PixelType type = PixelType::interior;

  bool operator==(const BilPosition &) const = default;
};

/// Iterable enumeration of every sample position in BIL order
/// (y outer, z middle, x inner), each tagged with its PixelType.
class BilRange {
public:
  BilRange(const CubeGeometry &geometry, int subset_length);

  class iterator {
  public:
    using iterator_category = std::input_iterator_tag;
    using value_type = BilPosition;
    using difference_type = std::ptrdiff_t;

    iterator() = default;
    iterator(const BilRange *range, std::size_t index) : range_(range), index_(index) {}

    BilPosition operator*() const;
    iterator &operator++() {
      ++index_;
      return *this;
    }
    iterator operator++(int) {
      iterator copy = *this;
      ++index_;
      return copy;
    }
    bool operator==(const iterator &other) const { return index_ == other.index_; }

  private:
    const BilRange *range_ = nullptr;
    std::size_t index_ = 0;
  };

  [[nodiscard]] iterator begin() const { return {this, 0}; }
  [[nodiscard]] iterator end() const { return {this, total_}; }
  [[nodiscard]] std::size_t size() const { return total_; }

private:
  friend class iterator;
  CubeGeometry geometry_{};
  int subset_length_ = 0;
  std::size_t total_ = 0;
};

inline BilRange bil_positions(const CubeGeometry &geometry, int subset_length) {
  return {geometry, subset_length};
}

}  // namespace hyperrate
