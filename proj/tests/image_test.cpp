#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "hyperrate/image.hpp"

using hyperrate::BilPosition;
using hyperrate::ByteOrder;
using hyperrate::CubeGeometry;
using hyperrate::ImageCube;
using hyperrate::PixelType;

namespace {

class TempDir {
public:
  TempDir() {
    path_ = std::filesystem::temp_directory_path() /
            ("hyperrate_image_test_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  [[nodiscard]] std::string file(const std::string &name) const { return (path_ / name).string(); }

private:
  std::filesystem::path path_;
};

void write_bytes(const std::string &path, const std::vector<std::uint8_t> &bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  REQUIRE(out.good());
}

std::vector<std::uint8_t> read_bytes(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("geometry validation and derived ranges") {
  CubeGeometry g{.n_cols = 4, .n_rows = 2, .n_bands = 3, .bit_depth = 12};
  g.validate();
  CHECK(g.sample_count() == 24);
  CHECK(g.bytes_per_sample() == 2);
  CHECK(g.min_sample() == 0);
  CHECK(g.max_sample() == 4095);
  CHECK(g.mid_sample() == 2048);

  CubeGeometry s = g;
  s.is_signed = true;
  CHECK(s.min_sample() == -2048);
  CHECK(s.max_sample() == 2047);
  CHECK(s.mid_sample() == 0);

  CubeGeometry byte8 = g;
  byte8.bit_depth = 8;
  CHECK(byte8.bytes_per_sample() == 1);

  auto expect_invalid = [](CubeGeometry bad) {
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  };
  expect_invalid({.n_cols = 0, .n_rows = 1, .n_bands = 1});
  expect_invalid({.n_cols = 1, .n_rows = 1, .n_bands = 1, .bit_depth = 1});
  expect_invalid({.n_cols = 1, .n_rows = 1, .n_bands = 1, .bit_depth = 17});
}

TEST_CASE("little-endian 16-bit words decode in file order") {
  TempDir dir;
  const std::string path = dir.file("two.raw");
  write_bytes(path, {0x01, 0x00, 0xFF, 0x00});
  const CubeGeometry g{.n_cols = 2, .n_rows = 1, .n_bands = 1};
  const ImageCube cube = hyperrate::load_raw(path, g);
  CHECK(cube.at(0, 0, 0) == 1);
  CHECK(cube.at(1, 0, 0) == 255);
}

TEST_CASE("big-endian decoding swaps the bytes") {
  TempDir dir;
  const std::string path = dir.file("two_be.raw");
  write_bytes(path, {0x01, 0x00, 0x00, 0xFF});
  const CubeGeometry g{.n_cols = 2, .n_rows = 1, .n_bands = 1, .byte_order = ByteOrder::big};
  const ImageCube cube = hyperrate::load_raw(path, g);
  CHECK(cube.at(0, 0, 0) == 256);
  CHECK(cube.at(1, 0, 0) == 255);
}

TEST_CASE("BIL linear layout: (x,y,z) maps to (y*bands + z)*cols + x") {
  TempDir dir;
  const std::string path = dir.file("bil.raw");
  std::vector<std::uint8_t> bytes;
  for (std::uint8_t w = 0; w < 8; ++w) {
    bytes.push_back(w);
    bytes.push_back(0);
  }
  write_bytes(path, bytes);
  const CubeGeometry g{.n_cols = 2, .n_rows = 2, .n_bands = 2};
  const ImageCube cube = hyperrate::load_raw(path, g);
  // (x=0, y=1, z=1) is word index (1*2 + 1)*2 + 0 = 6, the seventh word.
  CHECK(cube.linear_index(0, 1, 1) == 6);
  CHECK(cube.at(0, 1, 1) == 6);
  for (int y = 0; y < 2; ++y) {
    for (int z = 0; z < 2; ++z) {
      for (int x = 0; x < 2; ++x) {
        CHECK(cube.at(x, y, z) == (y * 2 + z) * 2 + x);
      }
    }
  }
}

TEST_CASE("short or oversized files are rejected with the byte counts") {
  TempDir dir;
  const CubeGeometry g{.n_cols = 2, .n_rows = 1, .n_bands = 1};

  const std::string short_path = dir.file("short.raw");
  write_bytes(short_path, {0x01, 0x00, 0xFF});
  CHECK_THROWS_WITH_AS(hyperrate::load_raw(short_path, g),
                       doctest::Contains("size mismatch"), std::runtime_error);

  const std::string long_path = dir.file("long.raw");
  write_bytes(long_path, {0x01, 0x00, 0xFF, 0x00, 0x55});
  CHECK_THROWS_WITH_AS(hyperrate::load_raw(long_path, g),
                       doctest::Contains("trailing"), std::runtime_error);

  CHECK_THROWS_AS(hyperrate::load_raw(dir.file("missing.raw"), g), std::runtime_error);
}

TEST_CASE("samples beyond the declared bit depth are rejected") {
  TempDir dir;
  const std::string path = dir.file("deep.raw");
  write_bytes(path, {0x00, 0x10});  // 4096 does not fit in 12 bits
  const CubeGeometry g{.n_cols = 1, .n_rows = 1, .n_bands = 1, .bit_depth = 12};
  CHECK_THROWS_WITH_AS(hyperrate::load_raw(path, g), doctest::Contains("bit depth"),
                       std::runtime_error);
}

TEST_CASE("store_raw writes little-endian words") {
  TempDir dir;
  const std::string path = dir.file("one.raw");
  ImageCube cube(CubeGeometry{.n_cols = 1, .n_rows = 1, .n_bands = 1});
  cube.at(0, 0, 0) = 42;
  hyperrate::store_raw(cube, path);
  CHECK(read_bytes(path) == std::vector<std::uint8_t>{0x2A, 0x00});
}

TEST_CASE("store/load round trip across formats") {
  std::mt19937 rng(7);
  for (const auto &g : {CubeGeometry{.n_cols = 5, .n_rows = 3, .n_bands = 4, .bit_depth = 16},
                        CubeGeometry{.n_cols = 3, .n_rows = 2, .n_bands = 2, .bit_depth = 12,
                                     .is_signed = true},
                        CubeGeometry{.n_cols = 4, .n_rows = 4, .n_bands = 1, .bit_depth = 8},
                        CubeGeometry{.n_cols = 2, .n_rows = 2, .n_bands = 3, .bit_depth = 14,
                                     .byte_order = ByteOrder::big}}) {
    ImageCube cube(g);
    std::uniform_int_distribution<std::int32_t> dist(g.min_sample(), g.max_sample());
    for (auto &s : cube.samples()) s = dist(rng);

    TempDir dir;
    const std::string path = dir.file("cube.raw");
    hyperrate::store_raw(cube, path);
    CHECK(hyperrate::load_raw(path, g) == cube);
  }
}

TEST_CASE("geometry sidecar parsing") {
  TempDir dir;
  const std::string path = dir.file("cube.geom");
  {
    std::ofstream out(path);
    out << "# cube description\n"
        << "cols = 640\n"
        << "rows=512\n"
        << "bands = 224\n"
        << "depth = 12\n"
        << "signed = 0\n"
        << "byteorder = little\n";
  }
  const CubeGeometry g = hyperrate::load_geometry_sidecar(path);
  CHECK(g.n_cols == 640);
  CHECK(g.n_rows == 512);
  CHECK(g.n_bands == 224);
  CHECK(g.bit_depth == 12);
  CHECK_FALSE(g.is_signed);
  CHECK(g.byte_order == ByteOrder::little);

  const std::string bad_key = dir.file("bad_key.geom");
  {
    std::ofstream out(bad_key);
    out << "cols=1\nrows=1\nbands=1\nwidth=9\n";
  }
  CHECK_THROWS_WITH_AS(hyperrate::load_geometry_sidecar(bad_key),
                       doctest::Contains("unknown key"), std::runtime_error);

  const std::string incomplete = dir.file("incomplete.geom");
  {
    std::ofstream out(incomplete);
    out << "cols=16\nrows=16\n";  // bands missing -> invalid geometry
  }
  CHECK_THROWS_AS(hyperrate::load_geometry_sidecar(incomplete), std::invalid_argument);

  const std::string malformed = dir.file("malformed.geom");
  {
    std::ofstream out(malformed);
    out << "cols 16\n";
  }
  CHECK_THROWS_WITH_AS(hyperrate::load_geometry_sidecar(malformed),
                       doctest::Contains("malformed"), std::runtime_error);
}

TEST_CASE("pixel classification: subset ends, row ends, last band") {
  const CubeGeometry g{.n_cols = 4, .n_rows = 1, .n_bands = 2};
  const int L = 2;
  CHECK(hyperrate::classify_pixel(0, 0, g, L) == PixelType::interior);
  CHECK(hyperrate::classify_pixel(1, 0, g, L) == PixelType::subset_end);
  CHECK(hyperrate::classify_pixel(2, 0, g, L) == PixelType::interior);
  CHECK(hyperrate::classify_pixel(3, 0, g, L) == PixelType::row_end);
  CHECK(hyperrate::classify_pixel(3, 1, g, L) == PixelType::row_end_last_band);

  // Row end wins over subset end when both apply.
  CHECK(hyperrate::classify_pixel(3, 0, g, 4) == PixelType::row_end);

  const CubeGeometry single{.n_cols = 1, .n_rows = 1, .n_bands = 1};
  CHECK(hyperrate::classify_pixel(0, 0, single, 16) == PixelType::row_end_last_band);
}

TEST_CASE("BIL range walks y outer, z middle, x inner and covers every sample once") {
  const CubeGeometry g{.n_cols = 2, .n_rows = 1, .n_bands = 2};
  std::vector<BilPosition> order;
  for (const BilPosition p : hyperrate::bil_positions(g, 16)) order.push_back(p);
  REQUIRE(order.size() == 4);
  CHECK(order[0] == BilPosition{0, 0, 0, PixelType::interior});
  CHECK(order[1] == BilPosition{1, 0, 0, PixelType::row_end});
  CHECK(order[2] == BilPosition{0, 0, 1, PixelType::interior});
  CHECK(order[3] == BilPosition{1, 0, 1, PixelType::row_end_last_band});

  const CubeGeometry big{.n_cols = 7, .n_rows = 3, .n_bands = 5};
  const ImageCube index_map{big};
  std::set<std::size_t> seen;
  std::size_t previous = 0;
  bool first = true;
  int last_band_rows = 0;
  for (const BilPosition p : hyperrate::bil_positions(big, 3)) {
    const std::size_t linear = index_map.linear_index(p.x, p.y, p.z);
    CHECK(seen.insert(linear).second);
    if (!first) CHECK(linear == previous + 1);
    first = false;
    previous = linear;
    CHECK(p.type == hyperrate::classify_pixel(p.x, p.z, big, 3));
    if (p.type == PixelType::row_end_last_band) ++last_band_rows;
  }
  CHECK(seen.size() == big.sample_count());
  CHECK(last_band_rows == big.n_rows);

  CHECK_THROWS_AS(hyperrate::bil_positions(big, 0), std::invalid_argument);
}
