#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "hyperrate/image.hpp"
#include "hyperrate/pipeline.hpp"
#include "support/synthetic.hpp"

#ifndef HYPERRATE_CLI_PATH
#error "HYPERRATE_CLI_PATH must point at the CLI binary"
#endif

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run(const std::string &args, const std::string &env_prefix = "") {
  const std::string command = env_prefix + std::string(HYPERRATE_CLI_PATH) + " " + args + " 2>&1";
  FILE *pipe = ::popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult result;
  std::array<char, 4096> buffer{};
  std::size_t n = 0;
  while ((n = std::fread(buffer.data(), 1, buffer.size(), pipe)) > 0) {
    result.output.append(buffer.data(), n);
  }
  const int status = ::pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

// Value of a "key=value" report line, or an empty string if absent.
std::string report_value(const std::string &output, const std::string &key) {
  std::size_t pos = 0;
  const std::string needle = key + "=";
  while (pos < output.size()) {
    const std::size_t eol = output.find('\n', pos);
    const std::string line = output.substr(pos, eol - pos);
    if (line.rfind(needle, 0) == 0) {
      return line.substr(needle.size());
    }
    if (eol == std::string::npos) break;
    pos = eol + 1;
  }
  return {};
}

int count_lines_starting_with(const std::string &output, const std::string &prefix) {
  int count = 0;
  std::size_t pos = 0;
  while (pos < output.size()) {
    const std::size_t eol = output.find('\n', pos);
    if (output.compare(pos, prefix.size(), prefix) == 0) ++count;
    if (eol == std::string::npos) break;
    pos = eol + 1;
  }
  return count;
}

std::vector<std::uint8_t> read_bytes(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Shared fixture: one small correlated cube on disk plus its sidecar.
class Workspace {
public:
  Workspace() {
    dir_ = std::filesystem::temp_directory_path() /
           ("hyperrate_cli_test_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(dir_);
    const hyperrate::CubeGeometry geometry{
        .n_cols = 48, .n_rows = 24, .n_bands = 4, .bit_depth = 12};
    cube_ = hyperrate::testing::correlated_cube(geometry, 2026);
    hyperrate::store_raw(cube_, file("cube.raw"));
    std::ofstream sidecar(file("cube.geom"));
    sidecar << "cols=48\nrows=24\nbands=4\ndepth=12\nsigned=0\nbyteorder=little\n";
  }
  ~Workspace() { std::filesystem::remove_all(dir_); }

  [[nodiscard]] std::string file(const std::string &name) const {
    return (dir_ / name).string();
  }
  [[nodiscard]] const hyperrate::ImageCube &cube() const { return cube_; }
  [[nodiscard]] std::string geometry_flags() const {
    return "--geometry " + file("cube.geom");
  }

private:
  std::filesystem::path dir_;
  hyperrate::ImageCube cube_;
};

Workspace &workspace() {
  static Workspace w;
  return w;
}

}  // namespace

TEST_CASE("compress without geometry information is a usage error") {
  Workspace &w = workspace();
  const RunResult r =
      run("compress " + w.file("cube.raw") + " --out " + w.file("x.hrc") + " --rate 2");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("error:") != std::string::npos);
  CHECK(r.output.find("geometry") != std::string::npos);
}

TEST_CASE("unknown subcommands and garbage inputs fail nonzero") {
  Workspace &w = workspace();
  CHECK(run("frobnicate").exit_code != 0);
  CHECK(run("compress --out x.hrc --rate 2").exit_code != 0);  // missing input

  const std::string garbage = w.file("garbage.hrc");
  {
    std::ofstream out(garbage, std::ios::binary);
    out << "this is not a bitstream";
  }
  const RunResult r = run("decompress " + garbage + " --out " + w.file("g.raw"));
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("error:") != std::string::npos);
}

TEST_CASE("lossy compress reports a payload rate near the request") {
  Workspace &w = workspace();
  const RunResult r = run("compress " + w.file("cube.raw") + " " + w.geometry_flags() +
                          " --out " + w.file("lossy.hrc") + " --rate 2.0");
  REQUIRE(r.exit_code == 0);
  CHECK(report_value(r.output, "target_bpp") == "2.000");
  const double payload_bpp = std::stod(report_value(r.output, "payload_bpp"));
  CHECK(payload_bpp > 1.0);
  CHECK(payload_bpp < 3.0);
  CHECK(std::stoull(report_value(r.output, "container_bytes")) ==
        std::filesystem::file_size(w.file("lossy.hrc")));
  CHECK_FALSE(report_value(r.output, "snr_db").empty());
  CHECK_FALSE(report_value(r.output, "mad").empty());
  CHECK_FALSE(report_value(r.output, "lut_lookups").empty());
  CHECK_FALSE(report_value(r.output, "controller_seconds").empty());
}

TEST_CASE("high-rate compress is lossless and round trips through decompress") {
  Workspace &w = workspace();
  const RunResult c = run("compress " + w.file("cube.raw") + " " + w.geometry_flags() +
                          " --out " + w.file("lossless.hrc") + " --rate 16");
  REQUIRE(c.exit_code == 0);
  CHECK(report_value(c.output, "lossless") == "1");
  CHECK(report_value(c.output, "snr_db") == "inf");
  CHECK(report_value(c.output, "mad") == "0");

  const RunResult d =
      run("decompress " + w.file("lossless.hrc") + " --out " + w.file("restored.raw"));
  REQUIRE(d.exit_code == 0);
  CHECK(report_value(d.output, "samples") == "4608");
  CHECK(read_bytes(w.file("restored.raw")) == read_bytes(w.file("cube.raw")));
}

TEST_CASE("decompressed lossy output matches the in-process decoder") {
  Workspace &w = workspace();
  REQUIRE(run("compress " + w.file("cube.raw") + " " + w.geometry_flags() + " --out " +
              w.file("ref.hrc") + " --rate 1.5")
              .exit_code == 0);
  REQUIRE(run("decompress " + w.file("ref.hrc") + " --out " + w.file("ref.raw")).exit_code ==
          0);

  hyperrate::RateLut lut = hyperrate::RateLut::build();
  hyperrate::EncoderConfig config;
  config.predictor.num_prev_bands = 3;
  config.controller.target_millibits = 1500;
  const hyperrate::EncodeResult expected = hyperrate::encode(w.cube(), config, lut);
  const hyperrate::ImageCube loaded =
      hyperrate::load_raw(w.file("ref.raw"), w.cube().geometry());
  CHECK(loaded == expected.reconstruction);
}

TEST_CASE("metrics agrees with the library distortion measure") {
  Workspace &w = workspace();
  REQUIRE(run("compress " + w.file("cube.raw") + " " + w.geometry_flags() + " --out " +
              w.file("m.hrc") + " --rate 1.0")
              .exit_code == 0);
  REQUIRE(run("decompress " + w.file("m.hrc") + " --out " + w.file("m.raw")).exit_code == 0);

  const RunResult r =
      run("metrics " + w.file("cube.raw") + " " + w.file("m.raw") + " " + w.geometry_flags());
  REQUIRE(r.exit_code == 0);

  const hyperrate::ImageCube recon = hyperrate::load_raw(w.file("m.raw"), w.cube().geometry());
  const hyperrate::Distortion expected = hyperrate::measure_distortion(w.cube(), recon);
  CHECK(std::stod(report_value(r.output, "snr_db")) ==
        doctest::Approx(expected.snr_db).epsilon(1e-3));
  CHECK(std::stoi(report_value(r.output, "mad")) == expected.mad);
  CHECK(report_value(r.output, "lossless") == "0");

  const RunResult same =
      run("metrics " + w.file("cube.raw") + " " + w.file("cube.raw") + " " +
          w.geometry_flags());
  REQUIRE(same.exit_code == 0);
  CHECK(report_value(same.output, "snr_db") == "inf");
  CHECK(report_value(same.output, "mad") == "0");
  CHECK(report_value(same.output, "lossless") == "1");
}

TEST_CASE("trace mode prints one record per line") {
  Workspace &w = workspace();
  const RunResult r = run("compress " + w.file("cube.raw") + " " + w.geometry_flags() +
                          " --out " + w.file("t.hrc") + " --rate 2 --trace");
  REQUIRE(r.exit_code == 0);
  CHECK(count_lines_starting_with(r.output, "trace line=") == 24);
}

TEST_CASE("lut-dump writes the 512 KiB blob and compress can reuse it") {
  Workspace &w = workspace();
  const std::string blob = w.file("rate.lut");
  const RunResult dump = run("lut-dump --out " + blob);
  REQUIRE(dump.exit_code == 0);
  CHECK(report_value(dump.output, "bytes") == "524288");
  CHECK(report_value(dump.output, "max_entry") == "12441");
  CHECK(std::filesystem::file_size(blob) == 524288);

  REQUIRE(run("compress " + w.file("cube.raw") + " " + w.geometry_flags() + " --out " +
              w.file("plain.hrc") + " --rate 2.0")
              .exit_code == 0);
  const RunResult with_env =
      run("compress " + w.file("cube.raw") + " " + w.geometry_flags() + " --out " +
              w.file("env.hrc") + " --rate 2.0",
          "HYPERRATE_LUT_PATH=" + blob + " ");
  REQUIRE(with_env.exit_code == 0);
  CHECK(read_bytes(w.file("env.hrc")) == read_bytes(w.file("plain.hrc")));

  const RunResult bad_env =
      run("compress " + w.file("cube.raw") + " " + w.geometry_flags() + " --out " +
              w.file("bad.hrc") + " --rate 2.0",
          "HYPERRATE_LUT_PATH=" + w.file("nonexistent.lut") + " ");
  CHECK(bad_env.exit_code == 1);
  CHECK(bad_env.output.find("error:") != std::string::npos);
}

TEST_CASE("bench emits a single CSV header and data row") {
  Workspace &w = workspace();
  const RunResult r =
      run("bench " + w.file("cube.raw") + " " + w.geometry_flags() + " --rate 2 --csv");
  REQUIRE(r.exit_code == 0);
  CHECK(count_lines_starting_with(r.output, "samples,lut_lookups,lookups_per_msample,") == 1);
  // Data row: same field count as the header.
  const std::size_t header_end = r.output.find('\n');
  const std::size_t data_end = r.output.find('\n', header_end + 1);
  const std::string data = r.output.substr(header_end + 1, data_end - header_end - 1);
  CHECK(std::count(data.begin(), data.end(), ',') == 6);
  CHECK(data.rfind("4608,", 0) == 0);
}
