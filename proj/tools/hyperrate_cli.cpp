// Command-line front end: compress, decompress, metrics, bench, lut-dump.
// All reports are machine-parseable key=value lines (CSV for bench --csv).

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hyperrate/bitstream.hpp"
#include "hyperrate/image.hpp"
#include "hyperrate/pipeline.hpp"
#include "hyperrate/rate_model.hpp"

namespace {

using Clock = std::chrono::steady_clock;

struct GeometryArgs {
  std::string sidecar;
  std::int32_t cols = 0;
  std::int32_t rows = 0;
  std::int32_t bands = 0;
  std::int32_t depth = 16;
  bool is_signed = false;
  std::string byteorder = "little";
};

struct CodingArgs {
  double rate = 2.0;
  std::int32_t q_max = 511;
  std::int32_t subset_length = 17;
  std::int32_t tau = 5;
  std::int32_t q_init = 1;
  std::int32_t prev_bands = -1;  // -1: min(3, bands-1)
};

void add_geometry_flags(CLI::App *cmd, GeometryArgs &args) {
  cmd->add_option("--geometry", args.sidecar, "key=value sidecar file with the raw layout");
  cmd->add_option("--cols", args.cols, "samples per row");
  cmd->add_option("--rows", args.rows, "rows");
  cmd->add_option("--bands", args.bands, "spectral bands");
  cmd->add_option("--depth", args.depth, "bits per sample (2-16)")->capture_default_str();
  cmd->add_flag("--signed", args.is_signed, "samples are two's complement");
  cmd->add_option("--byteorder", args.byteorder, "raw sample byte order")
      ->check(CLI::IsMember({"little", "big"}))
      ->capture_default_str();
}

void add_coding_flags(CLI::App *cmd, CodingArgs &args, bool with_rate_default) {
  auto *rate = cmd->add_option("--rate", args.rate, "target rate, bits/sample");
  if (with_rate_default) {
    rate->capture_default_str();
  } else {
    rate->required();
  }
  cmd->add_option("--qmax", args.q_max, "largest allowed quantizer step (odd)")
      ->capture_default_str();
  cmd->add_option("--L", args.subset_length, "residuals per median subset")
      ->capture_default_str();
  cmd->add_option("--tau", args.tau, "feedback damping, in lines")->capture_default_str();
  cmd->add_option("--qinit", args.q_init, "step for the first line")->capture_default_str();
  cmd->add_option("--p", args.prev_bands, "previous bands used by the predictor");
}

hyperrate::CubeGeometry resolve_geometry(const GeometryArgs &args) {
  if (!args.sidecar.empty()) {
    return hyperrate::load_geometry_sidecar(args.sidecar);
  }
  if (args.cols <= 0 || args.rows <= 0 || args.bands <= 0) {
    throw CLI::ValidationError(
        "geometry", "raw input needs --geometry or all of --cols/--rows/--bands");
  }
  hyperrate::CubeGeometry geometry;
  geometry.n_cols = args.cols;
  geometry.n_rows = args.rows;
  geometry.n_bands = args.bands;
  geometry.bit_depth = args.depth;
  geometry.is_signed = args.is_signed;
  geometry.byte_order =
      args.byteorder == "big" ? hyperrate::ByteOrder::big : hyperrate::ByteOrder::little;
  geometry.validate();
  return geometry;
}

hyperrate::EncoderConfig resolve_config(const CodingArgs &args,
                                        const hyperrate::CubeGeometry &geometry) {
  hyperrate::EncoderConfig config;
  config.controller.target_millibits =
      std::max<std::int64_t>(1, std::llround(args.rate * 1000.0));
  config.controller.q_max = args.q_max;
  config.controller.tau = args.tau;
  config.controller.q_init = args.q_init;
  config.subset_length = args.subset_length;
  config.predictor.num_prev_bands =
      args.prev_bands >= 0 ? args.prev_bands : std::min<std::int32_t>(3, geometry.n_bands - 1);
  config.validate(geometry);
  return config;
}

hyperrate::RateLut make_lut() {
  if (const char *path = std::getenv("HYPERRATE_LUT_PATH")) {
    return hyperrate::RateLut::load(path);
  }
  return hyperrate::RateLut::build();
}

std::string format_rate(double bits_per_sample) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", bits_per_sample);
  return buf;
}

std::string format_snr(const hyperrate::Distortion &distortion) {
  if (distortion.lossless) {
    return "inf";
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", distortion.snr_db);
  return buf;
}

int run_compress(const std::string &input, const std::string &output,
                 const GeometryArgs &geometry_args, const CodingArgs &coding_args,
                 bool trace) {
  const hyperrate::CubeGeometry geometry = resolve_geometry(geometry_args);
  const hyperrate::ImageCube cube = hyperrate::load_raw(input, geometry);
  const hyperrate::EncoderConfig config = resolve_config(coding_args, geometry);

  hyperrate::RateLut lut = make_lut();
  const auto begin = Clock::now();
  const hyperrate::EncodeResult result = hyperrate::encode(cube, config, lut, trace);
  const double encode_seconds = std::chrono::duration<double>(Clock::now() - begin).count();

  hyperrate::store_bitstream(output, result.stream);
  const std::size_t container_bytes = hyperrate::serialize(result.stream).size();
  const auto samples = static_cast<double>(geometry.sample_count());
  const hyperrate::Distortion distortion =
      hyperrate::measure_distortion(cube, result.reconstruction);

  if (trace) {
    const double line_samples = static_cast<double>(geometry.n_cols) *
                                static_cast<double>(geometry.n_bands);
    for (const hyperrate::LineTrace &entry : result.trace) {
      std::cout << "trace line=" << entry.line << " q=" << entry.q
                << " bpp=" << format_rate(static_cast<double>(entry.actual_bits) / line_samples)
                << " target_bpp="
                << format_rate(static_cast<double>(entry.working_target_millibits) / 1000.0)
                << " next_q=" << entry.next_q << " predicted_bpp="
                << format_rate(static_cast<double>(entry.predicted_band_sum_millibits) /
                               (1000.0 * static_cast<double>(geometry.n_bands)))
                << " lookups=" << entry.lut_lookups << "\n";
    }
  }

  std::cout << "input=" << input << "\n"
            << "output=" << output << "\n"
            << "samples=" << geometry.sample_count() << "\n"
            << "target_bpp=" << format_rate(coding_args.rate) << "\n"
            << "payload_bpp=" << format_rate(static_cast<double>(result.payload_bits) / samples)
            << "\n"
            << "container_bpp=" << format_rate(8.0 * static_cast<double>(container_bytes) / samples)
            << "\n"
            << "payload_bytes=" << result.payload_bits / 8 << "\n"
            << "container_bytes=" << container_bytes << "\n"
            << "snr_db=" << format_snr(distortion) << "\n"
            << "mad=" << distortion.mad << "\n"
            << "lossless=" << (distortion.lossless ? 1 : 0) << "\n"
            << "lut_lookups=" << result.lut_lookups << "\n"
            << "controller_seconds=" << result.controller_seconds << "\n"
            << "encode_seconds=" << encode_seconds << "\n";
  return 0;
}

int run_decompress(const std::string &input, const std::string &output) {
  const hyperrate::Bitstream stream = hyperrate::load_bitstream(input);
  const hyperrate::ImageCube cube = hyperrate::decode(stream);
  hyperrate::store_raw(cube, output);
  std::cout << "input=" << input << "\n"
            << "output=" << output << "\n"
            << "cols=" << cube.geometry().n_cols << "\n"
            << "rows=" << cube.geometry().n_rows << "\n"
            << "bands=" << cube.geometry().n_bands << "\n"
            << "depth=" << cube.geometry().bit_depth << "\n"
            << "samples=" << cube.geometry().sample_count() << "\n";
  return 0;
}

int run_metrics(const std::string &original_path, const std::string &reconstructed_path,
                const GeometryArgs &geometry_args) {
  const hyperrate::CubeGeometry geometry = resolve_geometry(geometry_args);
  const hyperrate::ImageCube original = hyperrate::load_raw(original_path, geometry);
  const hyperrate::ImageCube reconstructed = hyperrate::load_raw(reconstructed_path, geometry);
  const hyperrate::Distortion distortion =
      hyperrate::measure_distortion(original, reconstructed);
  std::cout << "snr_db=" << format_snr(distortion) << "\n"
            << "mad=" << distortion.mad << "\n"
            << "lossless=" << (distortion.lossless ? 1 : 0) << "\n";
  return 0;
}

int run_bench(const std::string &input, const GeometryArgs &geometry_args,
              const CodingArgs &coding_args, bool csv) {
  const hyperrate::CubeGeometry geometry = resolve_geometry(geometry_args);
  const hyperrate::ImageCube cube = hyperrate::load_raw(input, geometry);
  const hyperrate::EncoderConfig config = resolve_config(coding_args, geometry);

  hyperrate::RateLut lut = make_lut();
  const auto begin = Clock::now();
  const hyperrate::EncodeResult result = hyperrate::encode(cube, config, lut, false);
  const double total_seconds = std::chrono::duration<double>(Clock::now() - begin).count();

  const auto samples = static_cast<double>(geometry.sample_count());
  const double msamples = samples / 1e6;
  const double lookups_per_msample = static_cast<double>(result.lut_lookups) / msamples;
  const double throughput = msamples / total_seconds;
  const double payload_bpp = static_cast<double>(result.payload_bits) / samples;

  if (csv) {
    std::cout << "samples,lut_lookups,lookups_per_msample,controller_seconds,total_seconds,"
                 "throughput_msamples_per_s,payload_bpp\n"
              << geometry.sample_count() << "," << result.lut_lookups << ","
              << lookups_per_msample << "," << result.controller_seconds << ","
              << total_seconds << "," << throughput << "," << format_rate(payload_bpp)
              << "\n";
  } else {
    std::cout << "samples=" << geometry.sample_count() << "\n"
              << "lut_lookups=" << result.lut_lookups << "\n"
              << "lookups_per_msample=" << lookups_per_msample << "\n"
              << "controller_seconds=" << result.controller_seconds << "\n"
              << "total_seconds=" << total_seconds << "\n"
              << "throughput_msamples_per_s=" << throughput << "\n"
              << "payload_bpp=" << format_rate(payload_bpp) << "\n";
  }
  return 0;
}

int run_lut_dump(const std::string &output) {
  const hyperrate::RateLut lut = make_lut();
  lut.dump(output);
  std::cout << "output=" << output << "\n"
            << "bytes=" << 2 * hyperrate::RateLut::median_range * hyperrate::RateLut::delta_range
            << "\n"
            << "max_entry=" << lut.max_entry() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"hyperrate: near-lossless hyperspectral codec with per-line rate control"};
  app.require_subcommand(1);

  std::string input;
  std::string output;
  std::string reconstructed;
  GeometryArgs geometry_args;
  CodingArgs coding_args;
  bool trace = false;
  bool csv = false;

  CLI::App *compress = app.add_subcommand("compress", "encode a raw BIL cube");
  compress->add_option("input", input, "raw sample file")->required();
  compress->add_option("--out", output, "bitstream path")->required();
  add_geometry_flags(compress, geometry_args);
  add_coding_flags(compress, coding_args, false);
  compress->add_flag("--trace", trace, "print one record per coded line");

  CLI::App *decompress = app.add_subcommand("decompress", "decode a bitstream to raw");
  decompress->add_option("input", input, "bitstream path")->required();
  decompress->add_option("--out", output, "raw output path")->required();

  CLI::App *metrics = app.add_subcommand("metrics", "compare two raw cubes");
  metrics->add_option("original", input, "reference raw file")->required();
  metrics->add_option("reconstructed", reconstructed, "reconstruction raw file")->required();
  add_geometry_flags(metrics, geometry_args);

  CLI::App *bench = app.add_subcommand("bench", "encode and report controller cost");
  bench->add_option("input", input, "raw sample file")->required();
  add_geometry_flags(bench, geometry_args);
  add_coding_flags(bench, coding_args, true);
  bench->add_flag("--csv", csv, "one CSV header + data row instead of key=value");

  CLI::App *lut_dump = app.add_subcommand("lut-dump", "write the rate table blob");
  lut_dump->add_option("--out", output, "blob path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (compress->parsed()) {
      return run_compress(input, output, geometry_args, coding_args, trace);
    }
    if (decompress->parsed()) {
      return run_decompress(input, output);
    }
    if (metrics->parsed()) {
      return run_metrics(input, reconstructed, geometry_args);
    }
    if (bench->parsed()) {
      return run_bench(input, geometry_args, coding_args, csv);
    }
    if (lut_dump->parsed()) {
      return run_lut_dump(output);
    }
  } catch (const CLI::ValidationError &err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception &err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
