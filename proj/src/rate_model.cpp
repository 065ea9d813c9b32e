#include "hyperrate/rate_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace hyperrate {

namespace {

constexpr std::size_t kTableEntries =
    static_cast<std::size_t>(RateLut::median_range) * RateLut::delta_range;
constexpr std::size_t kTableBytes = kTableEntries * 2;

// Closed form, long double throughout. Written against the half-step
// exponentials a = e^{-q/2m}, b = a^2; 1-a and 1-b go through expm1 so the
// fine-quantization corner (q << m) keeps full precision.
long double rate_closed_form(long double m, long double q) {
  const long double x = q / (2.0L * m);
  const long double a = std::exp(-x);
  const long double one_minus_a = -std::expm1(-x);
  const long double one_minus_b = -std::expm1(-2.0L * x);
  const long double ln2 = 0.693147180559945309417232121458176568L;

  long double first = 0.0L;
  if (one_minus_a > 0.0L && one_minus_a < 1.0L) {
    first = -one_minus_a * std::log(one_minus_a) / ln2;
  }
  if (a <= 0.0L || one_minus_b <= 0.0L) {
    return first;  // quantizer step far beyond the source scale
  }
  const long double bracket = std::log(one_minus_b / 2.0L) + x - q / (m * one_minus_b);
  return first - (a / ln2) * bracket;
}

}  // namespace

double eval_rate(double m, double q) {
  if (!(m > 0.0) || !(q > 0.0)) {
    throw std::invalid_argument("eval_rate requires positive scale and step");
  }
  const long double r = rate_closed_form(static_cast<long double>(m), static_cast<long double>(q));
  return static_cast<double>(r < 0.0L ? 0.0L : r);
}

RateLut RateLut::build() {
  RateLut lut;
  lut.table_.assign(kTableEntries, 0);
  for (int m = 1; m < median_range; ++m) {
    for (int delta = 0; delta < delta_range; ++delta) {
      const long double rate =
          rate_closed_form(static_cast<long double>(m), static_cast<long double>(2 * delta + 1));
      const long long millibits = std::llroundl(rate * 1000.0L);
      const long long capped = std::clamp(millibits, 0LL, 65535LL);
      lut.table_[static_cast<std::size_t>(m) * delta_range + static_cast<std::size_t>(delta)] =
          static_cast<std::uint16_t>(capped);
    }
  }
  lut.verify_monotone();
  return lut;
}

void RateLut::verify_monotone() const {
  for (int m = 1; m < median_range; ++m) {
    for (int delta = 1; delta < delta_range; ++delta) {
      if (entry(m, delta) > entry(m, delta - 1)) {
        throw std::logic_error("rate table not monotone in delta");
      }
    }
  }
  for (int delta = 0; delta < delta_range; ++delta) {
    for (int m = 1; m < median_range; ++m) {
      if (entry(m, delta) < entry(m - 1, delta)) {
        throw std::logic_error("rate table not monotone in m");
      }
    }
  }
}

std::uint16_t RateLut::max_entry() const {
  return *std::max_element(table_.begin(), table_.end());
}

void RateLut::dump(const std::string &path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open lut output: " + path);
  }
  std::vector<std::uint8_t> bytes(kTableBytes);
  for (std::size_t i = 0; i < kTableEntries; ++i) {
    bytes[2 * i] = static_cast<std::uint8_t>(table_[i] & 0xFF);
    bytes[2 * i + 1] = static_cast<std::uint8_t>(table_[i] >> 8);
  }
  out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw std::runtime_error("lut write failed: " + path);
  }
}

RateLut RateLut::load(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open lut file: " + path);
  }
  std::vector<std::uint8_t> bytes(kTableBytes);
  in.read(reinterpret_cast<char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (static_cast<std::size_t>(in.gcount()) != kTableBytes) {
    throw std::runtime_error("lut file truncated: " + path);
  }
  in.get();
  if (!in.eof()) {
    throw std::runtime_error("lut file has trailing bytes: " + path);
  }
  RateLut lut;
  lut.table_.resize(kTableEntries);
  for (std::size_t i = 0; i < kTableEntries; ++i) {
    lut.table_[i] = static_cast<std::uint16_t>(bytes[2 * i] | (bytes[2 * i + 1] << 8));
  }
  lut.verify_monotone();
  return lut;
}

}  // namespace hyperrate
