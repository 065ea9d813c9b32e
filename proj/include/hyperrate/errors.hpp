#pragma once

#include <stdexcept>

namespace hyperrate {

// Thrown when a bitstream is malformed or ends before all symbols decode.
struct CorruptStream : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hyperrate
