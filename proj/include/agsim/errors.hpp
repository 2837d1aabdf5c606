#pragma once

#include <stdexcept>
#include <string>

namespace agsim {

// Malformed input file (scenario config, results CSV). Message carries
// file/line/key context so the CLI can surface it verbatim.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Structurally valid input whose values violate an invariant
// (negative duration, empty search grid, zero bandwidth, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace agsim
