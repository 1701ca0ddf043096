#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stegcal {

enum class Errc {
  NotWav,
  UnsupportedFormat,
  Truncated,
  IoError,
  TooShort,
  BadLength,
  OutOfRange,
  DegenerateFilter,
  MismatchedBank,
  LengthMismatch,
  CapacityExceeded,
  InvalidSpec,
  Empty,
  BadPlane,
  EmptyCorpus,
  SingleClass,
  NotConverged,
  TooFewSamples,
  ParseError,
  DimensionMismatch,
};

std::string_view errc_name(Errc code);

// Only IoError maps to CLI exit code 3; malformed inputs are validation errors (2).
bool is_io_error(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace stegcal
