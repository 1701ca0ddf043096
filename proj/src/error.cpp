#include "stegcal/error.hpp"

namespace stegcal {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::NotWav: return "NotWav";
    case Errc::UnsupportedFormat: return "UnsupportedFormat";
    case Errc::Truncated: return "Truncated";
    case Errc::IoError: return "IoError";
    case Errc::TooShort: return "TooShort";
    case Errc::BadLength: return "BadLength";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::DegenerateFilter: return "DegenerateFilter";
    case Errc::MismatchedBank: return "MismatchedBank";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::CapacityExceeded: return "CapacityExceeded";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::Empty: return "Empty";
    case Errc::BadPlane: return "BadPlane";
    case Errc::EmptyCorpus: return "EmptyCorpus";
    case Errc::SingleClass: return "SingleClass";
    case Errc::NotConverged: return "NotConverged";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::ParseError: return "ParseError";
    case Errc::DimensionMismatch: return "DimensionMismatch";
  }
  return "Unknown";
}

bool is_io_error(Errc code) {
  return code == Errc::IoError;
}

}  // namespace stegcal
