#include "accel/error.hpp"

namespace accel {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::MissingInput: return "MissingInput";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::DecodeError: return "DecodeError";
    case Errc::BadDimensions: return "BadDimensions";
    case Errc::NonGrayInput: return "NonGrayInput";
    case Errc::BadBound: return "BadBound";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::BadConfig: return "BadConfig";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::LabelOutOfRange: return "LabelOutOfRange";
    case Errc::BadMagic: return "BadMagic";
    case Errc::VersionMismatch: return "VersionMismatch";
    case Errc::TruncatedFile: return "TruncatedFile";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::TooShort: return "TooShort";
    case Errc::EmptySplit: return "EmptySplit";
    case Errc::BadSpec: return "BadSpec";
    case Errc::TooFewFlows: return "TooFewFlows";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}

}  // namespace accel
