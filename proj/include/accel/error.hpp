#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace accel {

enum class Errc {
  MissingInput,
  DimensionMismatch,
  DecodeError,
  BadDimensions,
  NonGrayInput,
  BadBound,
  OutOfRange,
  BadConfig,
  ShapeMismatch,
  EmptyDataset,
  LabelOutOfRange,
  BadMagic,
  VersionMismatch,
  TruncatedFile,
  LengthMismatch,
  TooShort,
  EmptySplit,
  BadSpec,
  TooFewFlows,
  IoError,
};

std::string_view errc_name(Errc code);

// Every failure in the library is reported through this type; code() is the
// stable, testable part and what() carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace accel
