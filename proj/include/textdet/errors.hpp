#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace textdet {

enum class ErrorCode {
  kMissingFile,
  kMalformedRaster,
  kUnsupportedDepth,
  kInvalidArgument,
  kDimensionMismatch,
  kUnpaddedInput,
  kEmptyInput,
  kBadModel,
  kSpecTooDense,
  kIo,
  kNumeric,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so
// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace textdet
