#include "textdet/errors.hpp"

namespace textdet {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingFile: return "missing file";
    case ErrorCode::kMalformedRaster: return "malformed raster";
    case ErrorCode::kUnsupportedDepth: return "unsupported bit depth";
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kUnpaddedInput: return "unpadded input";
    case ErrorCode::kEmptyInput: return "empty input";
    case ErrorCode::kBadModel: return "bad model";
    case ErrorCode::kSpecTooDense: return "spec too dense";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kNumeric: return "numeric failure";
  }
  return "unknown error";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

}  // namespace textdet
