#include "orgb/error.hpp"

namespace orgb {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::kIo: return "io";
        case ErrorCode::kFormat: return "format";
        case ErrorCode::kEmptyRegion: return "empty-region";
        case ErrorCode::kFlatRegion: return "flat-region";
        case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
        case ErrorCode::kGridMismatch: return "grid-mismatch";
        case ErrorCode::kInvalidEpsilon: return "invalid-epsilon";
        case ErrorCode::kInvalidArgument: return "invalid-argument";
        case ErrorCode::kSceneValidation: return "scene-validation";
        case ErrorCode::kDegenerateBundle: return "degenerate-bundle";
        case ErrorCode::kDegenerateK: return "degenerate-k";
    }
    return "unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + detail),
      code_(code),
      detail_(detail) {}

}  // namespace orgb
