#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace orgb {

enum class ErrorCode {
    kIo,
    kFormat,
    kEmptyRegion,
    kFlatRegion,
    kDimensionMismatch,
    kGridMismatch,
    kInvalidEpsilon,
    kInvalidArgument,
    kSceneValidation,
    kDegenerateBundle,
    kDegenerateK,
};

/// Stable kebab-case identifier, e.g. "flat-region". Used in CLI diagnostics
/// and as the "error" field of service responses.
std::string_view error_code_name(ErrorCode code);

/// Data error raised by every library operation. what() is "<code>: <detail>".
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail);

    ErrorCode code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

}  // namespace orgb
