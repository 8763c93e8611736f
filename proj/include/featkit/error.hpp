#pragma once

#include <stdexcept>
#include <string>

namespace featkit {

enum class ErrorCode {
    // imaging
    UnknownMagic,
    TruncatedPayload,
    DimensionOverflow,
    UnsupportedMaxval,
    MalformedHeader,
    ImageTooSmall,
    RectOutOfBounds,
    // geometry
    WrongTokenCount,
    NonNumericToken,
    SingularMatrix,
    PointAtInfinity,
    // detect / describe
    OutOfBounds,
    EmptyCandidateSet,
    // dataset
    MissingImage,
    MissingHomography,
    UnclassifiablePrefix,
    DecodeFailure,
    NonIdentityHomography,
    HeaderMismatch,
    RowArityError,
    DimensionMismatch,
    // evaluation
    EmptyKeypointSet,
    UnknownDetector,
    UnknownDescriptor,
    IncompatibleDistance,
    // timing
    ClockTooCoarse,
    // generic I/O
    IoFailure,
};

/// Single exception type for the whole library; tests dispatch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

}  // namespace featkit
