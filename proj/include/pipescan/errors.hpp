#pragma once

#include <stdexcept>
#include <string>

namespace pipescan {

enum class ErrorKind {
    NonConvergence,
    BehindCamera,
    NotRectified,
    ZeroDisparity,
    OutOfBore,
    EmptyMask,
    NoCircle,
    TooSparse,
    RowOutOfImage,
    DegenerateRing,
    DegenerateBaseline,
    NonMonotoneOdometry,
    AngularMismatch,
    IoFailure,
    InvalidConfig,
    InvalidArgument,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

} // namespace pipescan
