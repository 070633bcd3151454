#pragma once

#include <stdexcept>
#include <string>

namespace tci {

enum class ErrorCode {
    SingularTorus,
    SelfBond,
    InvalidLabel,
    Incommensurate,
    DimensionOverflow,
    BasisMismatch,
    DimensionTooLargeForOracle,
    OutOfValidity,
    InsufficientSingletLevels,
    IncompleteGrid,
    InvalidArgument,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg)
        : std::runtime_error(msg), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& msg) {
    if (!cond) throw Error(code, msg);
}

} // namespace tci
