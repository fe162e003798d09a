#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lseg {

/// Every failure the library reports. The names double as the terminal
/// error strings printed by the CLI, and the numeric order fixes exit codes.
enum class Error {
    ExceptionalPoint,
    ZeroInverse,
    LowOrderPoint,
    LengthExceeded,
    AuthFailure,
    TooShort,
    InvalidWindow,
    Malformed,
    IncompletePhase,
    BadCert,
    StaleTimestamp,
    FutureTimestamp,
    BadSignature,
    Replayed,
    WrongDirection,
    ConfirmMismatch,
    StateError,
    UnknownPeer,
    UnexpectedMessage,
    ChannelClosed,
    Timeout,
    CounterExhausted,
    OutOfOrder,
    ScriptError,
    IoError,
};

inline constexpr int kErrorCount = int(Error::IoError) + 1;

std::string_view error_name(Error e);

/// Parses a name produced by error_name(); returns false when unknown.
bool error_from_name(std::string_view name, Error& out);

/// Process exit status used by the CLI for a terminal error.
inline int exit_code_for(Error e) { return 10 + int(e); }

class LsegError : public std::runtime_error {
public:
    explicit LsegError(Error code) : LsegError(code, {}) {}
    LsegError(Error code, const std::string& detail);

    Error code() const noexcept { return code_; }

private:
    Error code_;
};

[[noreturn]] inline void fail(Error code, const std::string& detail = {}) { throw LsegError(code, detail); }

} // namespace lseg
