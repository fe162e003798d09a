#include "lseg/error.hpp"

#include <array>

namespace lseg {

namespace {
constexpr std::array<std::string_view, kErrorCount> kNames = {
    "ExceptionalPoint", "ZeroInverse",     "LowOrderPoint", "LengthExceeded",  "AuthFailure",
    "TooShort",         "InvalidWindow",   "Malformed",     "IncompletePhase", "BadCert",
    "StaleTimestamp",   "FutureTimestamp", "BadSignature",  "Replayed",        "WrongDirection",
    "ConfirmMismatch",  "StateError",      "UnknownPeer",   "UnexpectedMessage", "ChannelClosed",
    "Timeout",          "CounterExhausted", "OutOfOrder",   "ScriptError",     "IoError",
};
} // namespace

std::string_view error_name(Error e) {
    auto i = size_t(e);
    return i < kNames.size() ? kNames[i] : std::string_view("Unknown");
}

bool error_from_name(std::string_view name, Error& out) {
    for (size_t i = 0; i < kNames.size(); ++i) {
        if (kNames[i] == name) {
            out = Error(i);
            return true;
        }
    }
    return false;
}

LsegError::LsegError(Error code, const std::string& detail)
    : std::runtime_error(detail.empty() ? std::string(error_name(code))
                                        : std::string(error_name(code)) + ": " + detail),
      code_(code) {}

} // namespace lseg
