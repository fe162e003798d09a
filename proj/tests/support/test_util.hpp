#pragma once

#include "lseg/error.hpp"

#include <doctest.h>

#include <optional>
#include <ostream>

/// The error code thrown by `fn`, or nullopt if it returns normally.
template <class Fn> std::optional<lseg::Error> error_of(Fn&& fn) {
    try {
        fn();
    } catch (const lseg::LsegError& e) {
        return e.code();
    }
    return std::nullopt;
}

namespace lseg {
inline std::ostream& operator<<(std::ostream& os, Error e) { return os << error_name(e); }
} // namespace lseg
