#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lseg {

using Bytes = std::vector<uint8_t>;
using ByteView = std::span<const uint8_t>;
template <size_t N> using ByteArray = std::array<uint8_t, N>;

std::string to_hex(ByteView data);

/// Parses an even-length hex string; whitespace is not accepted.
/// Throws std::invalid_argument on bad input.
Bytes from_hex(std::string_view hex);

template <size_t N> ByteArray<N> array_from_hex(std::string_view hex) {
    Bytes b = from_hex(hex);
    if (b.size() != N)
        throw std::invalid_argument("hex string has wrong length");
    ByteArray<N> out;
    std::copy(b.begin(), b.end(), out.begin());
    return out;
}

/// Zeroes memory in a way the optimizer may not elide.
void secure_wipe(std::span<uint8_t> data);

/// Constant-time equality; false when lengths differ.
bool equal_ct(ByteView a, ByteView b);

inline void store_be64(uint8_t* out, uint64_t v) {
    for (int i = 7; i >= 0; --i) {
        out[i] = uint8_t(v);
        v >>= 8;
    }
}

inline uint64_t load_be64(const uint8_t* in) {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v = (v << 8) | in[i];
    return v;
}

inline void append(Bytes& out, ByteView data) { out.insert(out.end(), data.begin(), data.end()); }

inline void append_be64(Bytes& out, uint64_t v) {
    uint8_t b[8];
    store_be64(b, v);
    out.insert(out.end(), b, b + 8);
}

template <size_t N> Bytes concat(const ByteArray<N>& a, ByteView b) {
    Bytes out(a.begin(), a.end());
    append(out, b);
    return out;
}

/// Fixed-size secret buffer, wiped on destruction and on request.
template <size_t N> class SecretBytes {
public:
    SecretBytes() { bytes_.fill(0); }
    explicit SecretBytes(const ByteArray<N>& b) : bytes_(b) {}
    explicit SecretBytes(ByteView b) {
        if (b.size() != N)
            throw std::invalid_argument("secret has wrong length");
        std::copy(b.begin(), b.end(), bytes_.begin());
    }
    SecretBytes(const SecretBytes&) = default;
    SecretBytes& operator=(const SecretBytes&) = default;
    ~SecretBytes() { wipe(); }

    void wipe() { secure_wipe(bytes_); }

    const ByteArray<N>& bytes() const { return bytes_; }
    ByteArray<N>& mutable_bytes() { return bytes_; }
    ByteView view() const { return bytes_; }
    const uint8_t* data() const { return bytes_.data(); }
    uint8_t* data() { return bytes_.data(); }
    static constexpr size_t size() { return N; }

    friend bool operator==(const SecretBytes& a, const SecretBytes& b) {
        return equal_ct(a.bytes_, b.bytes_);
    }

private:
    ByteArray<N> bytes_;
};

} // namespace lseg
