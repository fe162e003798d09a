#pragma once

#include "lseg/bytes.hpp"

#include <array>
#include <cstdint>

namespace lseg {

/// An element of GF(2^255 - 19) held as five 51-bit limbs.
///
/// Limbs may carry a few extra bits between operations; every observable
/// output (to_bytes, operator==, is_zero) goes through full reduction, so
/// the encoded value is always the canonical representative in [0, p).
class FieldElement {
public:
    FieldElement() = default;

    static FieldElement zero() { return {}; }
    static FieldElement one() { return from_u64(1); }
    static FieldElement from_u64(uint64_t v);

    /// Little-endian decode of all 256 bits, reduced mod p. Bit 255 is
    /// kept (worth 2^255 = 19 mod p); callers that follow RFC 7748/8032
    /// mask it first.
    static FieldElement from_bytes(const ByteArray<32>& in);

    /// Canonical 32-byte little-endian encoding.
    ByteArray<32> to_bytes() const;

    bool is_zero() const;

    friend FieldElement operator+(const FieldElement& a, const FieldElement& b);
    friend FieldElement operator-(const FieldElement& a, const FieldElement& b);
    friend FieldElement operator*(const FieldElement& a, const FieldElement& b);
    FieldElement operator-() const { return zero() - *this; }
    friend bool operator==(const FieldElement& a, const FieldElement& b);

    FieldElement square() const { return *this * *this; }

    /// x^(p-2) by a fixed square-and-multiply chain; maps 0 to 0.
    FieldElement pow_p_minus_2() const;

private:
    std::array<uint64_t, 5> limb_{};

    void carry();
};

/// p - 1, i.e. -1 mod p.
FieldElement field_minus_one();

} // namespace lseg
