#pragma once

// Montgomery <-> Edwards coordinate conversions over Curve25519 and the
// unified identity key pair built on them: one 32-byte Ed25519 seed that
// signs with its Edwards form and does X25519 with its Montgomery form.

#include "lseg/bytes.hpp"
#include "lseg/field.hpp"

namespace lseg {

/// Montgomery u-coordinate. Decoding ignores the high bit of byte 31 and
/// reduces non-canonical values mod p (RFC 7748).
struct MontgomeryU {
    FieldElement u;

    static MontgomeryU decode(const ByteArray<32>& bytes);
    ByteArray<32> encode() const { return u.to_bytes(); }
    friend bool operator==(const MontgomeryU&, const MontgomeryU&) = default;
};

/// Edwards y-coordinate. Decoding ignores bit 255, which in an Ed25519
/// public key carries the sign of x.
struct EdwardsY {
    FieldElement y;

    static EdwardsY decode(const ByteArray<32>& bytes);
    ByteArray<32> encode() const { return y.to_bytes(); }
    friend bool operator==(const EdwardsY&, const EdwardsY&) = default;
};

/// Multiplicative inverse via x^(p-2). Throws Error::ZeroInverse for 0.
FieldElement fe_invert(const FieldElement& x);

/// y = (u - 1) / (u + 1). Throws Error::ExceptionalPoint when u = p - 1.
EdwardsY mont_to_edwards(const MontgomeryU& u);

/// u = (1 + y) / (1 - y). Throws Error::ExceptionalPoint when y = 1.
MontgomeryU edwards_to_mont(const EdwardsY& y);

/// RFC 7748 scalar clamping.
void clamp_scalar(ByteArray<32>& scalar);

struct IdentityKeyPair {
    SecretBytes<32> seed;
    ByteArray<32> ed_public{};
    SecretBytes<32> x_scalar; ///< clamp(SHA-512(seed)[0..32])
    ByteArray<32> x_public{}; ///< X25519(x_scalar, 9) == edwards_to_mont(ed_public)

    /// libsodium's 64-byte signing key (seed || ed_public).
    const SecretBytes<64>& signing_key() const { return signing_key_; }

private:
    SecretBytes<64> signing_key_;
    friend IdentityKeyPair derive_identity(const ByteArray<32>& seed);
};

/// Derives all four forms from a seed. Both routes to x_public are computed
/// and compared; a mismatch is a library defect and throws std::logic_error.
IdentityKeyPair derive_identity(const ByteArray<32>& seed);

/// X25519 public key from an Ed25519 public key through the birational map.
ByteArray<32> ed_public_to_x25519(const ByteArray<32>& ed_public);

} // namespace lseg
