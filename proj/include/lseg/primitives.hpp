#pragma once

// Uniform adapters over the primitives the protocol composes. Ed25519,
// X25519, SHA-256 and HMAC-SHA256 come from libsodium; HKDF is layered on
// its HMAC; Ascon-128a is local (see ascon.hpp). Each adapter is gated by
// the official test vectors under vectors/.

#include "lseg/bytes.hpp"
#include "lseg/curve_maps.hpp"

#include <functional>

namespace lseg {

using Signature = ByteArray<64>;
using SharedSecret = ByteArray<32>;
using AeadKey = SecretBytes<16>;
using AeadNonce = ByteArray<16>;
using Digest = ByteArray<32>;

inline constexpr size_t kAeadTagSize = 16;
inline constexpr size_t kHkdfMaxOutput = 255 * 32;

Signature sign(const IdentityKeyPair& signer, ByteView message);

/// Malformed keys or signatures yield false, never an exception.
bool verify(const ByteArray<32>& ed_public, ByteView message, const Signature& sig);

/// X25519. Throws Error::LowOrderPoint when the shared secret is all zero.
SharedSecret dh(const SecretBytes<32>& scalar, const ByteArray<32>& peer_u);

/// X25519 with the base point u = 9.
ByteArray<32> x25519_public(const SecretBytes<32>& scalar);

/// HKDF-SHA256 (RFC 5869). Throws Error::LengthExceeded past 255 * 32 bytes.
Bytes hkdf(ByteView ikm, ByteView salt, ByteView info, size_t out_len);

/// Ascon-128a; returns ciphertext || 16-byte tag.
Bytes aead_seal(const AeadKey& key, const AeadNonce& nonce, ByteView ad, ByteView plaintext);

/// Throws Error::TooShort below 16 bytes and Error::AuthFailure on a tag mismatch.
Bytes aead_open(const AeadKey& key, const AeadNonce& nonce, ByteView ad, ByteView sealed);

Digest hash256(ByteView data);

/// Per-thread invocation counters for the public-key operations; used to
/// check that cheap rejections happen before any expensive work.
struct PrimitiveCounters {
    uint64_t sign = 0;
    uint64_t verify = 0;
    uint64_t dh = 0;

    uint64_t total() const { return sign + verify + dh; }
    friend PrimitiveCounters operator-(const PrimitiveCounters& a, const PrimitiveCounters& b) {
        return {a.sign - b.sign, a.verify - b.verify, a.dh - b.dh};
    }
};

PrimitiveCounters& primitive_counters();

/// Test hook: when set, called with (key, nonce) on every aead_seal on this thread.
using SealObserver = std::function<void(const AeadKey&, const AeadNonce&)>;
void set_seal_observer(SealObserver observer);

} // namespace lseg
