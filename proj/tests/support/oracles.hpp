#pragma once

// Independent reference implementations used only by the tests:
// Boost.Multiprecision for GF(2^255 - 19), OpenSSL for the curve and hash
// primitives.

#include "lseg/bytes.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>

namespace oracle {

using boost::multiprecision::cpp_int;

const cpp_int& prime();

/// Little-endian 32 bytes, all 256 bits, reduced mod p.
cpp_int from_le(const lseg::ByteArray<32>& b);
lseg::ByteArray<32> to_le(const cpp_int& v);

cpp_int mod(const cpp_int& v);
cpp_int inverse(const cpp_int& v);

/// y = (u - 1) / (u + 1); nullopt where u + 1 = 0.
std::optional<cpp_int> mont_to_edwards(const cpp_int& u);
/// u = (1 + y) / (1 - y); nullopt where y = 1.
std::optional<cpp_int> edwards_to_mont(const cpp_int& y);

lseg::ByteArray<32> sha256(lseg::ByteView data);
lseg::ByteArray<64> sha512(lseg::ByteView data);
lseg::Bytes hkdf_sha256(lseg::ByteView ikm, lseg::ByteView salt, lseg::ByteView info, size_t len);

/// nullopt when OpenSSL rejects the input (e.g. an all-zero result).
std::optional<lseg::ByteArray<32>> x25519(const lseg::ByteArray<32>& scalar, const lseg::ByteArray<32>& u);
lseg::ByteArray<32> x25519_public(const lseg::ByteArray<32>& scalar);

lseg::ByteArray<32> ed25519_public(const lseg::ByteArray<32>& seed);
lseg::ByteArray<64> ed25519_sign(const lseg::ByteArray<32>& seed, lseg::ByteView msg);
bool ed25519_verify(const lseg::ByteArray<32>& pub, lseg::ByteView msg, const lseg::ByteArray<64>& sig);

} // namespace oracle
