#pragma once

#include "lseg/bytes.hpp"

namespace lseg::ascon {

// Ascon-128a (v1.2): 128-bit key, nonce and tag; 128-bit rate; p^12 for
// initialization and finalization, p^8 for data blocks.

inline constexpr size_t kKeySize = 16;
inline constexpr size_t kNonceSize = 16;
inline constexpr size_t kTagSize = 16;

/// Encrypts `plaintext` into `ciphertext` (same length) and writes the tag.
void encrypt_128a(const uint8_t* key, const uint8_t* nonce, ByteView ad, ByteView plaintext,
                  uint8_t* ciphertext, uint8_t* tag);

/// Decrypts into `plaintext` and checks the tag in constant time.
/// On failure the plaintext buffer is zeroed and false is returned.
bool decrypt_128a(const uint8_t* key, const uint8_t* nonce, ByteView ad, ByteView ciphertext,
                  const uint8_t* tag, uint8_t* plaintext);

} // namespace lseg::ascon
