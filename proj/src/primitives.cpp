#include "lseg/primitives.hpp"

#include "lseg/ascon.hpp"
#include "lseg/error.hpp"

#include <sodium.h>

#include <stdexcept>

namespace lseg {

namespace {
thread_local PrimitiveCounters t_counters;
thread_local SealObserver t_seal_observer;

struct SodiumInit {
    SodiumInit() {
        if (sodium_init() < 0)
            throw std::runtime_error("libsodium initialisation failed");
    }
};
const SodiumInit kSodiumInit;

ByteArray<32> hmac_sha256(ByteView key, std::initializer_list<ByteView> parts) {
    crypto_auth_hmacsha256_state st;
    static const uint8_t empty = 0; // libsodium wants a non-null key pointer
    crypto_auth_hmacsha256_init(&st, key.empty() ? &empty : key.data(), key.size());
    for (ByteView p : parts)
        if (!p.empty())
            crypto_auth_hmacsha256_update(&st, p.data(), p.size());
    ByteArray<32> out;
    crypto_auth_hmacsha256_final(&st, out.data());
    sodium_memzero(&st, sizeof st);
    return out;
}
} // namespace

PrimitiveCounters& primitive_counters() { return t_counters; }

void set_seal_observer(SealObserver observer) { t_seal_observer = std::move(observer); }

Signature sign(const IdentityKeyPair& signer, ByteView message) {
    ++t_counters.sign;
    Signature sig;
    crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(),
                         signer.signing_key().data());
    return sig;
}

bool verify(const ByteArray<32>& ed_public, ByteView message, const Signature& sig) {
    ++t_counters.verify;
    return crypto_sign_verify_detached(sig.data(), message.data(), message.size(),
                                       ed_public.data()) == 0;
}

SharedSecret dh(const SecretBytes<32>& scalar, const ByteArray<32>& peer_u) {
    ++t_counters.dh;
    SharedSecret out;
    // libsodium reports an all-zero result as failure.
    if (crypto_scalarmult(out.data(), scalar.data(), peer_u.data()) != 0)
        fail(Error::LowOrderPoint);
    return out;
}

ByteArray<32> x25519_public(const SecretBytes<32>& scalar) {
    ++t_counters.dh;
    ByteArray<32> out;
    if (crypto_scalarmult_base(out.data(), scalar.data()) != 0)
        fail(Error::LowOrderPoint);
    return out;
}

Bytes hkdf(ByteView ikm, ByteView salt, ByteView info, size_t out_len) {
    if (out_len > kHkdfMaxOutput)
        fail(Error::LengthExceeded);

    // An absent salt is HashLen zero bytes; HMAC pads short keys with zeros,
    // so the empty key is equivalent.
    SecretBytes<32> prk(hmac_sha256(salt, {ikm}));

    Bytes okm;
    okm.reserve(out_len);
    ByteArray<32> t{};
    size_t t_len = 0;
    for (uint8_t counter = 1; okm.size() < out_len; ++counter) {
        t = hmac_sha256(prk.view(), {ByteView(t.data(), t_len), info, ByteView(&counter, 1)});
        t_len = t.size();
        size_t take = std::min(t.size(), out_len - okm.size());
        okm.insert(okm.end(), t.begin(), t.begin() + take);
    }
    secure_wipe(t);
    return okm;
}

Bytes aead_seal(const AeadKey& key, const AeadNonce& nonce, ByteView ad, ByteView plaintext) {
    if (t_seal_observer)
        t_seal_observer(key, nonce);
    Bytes out(plaintext.size() + kAeadTagSize);
    ascon::encrypt_128a(key.data(), nonce.data(), ad, plaintext, out.data(),
                        out.data() + plaintext.size());
    return out;
}

Bytes aead_open(const AeadKey& key, const AeadNonce& nonce, ByteView ad, ByteView sealed) {
    if (sealed.size() < kAeadTagSize)
        fail(Error::TooShort);
    size_t ct_len = sealed.size() - kAeadTagSize;
    Bytes out(ct_len);
    if (!ascon::decrypt_128a(key.data(), nonce.data(), ad, sealed.first(ct_len),
                             sealed.data() + ct_len, out.data()))
        fail(Error::AuthFailure);
    return out;
}

Digest hash256(ByteView data) {
    Digest out;
    crypto_hash_sha256(out.data(), data.data(), data.size());
    return out;
}

} // namespace lseg
