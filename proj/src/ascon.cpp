#include "lseg/ascon.hpp"

#include <cstring>

namespace lseg::ascon {

namespace {

constexpr uint64_t kIv128a = 0x80800c0800000000ULL;
constexpr size_t kRate = 16;

struct State {
    uint64_t x[5];
};

inline uint64_t ror(uint64_t v, unsigned n) { return (v >> n) | (v << (64 - n)); }

inline void round(State& s, uint8_t c) {
    uint64_t x0 = s.x[0], x1 = s.x[1], x2 = s.x[2], x3 = s.x[3], x4 = s.x[4];
    x2 ^= c;
    // substitution layer
    x0 ^= x4;
    x4 ^= x3;
    x2 ^= x1;
    uint64_t t0 = ~x0 & x1, t1 = ~x1 & x2, t2 = ~x2 & x3, t3 = ~x3 & x4, t4 = ~x4 & x0;
    x0 ^= t1;
    x1 ^= t2;
    x2 ^= t3;
    x3 ^= t4;
    x4 ^= t0;
    x1 ^= x0;
    x0 ^= x4;
    x3 ^= x2;
    x2 = ~x2;
    // linear diffusion layer
    s.x[0] = x0 ^ ror(x0, 19) ^ ror(x0, 28);
    s.x[1] = x1 ^ ror(x1, 61) ^ ror(x1, 39);
    s.x[2] = x2 ^ ror(x2, 1) ^ ror(x2, 6);
    s.x[3] = x3 ^ ror(x3, 10) ^ ror(x3, 17);
    s.x[4] = x4 ^ ror(x4, 7) ^ ror(x4, 41);
}

constexpr uint8_t kRoundConstants[12] = {0xf0, 0xe1, 0xd2, 0xc3, 0xb4, 0xa5,
                                         0x96, 0x87, 0x78, 0x69, 0x5a, 0x4b};

inline void permute(State& s, int rounds) {
    for (int i = 12 - rounds; i < 12; ++i)
        round(s, kRoundConstants[i]);
}

// Big-endian load/store of up to 8 bytes into the top of a word.
inline uint64_t load_bytes(const uint8_t* p, size_t n) {
    uint64_t v = 0;
    for (size_t i = 0; i < n; ++i)
        v |= uint64_t(p[i]) << (56 - 8 * i);
    return v;
}

inline void store_bytes(uint8_t* p, uint64_t v, size_t n) {
    for (size_t i = 0; i < n; ++i)
        p[i] = uint8_t(v >> (56 - 8 * i));
}

inline uint64_t pad_bit(size_t i) { return uint64_t(0x80) << (56 - 8 * i); }

// Splits a partial rate block of `n` < 16 bytes across x0 / x1.
inline void xor_partial(State& s, const uint8_t* p, size_t n) {
    if (n >= 8) {
        s.x[0] ^= load_bytes(p, 8);
        s.x[1] ^= load_bytes(p + 8, n - 8);
        s.x[1] ^= pad_bit(n - 8);
    } else {
        s.x[0] ^= load_bytes(p, n);
        s.x[0] ^= pad_bit(n);
    }
}

void initialize(State& s, const uint8_t* key, const uint8_t* nonce, uint64_t& k0, uint64_t& k1) {
    k0 = load_bytes(key, 8);
    k1 = load_bytes(key + 8, 8);
    s.x[0] = kIv128a;
    s.x[1] = k0;
    s.x[2] = k1;
    s.x[3] = load_bytes(nonce, 8);
    s.x[4] = load_bytes(nonce + 8, 8);
    permute(s, 12);
    s.x[3] ^= k0;
    s.x[4] ^= k1;
}

void absorb_ad(State& s, ByteView ad) {
    if (!ad.empty()) {
        const uint8_t* p = ad.data();
        size_t n = ad.size();
        while (n >= kRate) {
            s.x[0] ^= load_bytes(p, 8);
            s.x[1] ^= load_bytes(p + 8, 8);
            permute(s, 8);
            p += kRate;
            n -= kRate;
        }
        xor_partial(s, p, n);
        permute(s, 8);
    }
    s.x[4] ^= 1;
}

void finalize(State& s, uint64_t k0, uint64_t k1, uint8_t* tag) {
    s.x[2] ^= k0;
    s.x[3] ^= k1;
    permute(s, 12);
    store_bytes(tag, s.x[3] ^ k0, 8);
    store_bytes(tag + 8, s.x[4] ^ k1, 8);
}

} // namespace

void encrypt_128a(const uint8_t* key, const uint8_t* nonce, ByteView ad, ByteView plaintext,
                  uint8_t* ciphertext, uint8_t* tag) {
    State s;
    uint64_t k0, k1;
    initialize(s, key, nonce, k0, k1);
    absorb_ad(s, ad);

    const uint8_t* in = plaintext.data();
    uint8_t* out = ciphertext;
    size_t n = plaintext.size();
    while (n >= kRate) {
        s.x[0] ^= load_bytes(in, 8);
        s.x[1] ^= load_bytes(in + 8, 8);
        store_bytes(out, s.x[0], 8);
        store_bytes(out + 8, s.x[1], 8);
        permute(s, 8);
        in += kRate;
        out += kRate;
        n -= kRate;
    }
    xor_partial(s, in, n);
    if (n >= 8) {
        store_bytes(out, s.x[0], 8);
        store_bytes(out + 8, s.x[1], n - 8);
    } else {
        store_bytes(out, s.x[0], n);
    }

    finalize(s, k0, k1, tag);
}

bool decrypt_128a(const uint8_t* key, const uint8_t* nonce, ByteView ad, ByteView ciphertext,
                  const uint8_t* tag, uint8_t* plaintext) {
    State s;
    uint64_t k0, k1;
    initialize(s, key, nonce, k0, k1);
    absorb_ad(s, ad);

    const uint8_t* in = ciphertext.data();
    uint8_t* out = plaintext;
    size_t n = ciphertext.size();
    while (n >= kRate) {
        uint64_t c0 = load_bytes(in, 8), c1 = load_bytes(in + 8, 8);
        store_bytes(out, s.x[0] ^ c0, 8);
        store_bytes(out + 8, s.x[1] ^ c1, 8);
        s.x[0] = c0;
        s.x[1] = c1;
        permute(s, 8);
        in += kRate;
        out += kRate;
        n -= kRate;
    }
    // Last partial block: recover plaintext bytes, then absorb them padded.
    uint8_t rate[kRate];
    store_bytes(rate, s.x[0], 8);
    store_bytes(rate + 8, s.x[1], 8);
    uint8_t last[kRate] = {};
    for (size_t i = 0; i < n; ++i) {
        last[i] = rate[i] ^ in[i];
        out[i] = last[i];
    }
    xor_partial(s, last, n);

    uint8_t expected[kTagSize];
    finalize(s, k0, k1, expected);
    bool ok = equal_ct(ByteView(expected, kTagSize), ByteView(tag, kTagSize));
    if (!ok && plaintext != nullptr)
        secure_wipe(std::span<uint8_t>(plaintext, ciphertext.size()));
    return ok;
}

} // namespace lseg::ascon
