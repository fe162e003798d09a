#include "lseg/error.hpp"
#include "lseg/primitives.hpp"
#include "lseg/random.hpp"

#include "oracles.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cstring>

using namespace lseg;

namespace {

ByteView text(const char* s) { return {reinterpret_cast<const uint8_t*>(s), std::strlen(s)}; }

} // namespace

TEST_CASE("Ed25519 agrees with OpenSSL") {
    SeededRandom rng(21);
    for (int i = 0; i < 100; ++i) {
        auto seed = rng.array<32>();
        IdentityKeyPair id = derive_identity(seed);
        Bytes msg(static_cast<size_t>(i));
        rng.fill(msg);
        Signature sig = sign(id, msg);
        CHECK(sig == oracle::ed25519_sign(seed, msg));
        CHECK(oracle::ed25519_verify(id.ed_public, msg, sig));
        CHECK(verify(id.ed_public, msg, sig));
    }
}

TEST_CASE("verify returns false on bad input") {
    IdentityKeyPair id = derive_identity(ByteArray<32>{});
    const Bytes msg = {1, 2, 3};
    Signature sig = sign(id, msg);
    Signature bad = sig;
    bad[10] ^= 1;
    CHECK_FALSE(verify(id.ed_public, msg, bad));
    CHECK_FALSE(verify(id.ed_public, Bytes{1, 2, 4}, sig));
    ByteArray<32> junk;
    junk.fill(0xff);
    CHECK_FALSE(verify(junk, msg, sig));
    Signature high_s = sig;
    high_s[63] |= 0xf0;
    CHECK_FALSE(verify(id.ed_public, msg, high_s));
}

TEST_CASE("X25519 agrees with OpenSSL") {
    SeededRandom rng(22);
    for (int i = 0; i < 200; ++i) {
        SecretBytes<32> s(rng.array<32>());
        auto u = rng.array<32>();
        auto expected = oracle::x25519(s.bytes(), u);
        REQUIRE(expected);
        CHECK(dh(s, u) == *expected);
        CHECK(x25519_public(s) == oracle::x25519_public(s.bytes()));
    }
}

TEST_CASE("low-order peer keys are rejected") {
    SecretBytes<32> s(ByteArray<32>{1, 2, 3});
    ByteArray<32> zero{}, one{};
    one[0] = 1;
    // order-8 point from the curve's torsion subgroup
    auto order8 = array_from_hex<32>("e0eb7a7c3b41b8ae1656e3faf19fc46ada098deb9c32b1fd866205165f49b800");
    for (const auto& u : {zero, one, order8})
        CHECK(error_of([&] { dh(s, u); }) == Error::LowOrderPoint);
}

TEST_CASE("HKDF agrees with OpenSSL") {
    SeededRandom rng(23);
    for (size_t len : {1, 16, 31, 32, 33, 64, 100, 255, 8160}) {
        Bytes ikm(40), salt(len % 70), info(len % 13);
        rng.fill(ikm);
        rng.fill(salt);
        rng.fill(info);
        CHECK(hkdf(ikm, salt, info, len) == oracle::hkdf_sha256(ikm, salt, info, len));
    }
}

TEST_CASE("HKDF output limit") {
    CHECK(hkdf(text("k"), {}, {}, kHkdfMaxOutput).size() == kHkdfMaxOutput);
    CHECK(error_of([] { hkdf(text("k"), {}, {}, kHkdfMaxOutput + 1); }) == Error::LengthExceeded);
}

TEST_CASE("SHA-256 agrees with OpenSSL") {
    SeededRandom rng(24);
    for (size_t n : {0, 1, 55, 56, 64, 1000}) {
        Bytes m(n);
        rng.fill(m);
        CHECK(hash256(m) == oracle::sha256(m));
    }
    CHECK(to_hex(hash256(text("abc"))) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("AEAD adapter") {
    AeadKey key(ByteArray<16>{1});
    AeadNonce nonce{2};
    const Bytes ad = {9, 9};
    const Bytes pt = {1, 2, 3, 4};
    Bytes sealed = aead_seal(key, nonce, ad, pt);
    CHECK(sealed.size() == pt.size() + kAeadTagSize);
    CHECK(aead_open(key, nonce, ad, sealed) == pt);

    Bytes bad = sealed;
    bad.back() ^= 1;
    CHECK(error_of([&] { aead_open(key, nonce, ad, bad); }) == Error::AuthFailure);
    CHECK(error_of([&] { aead_open(key, nonce, Bytes{9, 8}, sealed); }) == Error::AuthFailure);
    CHECK(error_of([&] { aead_open(key, nonce, ad, Bytes(15)); }) == Error::TooShort);
    CHECK(aead_open(key, nonce, ad, aead_seal(key, nonce, ad, {})).empty());
}

TEST_CASE("public-key operations are counted per thread") {
    IdentityKeyPair id = derive_identity(ByteArray<32>{5});
    const PrimitiveCounters before = primitive_counters();
    Signature sig = sign(id, text("m"));
    verify(id.ed_public, text("m"), sig);
    dh(id.x_scalar, id.x_public);
    hash256(text("m"));
    const PrimitiveCounters d = primitive_counters() - before;
    CHECK(d.sign == 1);
    CHECK(d.verify == 1);
    CHECK(d.dh == 1);
    CHECK(d.total() == 3);
}
