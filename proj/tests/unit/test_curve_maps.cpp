#include "lseg/curve_maps.hpp"
#include "lseg/error.hpp"
#include "lseg/random.hpp"

#include "oracles.hpp"

#include <sodium.h>

#include <doctest.h>

using namespace lseg;
using oracle::cpp_int;

namespace {

MontgomeryU mont(const cpp_int& v) { return MontgomeryU::decode(oracle::to_le(v)); }
EdwardsY edw(const cpp_int& v) { return EdwardsY::decode(oracle::to_le(v)); }

Error error_of(auto&& fn) {
    try {
        fn();
    } catch (const LsegError& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return Error::IoError;
}

} // namespace

TEST_CASE("base point maps to 4/5") {
    const cpp_int expected = oracle::mod(4 * oracle::inverse(5));
    CHECK(oracle::from_le(mont_to_edwards(mont(9)).encode()) == expected);
    // and that is the y-coordinate of the Ed25519 base point
    ByteArray<32> base_y = oracle::to_le(expected);
    CHECK(to_hex(base_y) == "5866666666666666666666666666666666666666666666666666666666666666");
    CHECK(oracle::from_le(edwards_to_mont(edw(expected)).encode()) == 9);
}

TEST_CASE("maps agree with the bignum oracle") {
    SeededRandom rng(3);
    for (int i = 0; i < 2000; ++i) {
        auto raw = rng.array<32>();
        raw[31] &= 0x7f;
        cpp_int v = oracle::from_le(raw);
        auto y = oracle::mont_to_edwards(v);
        auto u = oracle::edwards_to_mont(v);
        REQUIRE(y);
        REQUIRE(u);
        CHECK(oracle::from_le(mont_to_edwards(MontgomeryU::decode(raw)).encode()) == *y);
        CHECK(oracle::from_le(edwards_to_mont(EdwardsY::decode(raw)).encode()) == *u);
    }
}

TEST_CASE("round trip over random field elements") {
    SeededRandom rng(5);
    for (int i = 0; i < 10000; ++i) {
        auto raw = rng.array<32>();
        raw[31] &= 0x7f;
        MontgomeryU u = MontgomeryU::decode(raw);
        if (u.encode() == oracle::to_le(oracle::prime() - 1))
            continue;
        EdwardsY y = mont_to_edwards(u);
        if (y.encode() == oracle::to_le(1))
            continue;
        CHECK(edwards_to_mont(y).encode() == u.encode());
    }
}

TEST_CASE("exceptional points") {
    CHECK(error_of([] { mont_to_edwards(mont(oracle::prime() - 1)); }) == Error::ExceptionalPoint);
    CHECK(error_of([] { edwards_to_mont(edw(1)); }) == Error::ExceptionalPoint);
    CHECK(error_of([] { fe_invert(FieldElement::zero()); }) == Error::ZeroInverse);
    // u = 0 and y = -1 are ordinary inputs of the rational maps
    CHECK(oracle::from_le(mont_to_edwards(mont(0)).encode()) == oracle::prime() - 1);
    CHECK(oracle::from_le(edwards_to_mont(edw(oracle::prime() - 1)).encode()) == 0);
}

TEST_CASE("decoding masks the top bit") {
    ByteArray<32> a{}, b{};
    a[0] = b[0] = 9;
    b[31] = 0x80;
    CHECK(MontgomeryU::decode(a) == MontgomeryU::decode(b));
    CHECK(EdwardsY::decode(a) == EdwardsY::decode(b));
}

TEST_CASE("clamping") {
    ByteArray<32> s;
    s.fill(0xff);
    clamp_scalar(s);
    CHECK(s[0] == 0xf8);
    CHECK(s[31] == 0x7f);
    s.fill(0x00);
    clamp_scalar(s);
    CHECK(s[31] == 0x40);
}

TEST_CASE("unified identity matches OpenSSL and libsodium conversions") {
    SeededRandom rng(9);
    for (int i = 0; i < 200; ++i) {
        auto seed = rng.array<32>();
        IdentityKeyPair id = derive_identity(seed);
        CHECK(id.ed_public == oracle::ed25519_public(seed));
        CHECK(id.x_public == oracle::x25519_public(id.x_scalar.bytes()));
        CHECK(ed_public_to_x25519(id.ed_public) == id.x_public);

        ByteArray<32> sodium_x;
        REQUIRE(crypto_sign_ed25519_pk_to_curve25519(sodium_x.data(), id.ed_public.data()) == 0);
        CHECK(sodium_x == id.x_public);
        CHECK(id.signing_key().bytes()[0] == seed[0]);
    }
}

TEST_CASE("x25519 public via the map equals the clamped-scalar public for 1000 seeds") {
    SeededRandom rng(1000);
    for (int i = 0; i < 1000; ++i) {
        IdentityKeyPair id = derive_identity(rng.array<32>());
        REQUIRE(edwards_to_mont(EdwardsY::decode(id.ed_public)).encode() == id.x_public);
    }
}
