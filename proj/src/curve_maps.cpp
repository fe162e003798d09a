#include "lseg/curve_maps.hpp"

#include "lseg/error.hpp"

#include <sodium.h>

#include <stdexcept>

namespace lseg {

MontgomeryU MontgomeryU::decode(const ByteArray<32>& bytes) {
    ByteArray<32> masked = bytes;
    masked[31] &= 0x7f;
    return {FieldElement::from_bytes(masked)};
}

EdwardsY EdwardsY::decode(const ByteArray<32>& bytes) {
    ByteArray<32> masked = bytes;
    masked[31] &= 0x7f;
    return {FieldElement::from_bytes(masked)};
}

FieldElement fe_invert(const FieldElement& x) {
    if (x.is_zero())
        fail(Error::ZeroInverse);
    return x.pow_p_minus_2();
}

EdwardsY mont_to_edwards(const MontgomeryU& m) {
    const FieldElement one = FieldElement::one();
    FieldElement den = m.u + one;
    if (den.is_zero())
        fail(Error::ExceptionalPoint, "u = p - 1");
    return {(m.u - one) * fe_invert(den)};
}

MontgomeryU edwards_to_mont(const EdwardsY& e) {
    const FieldElement one = FieldElement::one();
    FieldElement den = one - e.y;
    if (den.is_zero())
        fail(Error::ExceptionalPoint, "y = 1");
    return {(one + e.y) * fe_invert(den)};
}

void clamp_scalar(ByteArray<32>& s) {
    s[0] &= 248;
    s[31] &= 127;
    s[31] |= 64;
}

ByteArray<32> ed_public_to_x25519(const ByteArray<32>& ed_public) {
    return edwards_to_mont(EdwardsY::decode(ed_public)).encode();
}

IdentityKeyPair derive_identity(const ByteArray<32>& seed) {
    if (sodium_init() < 0)
        throw std::runtime_error("libsodium initialisation failed");

    IdentityKeyPair kp;
    kp.seed = SecretBytes<32>(seed);
    if (crypto_sign_seed_keypair(kp.ed_public.data(), kp.signing_key_.data(), seed.data()) != 0)
        throw std::runtime_error("crypto_sign_seed_keypair failed");

    SecretBytes<64> digest;
    crypto_hash_sha512(digest.data(), seed.data(), seed.size());
    auto& scalar = kp.x_scalar.mutable_bytes();
    std::copy(digest.bytes().begin(), digest.bytes().begin() + 32, scalar.begin());
    clamp_scalar(scalar);

    if (crypto_scalarmult_base(kp.x_public.data(), scalar.data()) != 0)
        throw std::runtime_error("crypto_scalarmult_base failed");

    if (ed_public_to_x25519(kp.ed_public) != kp.x_public)
        throw std::logic_error("unified key pair routes disagree");
    return kp;
}

} // namespace lseg
