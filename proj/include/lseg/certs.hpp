#pragma once

// Compact fixed-layout certificates and a single-level CA.
//
// Encoding (big-endian integers, fields in this order):
//
//   offset  size  field
//        0     1  version (= 1)
//        1     8  subject_id
//        9    32  subject_public (Ed25519)
//       41     8  not_before (ms since Unix epoch)
//       49     8  not_after
//       57     8  issuer_id
//       65    64  issuer_sig over bytes [0, 65)
//      129        total

#include "lseg/bytes.hpp"
#include "lseg/curve_maps.hpp"
#include "lseg/primitives.hpp"

#include <filesystem>
#include <string_view>

namespace lseg {

using PartyId = ByteArray<8>;

/// Parses 16 hex digits into a PartyId; throws std::invalid_argument otherwise.
PartyId party_id_from_hex(std::string_view hex);

struct ValidityWindow {
    uint64_t not_before = 0;
    uint64_t not_after = 0;
};

struct Certificate {
    static constexpr uint8_t kVersion = 1;
    static constexpr size_t kSignedSize = 65;
    static constexpr size_t kEncodedSize = 129;

    uint8_t version = kVersion;
    PartyId subject_id{};
    ByteArray<32> subject_public{};
    uint64_t not_before = 0;
    uint64_t not_after = 0;
    PartyId issuer_id{};
    Signature issuer_sig{};

    friend bool operator==(const Certificate&, const Certificate&) = default;
};

struct TrustAnchor {
    PartyId ca_id{};
    ByteArray<32> ca_public{};
    friend bool operator==(const TrustAnchor&, const TrustAnchor&) = default;
};

struct CertificateAuthority {
    PartyId id{};
    IdentityKeyPair keys;

    TrustAnchor anchor() const { return {id, keys.ed_public}; }
};

ByteArray<Certificate::kEncodedSize> encode_cert(const Certificate& cert);

/// Throws Error::Malformed on wrong length or unknown version.
Certificate decode_cert(ByteView bytes);

/// Throws Error::InvalidWindow unless not_before < not_after.
Certificate issue(const CertificateAuthority& ca, const PartyId& subject_id,
                  const ByteArray<32>& subject_public, ValidityWindow window);

enum class CertStatus { Ok, BadIssuer, BadSignature, Expired, NotYetValid };

std::string_view cert_status_name(CertStatus s);

/// Issuer and validity window only; no public-key work.
CertStatus check_cert_cheap(const Certificate& cert, const TrustAnchor& anchor, uint64_t now);

/// The CA signature alone.
CertStatus check_cert_signature(const Certificate& cert, const TrustAnchor& anchor);

/// Full check: cheap checks first, then the signature.
CertStatus check_cert(const Certificate& cert, const TrustAnchor& anchor, uint64_t now);

inline bool verify_cert(const Certificate& cert, const TrustAnchor& anchor, uint64_t now) {
    return check_cert(cert, anchor, now) == CertStatus::Ok;
}

/// Anchor from a CA's self-issued certificate; Error::BadCert if the
/// self-signature does not verify.
TrustAnchor anchor_from_self_signed(const Certificate& ca_cert);

// Files: certificates are raw encodings (.lsegc), seeds raw 32 bytes (.lsegk, mode 0600).
void save_cert(const std::filesystem::path& path, const Certificate& cert);
Certificate load_cert(const std::filesystem::path& path);
void save_seed(const std::filesystem::path& path, const ByteArray<32>& seed);
ByteArray<32> load_seed(const std::filesystem::path& path);

} // namespace lseg
