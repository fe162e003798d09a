#include "lseg/certs.hpp"

#include "lseg/error.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cstring>
#include <fstream>
#include <iterator>

namespace lseg {

PartyId party_id_from_hex(std::string_view hex) {
    if (hex.size() != 16)
        throw std::invalid_argument("party id must be 16 hex digits");
    return array_from_hex<8>(hex);
}

namespace {
void write_signed_part(const Certificate& c, uint8_t* out) {
    out[0] = c.version;
    std::memcpy(out + 1, c.subject_id.data(), 8);
    std::memcpy(out + 9, c.subject_public.data(), 32);
    store_be64(out + 41, c.not_before);
    store_be64(out + 49, c.not_after);
    std::memcpy(out + 57, c.issuer_id.data(), 8);
}

Bytes read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(Error::IoError, "cannot open " + path.string());
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}
} // namespace

ByteArray<Certificate::kEncodedSize> encode_cert(const Certificate& cert) {
    ByteArray<Certificate::kEncodedSize> out{};
    write_signed_part(cert, out.data());
    std::memcpy(out.data() + Certificate::kSignedSize, cert.issuer_sig.data(), 64);
    return out;
}

Certificate decode_cert(ByteView b) {
    if (b.size() != Certificate::kEncodedSize)
        fail(Error::Malformed, "certificate length");
    if (b[0] != Certificate::kVersion)
        fail(Error::Malformed, "certificate version");
    Certificate c;
    c.version = b[0];
    std::memcpy(c.subject_id.data(), &b[1], 8);
    std::memcpy(c.subject_public.data(), &b[9], 32);
    c.not_before = load_be64(&b[41]);
    c.not_after = load_be64(&b[49]);
    std::memcpy(c.issuer_id.data(), &b[57], 8);
    std::memcpy(c.issuer_sig.data(), &b[65], 64);
    return c;
}

Certificate issue(const CertificateAuthority& ca, const PartyId& subject_id,
                  const ByteArray<32>& subject_public, ValidityWindow window) {
    if (window.not_before >= window.not_after)
        fail(Error::InvalidWindow);
    Certificate c;
    c.subject_id = subject_id;
    c.subject_public = subject_public;
    c.not_before = window.not_before;
    c.not_after = window.not_after;
    c.issuer_id = ca.id;
    uint8_t tbs[Certificate::kSignedSize];
    write_signed_part(c, tbs);
    c.issuer_sig = sign(ca.keys, ByteView(tbs, sizeof tbs));
    return c;
}

std::string_view cert_status_name(CertStatus s) {
    switch (s) {
    case CertStatus::Ok: return "Ok";
    case CertStatus::BadIssuer: return "BadIssuer";
    case CertStatus::BadSignature: return "BadSignature";
    case CertStatus::Expired: return "Expired";
    case CertStatus::NotYetValid: return "NotYetValid";
    }
    return "Unknown";
}

CertStatus check_cert_cheap(const Certificate& cert, const TrustAnchor& anchor, uint64_t now) {
    if (cert.issuer_id != anchor.ca_id)
        return CertStatus::BadIssuer;
    if (now < cert.not_before)
        return CertStatus::NotYetValid;
    if (now > cert.not_after)
        return CertStatus::Expired;
    return CertStatus::Ok;
}

CertStatus check_cert_signature(const Certificate& cert, const TrustAnchor& anchor) {
    uint8_t tbs[Certificate::kSignedSize];
    write_signed_part(cert, tbs);
    if (!verify(anchor.ca_public, ByteView(tbs, sizeof tbs), cert.issuer_sig))
        return CertStatus::BadSignature;
    return CertStatus::Ok;
}

CertStatus check_cert(const Certificate& cert, const TrustAnchor& anchor, uint64_t now) {
    if (auto s = check_cert_cheap(cert, anchor, now); s != CertStatus::Ok)
        return s;
    return check_cert_signature(cert, anchor);
}

TrustAnchor anchor_from_self_signed(const Certificate& ca_cert) {
    TrustAnchor anchor{ca_cert.subject_id, ca_cert.subject_public};
    if (ca_cert.issuer_id != ca_cert.subject_id ||
        check_cert_signature(ca_cert, anchor) != CertStatus::Ok)
        fail(Error::BadCert, "anchor certificate is not validly self-signed");
    return anchor;
}

void save_cert(const std::filesystem::path& path, const Certificate& cert) {
    auto bytes = encode_cert(cert);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out.write(reinterpret_cast<const char*>(bytes.data()), bytes.size()))
        fail(Error::IoError, "cannot write " + path.string());
}

Certificate load_cert(const std::filesystem::path& path) { return decode_cert(read_file(path)); }

void save_seed(const std::filesystem::path& path, const ByteArray<32>& seed) {
    int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0600);
    if (fd < 0)
        fail(Error::IoError, "cannot create " + path.string());
    // O_CREAT does not change the mode of an existing file.
    ::fchmod(fd, 0600);
    ssize_t n = ::write(fd, seed.data(), seed.size());
    ::close(fd);
    if (n != ssize_t(seed.size()))
        fail(Error::IoError, "short write to " + path.string());
}

ByteArray<32> load_seed(const std::filesystem::path& path) {
    Bytes b = read_file(path);
    if (b.size() != 32)
        fail(Error::Malformed, "seed file must hold exactly 32 bytes");
    ByteArray<32> seed;
    std::copy(b.begin(), b.end(), seed.begin());
    secure_wipe(b);
    return seed;
}

} // namespace lseg
