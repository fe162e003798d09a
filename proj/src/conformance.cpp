#include "lseg/conformance.hpp"

#include "lseg/ascon.hpp"
#include "lseg/bytes.hpp"
#include "lseg/curve_maps.hpp"
#include "lseg/error.hpp"
#include "lseg/primitives.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace lseg {

namespace {

using Record = std::map<std::string, std::string>;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string upper(std::string s) {
    for (auto& c : s)
        c = char(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

std::ifstream open_or_fail(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        fail(Error::IoError, "cannot read " + path.string());
    return in;
}

/// "KEY = value" records, each starting at a COUNT line. Keys are upper-cased.
std::vector<Record> read_records(const std::filesystem::path& path) {
    auto in = open_or_fail(path);
    std::vector<Record> out;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#')
            continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            continue;
        std::string key = upper(trim(line.substr(0, eq)));
        std::string value = trim(line.substr(eq + 1));
        if (key == "COUNT")
            out.emplace_back();
        if (out.empty())
            continue;
        out.back()[key] = value;
    }
    return out;
}

const std::string& field(const Record& r, const std::string& key) {
    auto it = r.find(key);
    if (it == r.end())
        fail(Error::Malformed, "vector record missing " + key);
    return it->second;
}

template <size_t N> ByteArray<N> fixed(const std::string& hex) { return array_from_hex<N>(hex); }

template <class Fn> void run_case(ConformanceResult& res, const std::string& id, Fn&& fn) {
    ++res.total;
    try {
        if (fn()) {
            ++res.passed;
            return;
        }
        res.failures.push_back(id + ": mismatch");
    } catch (const std::exception& e) {
        res.failures.push_back(id + ": " + e.what());
    }
}

} // namespace

ConformanceResult check_ed25519_file(const std::filesystem::path& path) {
    ConformanceResult res{"ed25519", 0, 0, {}};
    auto in = open_or_fail(path);
    std::string line;
    size_t n = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty())
            continue;
        ++n;
        run_case(res, "line " + std::to_string(n), [&] {
            std::vector<std::string> parts;
            std::stringstream ss(line);
            for (std::string p; std::getline(ss, p, ':');)
                parts.push_back(p);
            if (parts.size() < 4)
                fail(Error::Malformed, "expected four fields");
            const Bytes skpk = from_hex(parts[0]);
            const auto pk = fixed<32>(parts[1]);
            const Bytes msg = from_hex(parts[2]);
            const Bytes sigmsg = from_hex(parts[3]);
            if (skpk.size() != 64 || sigmsg.size() != 64 + msg.size())
                fail(Error::Malformed, "field lengths");

            ByteArray<32> seed;
            std::copy(skpk.begin(), skpk.begin() + 32, seed.begin());
            Signature expected;
            std::copy(sigmsg.begin(), sigmsg.begin() + 64, expected.begin());

            IdentityKeyPair id = derive_identity(seed);
            return id.ed_public == pk && sign(id, msg) == expected && verify(pk, msg, expected);
        });
    }
    return res;
}

ConformanceResult check_x25519_file(const std::filesystem::path& path) {
    ConformanceResult res{"x25519", 0, 0, {}};
    for (const auto& r : read_records(path))
        run_case(res, "COUNT " + field(r, "COUNT"), [&] {
            SecretBytes<32> k(fixed<32>(field(r, "INPUT_SCALAR")));
            return dh(k, fixed<32>(field(r, "INPUT_U"))) == fixed<32>(field(r, "OUTPUT_U"));
        });
    return res;
}

ConformanceResult check_x25519_iterated_file(const std::filesystem::path& path) {
    ConformanceResult res{"x25519-iterated", 0, 0, {}};
    for (const auto& r : read_records(path))
        run_case(res, "COUNT " + field(r, "COUNT"), [&] {
            const uint64_t iterations = std::stoull(field(r, "ITERATIONS"));
            ByteArray<32> k{}, u{};
            k[0] = u[0] = 9;
            for (uint64_t i = 0; i < iterations; ++i) {
                ByteArray<32> next = dh(SecretBytes<32>(k), u);
                u = k;
                k = next;
            }
            return k == fixed<32>(field(r, "OUTPUT_K"));
        });
    return res;
}

ConformanceResult check_hkdf_file(const std::filesystem::path& path) {
    ConformanceResult res{"hkdf-sha256", 0, 0, {}};
    for (const auto& r : read_records(path))
        run_case(res, "COUNT " + field(r, "COUNT"), [&] {
            const Bytes okm = from_hex(field(r, "OKM"));
            const size_t len = std::stoul(field(r, "L"));
            return len == okm.size() &&
                   hkdf(from_hex(field(r, "IKM")), from_hex(field(r, "SALT")), from_hex(field(r, "INFO")),
                        len) == okm;
        });
    return res;
}

ConformanceResult check_ascon_file(const std::filesystem::path& path) {
    ConformanceResult res{"ascon128a", 0, 0, {}};
    for (const auto& r : read_records(path))
        run_case(res, "Count " + field(r, "COUNT"), [&] {
            const auto key = fixed<16>(field(r, "KEY"));
            const auto nonce = fixed<16>(field(r, "NONCE"));
            const Bytes pt = from_hex(field(r, "PT"));
            const Bytes ad = from_hex(field(r, "AD"));
            const Bytes expected = from_hex(field(r, "CT"));
            if (expected.size() != pt.size() + ascon::kTagSize)
                return false;

            Bytes ct(pt.size());
            ByteArray<16> tag;
            ascon::encrypt_128a(key.data(), nonce.data(), ad, pt, ct.data(), tag.data());
            append(ct, tag);
            if (ct != expected)
                return false;

            Bytes back(pt.size());
            if (!ascon::decrypt_128a(key.data(), nonce.data(), ad,
                                     ByteView(expected).first(pt.size()),
                                     expected.data() + pt.size(), back.data()))
                return false;
            return back == pt;
        });
    return res;
}

std::vector<ConformanceResult> run_conformance(const std::filesystem::path& dir) {
    struct Entry {
        const char* file;
        ConformanceResult (*check)(const std::filesystem::path&);
        const char* suite;
    };
    static const Entry entries[] = {
        {"ed25519_sign.input", check_ed25519_file, "ed25519"},
        {"x25519_rfc7748.txt", check_x25519_file, "x25519"},
        {"x25519_rfc7748_iterated.txt", check_x25519_iterated_file, "x25519-iterated"},
        {"hkdf_sha256_rfc5869.txt", check_hkdf_file, "hkdf-sha256"},
        {"ascon128a_kat.txt", check_ascon_file, "ascon128a"},
    };
    std::vector<ConformanceResult> out;
    for (const auto& e : entries) {
        const auto p = dir / e.file;
        if (!std::filesystem::exists(p)) {
            out.push_back({e.suite, 0, 0, {"missing " + p.string()}});
            continue;
        }
        out.push_back(e.check(p));
    }
    return out;
}

} // namespace lseg
