#include "lseg/conformance.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace lseg;

namespace {

const std::filesystem::path kVectors = LSEG_VECTOR_DIR;

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path temp_copy(const std::string& name, const std::string& text) {
    auto dir = std::filesystem::temp_directory_path() / ("lseg_conf_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    std::ofstream(dir / name) << text;
    return dir / name;
}

/// Flips the first hex digit after `key` in the text.
std::string corrupt_after(std::string text, const std::string& key) {
    auto pos = text.find(key);
    REQUIRE(pos != std::string::npos);
    pos = text.find_first_of("0123456789abcdef", pos + key.size());
    text[pos] = text[pos] == '0' ? '1' : '0';
    return text;
}

} // namespace

TEST_CASE("Ed25519 sign.input") {
    auto r = check_ed25519_file(kVectors / "ed25519_sign.input");
    CHECK(r.total == 1024);
    CHECK(r.ok());
}

TEST_CASE("X25519 RFC 7748 vectors") {
    auto r = check_x25519_file(kVectors / "x25519_rfc7748.txt");
    CHECK(r.total >= 2);
    CHECK(r.ok());
    auto it = check_x25519_iterated_file(kVectors / "x25519_rfc7748_iterated.txt");
    CHECK(it.total == 2);
    CHECK(it.ok());
}

TEST_CASE("HKDF RFC 5869 vectors") {
    auto r = check_hkdf_file(kVectors / "hkdf_sha256_rfc5869.txt");
    CHECK(r.total == 3);
    CHECK(r.ok());
}

TEST_CASE("Ascon-128a KAT") {
    auto r = check_ascon_file(kVectors / "ascon128a_kat.txt");
    INFO(r.failures.size());
    CHECK(r.total > 0);
    CHECK(r.ok());
}

TEST_CASE("corrupted vectors are detected") {
    auto hkdf = temp_copy("hkdf.txt", corrupt_after(slurp(kVectors / "hkdf_sha256_rfc5869.txt"), "OKM"));
    auto r = check_hkdf_file(hkdf);
    CHECK(r.total == 3);
    CHECK(r.passed == 2);
    CHECK_FALSE(r.failures.empty());

    auto x = temp_copy("x.txt", corrupt_after(slurp(kVectors / "x25519_rfc7748.txt"), "OUTPUT_U"));
    CHECK_FALSE(check_x25519_file(x).ok());

    std::string ed = slurp(kVectors / "ed25519_sign.input");
    ed = ed.substr(0, ed.find('\n') + 1);
    auto sig_field = ed.find(':', ed.find(':', ed.find(':') + 1) + 1) + 1;
    ed[sig_field] = ed[sig_field] == '0' ? '1' : '0';
    auto e = check_ed25519_file(temp_copy("ed.input", ed));
    CHECK(e.total == 1);
    CHECK(e.passed == 0);

    auto a = temp_copy("ascon.txt", "Count = 1\nKey = 000102030405060708090A0B0C0D0E0F\n"
                                    "Nonce = 000102030405060708090A0B0C0D0E0F\nPT = \nAD = \n"
                                    "CT = 7A834E6F09210957067B10FD831F0079\n");
    auto ar = check_ascon_file(a);
    CHECK(ar.total == 1);
    CHECK(ar.passed == 0);
    std::filesystem::remove_all(a.parent_path());
}

TEST_CASE("missing files fail") {
    auto rs = run_conformance(std::filesystem::temp_directory_path() / "lseg_no_such_dir");
    CHECK(rs.size() == 5);
    for (const auto& r : rs) {
        CHECK(r.total == 0);
        CHECK_FALSE(r.ok());
    }
    auto all = run_conformance(kVectors);
    for (const auto& r : all)
        CHECK_MESSAGE(r.ok(), r.suite);
}
