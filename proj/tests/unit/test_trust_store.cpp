#include "lseg/random.hpp"
#include "lseg/trust_store.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <filesystem>
#include <sys/stat.h>
#include <thread>
#include <unistd.h>

using namespace lseg;

namespace {

PeerTrust make_trust(uint8_t tag) {
    PeerTrust t;
    t.peer_id.fill(tag);
    t.peer_ed_public.fill(uint8_t(tag + 1));
    t.k_init = AeadKey(ByteArray<16>{tag, 2, 3});
    t.established_at = 1000u + tag;
    return t;
}

bool same(const PeerTrust& a, const PeerTrust& b) {
    return a.peer_id == b.peer_id && a.peer_ed_public == b.peer_ed_public && a.k_init == b.k_init &&
           a.established_at == b.established_at;
}

std::filesystem::path temp_file(const char* name) {
    auto dir = std::filesystem::temp_directory_path() / ("lseg_trust_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    auto p = dir / name;
    std::filesystem::remove(p);
    return p;
}

} // namespace

TEST_CASE("put, find, erase") {
    TrustStore s;
    CHECK_FALSE(s.find(make_trust(1).peer_id));
    s.put(make_trust(1));
    s.put(make_trust(2));
    CHECK(s.size() == 2);
    CHECK(same(*s.find(make_trust(1).peer_id), make_trust(1)));
    PeerTrust replaced = make_trust(1);
    replaced.established_at = 5;
    s.put(replaced);
    CHECK(s.find(replaced.peer_id)->established_at == 5);
    s.erase(replaced.peer_id);
    CHECK_FALSE(s.contains(replaced.peer_id));
    CHECK(s.size() == 1);
}

TEST_CASE("serialization layout") {
    TrustStore s;
    s.put(make_trust(1));
    s.put(make_trust(2));
    Bytes b = s.serialize();
    CHECK(b.size() == 8 + 4 + 2 * TrustStore::kRecordSize);
    CHECK(std::string(b.begin(), b.begin() + 8) == "LSEGTRS1");
    CHECK(b[11] == 2);

    TrustStore t;
    t.load_bytes(b);
    CHECK(t.size() == 2);
    CHECK(same(*t.find(make_trust(2).peer_id), make_trust(2)));
}

TEST_CASE("malformed stores are rejected") {
    TrustStore s;
    s.put(make_trust(1));
    Bytes good = s.serialize();

    Bytes bad_magic = good;
    bad_magic[0] = 'X';
    Bytes truncated(good.begin(), good.end() - 1);
    Bytes extra = good;
    extra.push_back(0);
    Bytes bad_count = good;
    bad_count[11] = 3;
    for (const Bytes& b : {bad_magic, truncated, extra, bad_count, Bytes{}}) {
        TrustStore t;
        CHECK(error_of([&] { t.load_bytes(b); }) == Error::Malformed);
    }
}

TEST_CASE("persisted store survives reopening") {
    auto path = temp_file("store.bin");
    {
        TrustStore s(path);
        CHECK(s.size() == 0);
        s.put(make_trust(3));
        s.put(make_trust(4));
    }
    struct stat st {};
    REQUIRE(::stat(path.c_str(), &st) == 0);
    CHECK((st.st_mode & 0777) == 0600);
    {
        TrustStore s(path);
        CHECK(s.size() == 2);
        CHECK(same(*s.find(make_trust(3).peer_id), make_trust(3)));
        s.erase(make_trust(3).peer_id);
    }
    TrustStore s(path);
    CHECK(s.size() == 1);
    std::filesystem::remove_all(path.parent_path());
}

TEST_CASE("get_or_insert runs the factory once") {
    TrustStore s;
    int made = 0;
    std::vector<std::thread> threads;
    for (int i = 0; i < 8; ++i)
        threads.emplace_back([&] {
            s.get_or_insert(make_trust(9).peer_id, [&] {
                ++made;
                return make_trust(9);
            });
        });
    for (auto& t : threads)
        t.join();
    CHECK(made == 1);
    CHECK(s.size() == 1);
}

TEST_CASE("replay cache") {
    ReplayCache c(5000, 4);
    PartyId a{1}, b{2};
    CHECK_FALSE(c.seen(a, 100, 100));
    c.insert(a, 100, 100);
    CHECK(c.seen(a, 100, 200));
    CHECK_FALSE(c.seen(b, 100, 200));
    CHECK_FALSE(c.seen(a, 101, 200));

    // entries older than twice the skew are evicted
    CHECK_FALSE(c.seen(a, 100, 100 + 10001));
    CHECK(c.size() == 0);

    for (uint64_t ts = 0; ts < 6; ++ts)
        c.insert(a, 20000 + ts, 20000);
    CHECK(c.size() == 4);
    CHECK_FALSE(c.seen(a, 20000, 20000));
    CHECK(c.seen(a, 20005, 20000));

    c.set_enabled(false);
    CHECK_FALSE(c.seen(a, 20005, 20000));
}
