#include "lseg/channel.hpp"
#include "lseg/handshake.hpp"

#include "memory_pair.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <set>
#include <thread>

using namespace lseg;
using testing_pair::pump;
using testing_pair::World;

namespace {

bool all_zero(const Bytes& b) {
    return std::all_of(b.begin(), b.end(), [](uint8_t x) { return x == 0; });
}

ByteView text(std::string_view s) { return {reinterpret_cast<const uint8_t*>(s.data()), s.size()}; }

} // namespace

TEST_CASE("full handshake then a phase-2-only session") {
    World w(1);
    Bytes first_ksym;
    {
        Handshake c = w.client(), s = w.server();
        auto r = pump(c, s);
        REQUIRE_FALSE(r.client_error);
        REQUIRE_FALSE(r.server_error);
        REQUIRE(c.complete());
        REQUIRE(s.complete());
        CHECK(c.ran_phase1());
        CHECK(s.ran_phase1());
        CHECK(c.session_keys().k_sym == s.session_keys().k_sym);
        CHECK(c.session_keys().k_eph == s.session_keys().k_eph);
        CHECK(c.session_keys().n_r == s.session_keys().n_r);
        CHECK(*c.peer_id() == w.w.server.id());
        CHECK(*s.peer_id() == w.w.client.id());
        CHECK(c.session_keys().client_id() == s.session_keys().client_id());
        CHECK(c.session_keys().server_id() == s.session_keys().server_id());
        CHECK(payload_bits(c.transcript(), 2) == 1024);
        CHECK(payload_bits(c.transcript(), 1) == 2 * 1608);
        CHECK(key_exchange_messages(c.transcript()) == 2);
        first_ksym.assign(c.session_keys().k_sym.view().begin(), c.session_keys().k_sym.view().end());

        // both stores now hold the same k_init
        auto ct = w.client_trust.find(w.w.server.id());
        auto st = w.server_trust.find(w.w.client.id());
        REQUIRE(ct);
        REQUIRE(st);
        CHECK(ct->k_init == st->k_init);
    }
    Handshake c = w.client(), s = w.server();
    auto r = pump(c, s);
    REQUIRE(c.complete());
    REQUIRE(s.complete());
    CHECK_FALSE(c.ran_phase1());
    CHECK_FALSE(s.ran_phase1());
    CHECK_FALSE(c.transcript().contains_phase(1));
    CHECK(c.session_keys().k_sym == s.session_keys().k_sym);
    CHECK(Bytes(c.session_keys().k_sym.view().begin(), c.session_keys().k_sym.view().end()) != first_ksym);
}

TEST_CASE("k_init matches an independent derivation") {
    World w(2);
    const auto& ci = w.w.client.identity;
    const auto& si = w.w.server.identity;
    AeadKey kc = derive_initial_key(ci, si.ed_public, ci.x_public, si.x_public);
    AeadKey ks = derive_initial_key(si, ci.ed_public, ci.x_public, si.x_public);
    CHECK(kc == ks);

    auto k_x = oracle::x25519(ci.x_scalar.bytes(), oracle::x25519_public(si.x_scalar.bytes()));
    REQUIRE(k_x);
    auto y = oracle::mont_to_edwards(oracle::from_le(*k_x));
    REQUIRE(y);
    Bytes ikm(k_x->begin(), k_x->end());
    append(ikm, oracle::to_le(*y));
    Bytes salt_in(ci.x_public.begin(), ci.x_public.end());
    append(salt_in, si.x_public);
    auto salt = oracle::sha256(salt_in);
    Bytes expected = oracle::hkdf_sha256(ikm, salt, text(kInfoInit), 16);
    CHECK(Bytes(kc.view().begin(), kc.view().end()) == expected);
}

TEST_CASE("phase 2 nonces and keys follow the labels") {
    AeadKey k(ByteArray<16>{1, 2, 3});
    auto c1 = c1_nonce(k);
    CHECK(Bytes(c1.begin(), c1.end()) == oracle::hkdf_sha256(k.view(), {}, text(kInfoC1Nonce), 16));
    auto c2 = c2_nonce(k);
    CHECK(Bytes(c2.begin(), c2.end()) == oracle::hkdf_sha256(k.view(), {}, text(kInfoC2Nonce), 16));
    auto ad = associated_data(PartyId{1}, PartyId{2});
    CHECK(ad[0] == 1);
    CHECK(ad[8] == 2);
}

TEST_CASE("check_auth_msg rejects cheaply before public-key work") {
    World w(3);
    const uint64_t now = w.w.epoch_ms;
    const TrustAnchor anchor = w.w.ca.anchor();
    ReplayCache cache;
    auto calls = [](auto&& fn) {
        const auto before = primitive_counters();
        auto err = error_of(fn);
        return std::pair{err, (primitive_counters() - before).total()};
    };

    Msg1 good = make_m1(w.w.client, now);

    Msg1 stale = make_m1(w.w.client, now - 5001);
    CHECK(calls([&] { check_auth_msg(stale, anchor, now, 5000, cache); }) == std::pair{std::optional(Error::StaleTimestamp), uint64_t(0)});
    Msg1 future = make_m1(w.w.client, now + 5001);
    CHECK(calls([&] { check_auth_msg(future, anchor, now, 5000, cache); }) == std::pair{std::optional(Error::FutureTimestamp), uint64_t(0)});

    // a foreign issuer is caught before the timestamp
    Msg1 rogue = stale;
    rogue.cert = w.w.rogue_cert;
    rogue.cert.issuer_id[0] ^= 1;
    CHECK(calls([&] { check_auth_msg(rogue, anchor, now, 5000, cache); }) == std::pair{std::optional(Error::BadCert), uint64_t(0)});

    // same CA id, wrong key: one verify
    Msg1 forged = good;
    forged.cert = w.w.rogue_cert;
    CHECK(calls([&] { check_auth_msg(forged, anchor, now, 5000, cache); }) == std::pair{std::optional(Error::BadCert), uint64_t(1)});

    Msg1 resigned = good;
    resigned.timestamp += 1;
    CHECK(calls([&] { check_auth_msg(resigned, anchor, now, 5000, cache); }) == std::pair{std::optional(Error::BadSignature), uint64_t(2)});

    CHECK(calls([&] { check_auth_msg(good, anchor, now, 5000, cache); }) == std::pair{std::optional<Error>(), uint64_t(2)});
    CHECK(calls([&] { check_auth_msg(good, anchor, now, 5000, cache); }) == std::pair{std::optional(Error::Replayed), uint64_t(2)});

    // skew boundary is inclusive
    ReplayCache fresh;
    CHECK_FALSE(error_of([&] { check_auth_msg(make_m1(w.w.client, now - 5000), anchor, now, 5000, fresh); }));
    CHECK_FALSE(error_of([&] { check_auth_msg(make_m1(w.w.client, now + 5000), anchor, now, 5000, fresh); }));

    PeerFacts f = check_auth_msg(make_m2(w.w.server, now), anchor, now, 5000, fresh);
    CHECK(f.peer_id == w.w.server.id());
    CHECK(f.peer_ed_public == w.w.server.identity.ed_public);
}

TEST_CASE("ephemeral challenges are bound to direction and identities") {
    World w(4);
    PeerTrust trust;
    trust.peer_id = w.w.server.id();
    trust.k_init = AeadKey(ByteArray<16>{7});
    auto [state, e1] = start_phase2(trust, w.w.client, w.client_rng);
    CHECK(e1.direction == Direction::ClientToServer);
    // k_init spans sessions: every challenge needs its own nonce
    CHECK(start_phase2(trust, w.w.client, w.client_rng).second.nonce != e1.nonce);

    PeerTrust server_view = trust;
    server_view.peer_id = w.w.client.id();
    CHECK(open_eph(e1, server_view, w.w.server) == state.my_eph_public());
    CHECK(state.my_eph_public() == x25519_public(state.my_eph_secret()));

    // the client cannot be fed its own challenge back
    CHECK(error_of([&] { open_eph(e1, trust, w.w.client); }) == Error::WrongDirection);

    PeerTrust other = server_view;
    other.peer_id[0] ^= 1;
    CHECK(error_of([&] { open_eph(e1, other, w.w.server); }) == Error::AuthFailure);
    PeerTrust other_key = server_view;
    other_key.k_init = AeadKey(ByteArray<16>{8});
    CHECK(error_of([&] { open_eph(e1, other_key, w.w.server); }) == Error::AuthFailure);

    // opening costs no public-key operation
    const auto before = primitive_counters();
    open_eph(e1, server_view, w.w.server);
    CHECK((primitive_counters() - before).total() == 0);
}

TEST_CASE("ephemeral secrets are erased once k_eph exists") {
    World w(5);
    PeerTrust ct, st;
    ct.peer_id = w.w.server.id();
    st.peer_id = w.w.client.id();
    ct.k_init = st.k_init = AeadKey(ByteArray<16>{3});

    auto [cs, e1] = start_phase2(ct, w.w.client, w.client_rng);
    auto [ss, e2] = start_phase2(st, w.w.server, w.server_rng);
    CHECK_FALSE(all_zero(cs.storage_snapshot()));
    AeadKey kc = accept_eph(cs, e2, ct, w.w.client);
    AeadKey ks = accept_eph(ss, e1, st, w.w.server);
    CHECK(kc == ks);
    CHECK(cs.erased());
    CHECK(all_zero(cs.storage_snapshot()));
    CHECK(error_of([&] { cs.my_eph_secret(); }) == Error::StateError);

    // failure also erases
    auto [fs, e3] = start_phase2(ct, w.w.client, w.client_rng);
    MsgEph bad = e2;
    bad.sealed[0] ^= 1;
    CHECK(error_of([&] { accept_eph(fs, bad, ct, w.w.client); }) == Error::AuthFailure);
    CHECK(fs.erased());
    CHECK(all_zero(fs.storage_snapshot()));
}

TEST_CASE("handshake state is wiped on completion and on failure") {
    World w(6);
    Handshake c = w.client(), s = w.server();
    bool saw_live_secret = false;
    auto r = pump(c, s, [&](Direction dir, Bytes& f) {
        // E_2 is in flight: the client still holds its ephemeral scalar
        if (dir == Direction::ServerToClient && frame_kind(f) == MessageKind::Eph) {
            saw_live_secret = !error_of([&] { c.ephemeral_secret(); }) && !all_zero(c.ephemeral_storage_snapshot());
        }
    });
    REQUIRE(c.complete());
    CHECK(saw_live_secret);
    CHECK(all_zero(c.ephemeral_storage_snapshot()));
    CHECK(all_zero(s.ephemeral_storage_snapshot()));
    CHECK(error_of([&] { c.ephemeral_secret(); }) == Error::StateError);
    CHECK(error_of([&] { s.ephemeral_secret(); }) == Error::StateError);

    World f(7);
    f.w.server.hooks.flip_ksym_after_confirm = true;
    Handshake fc = f.client(), fs = f.server();
    auto fr = pump(fc, fs);
    CHECK(fr.client_error == Error::ConfirmMismatch);
    CHECK_FALSE(fr.server_error);
    CHECK(fc.stage() == Handshake::Stage::Failed);
    CHECK(all_zero(fc.ephemeral_storage_snapshot()));
    CHECK(error_of([&] { fc.session_keys(); }) == Error::StateError);
}

TEST_CASE("out-of-sequence messages are rejected") {
    World w(8);
    Handshake s = w.server();
    s.start();
    CHECK(error_of([&] { s.receive(MsgC1{}); }) == Error::UnexpectedMessage);
    CHECK(s.stage() == Handshake::Stage::Failed);

    Handshake c = w.client();
    c.start();
    CHECK(error_of([&] { c.receive(make_m1(w.w.client, w.w.epoch_ms)); }) == Error::UnexpectedMessage);

    // E_1 without a phase-1 record
    Handshake s2 = w.server();
    s2.start();
    s2.receive(Hello{w.w.client.id()});
    CHECK(error_of([&] { s2.receive(MsgEph{}); }) == Error::UnknownPeer);
}

TEST_CASE("the announced identity must match the certificate") {
    World w(9);
    Handshake c = w.client(), s = w.server();
    auto r = pump(c, s, [&](Direction, Bytes& f) {
        if (frame_kind(f) == MessageKind::Hello)
            f = encode(Hello{w.w.insider_cert.subject_id});
    });
    CHECK(r.server_error == Error::BadCert);
    CHECK(w.server_trust.size() == 0);
}

TEST_CASE("trust is committed only after E_1 opens") {
    World w(10);
    Handshake c = w.client(), s = w.server();
    auto r = pump(c, s, [&](Direction dir, Bytes& f) {
        if (dir == Direction::ClientToServer && frame_kind(f) == MessageKind::Eph)
            f[10] ^= 1;
    });
    CHECK(r.server_error == Error::AuthFailure);
    CHECK_FALSE(w.server_trust.contains(w.w.client.id()));
}

TEST_CASE("no AEAD key and nonce pair repeats") {
    World w(11);
    std::set<Bytes> seen;
    size_t seals = 0;
    bool repeated = false;
    set_seal_observer([&](const AeadKey& k, const AeadNonce& n) {
        Bytes kn(k.view().begin(), k.view().end());
        append(kn, n);
        repeated |= !seen.insert(kn).second;
        ++seals;
    });
    for (int i = 0; i < 50; ++i) {
        Handshake c = w.client(), s = w.server();
        pump(c, s);
        REQUIRE(c.complete());
    }
    set_seal_observer(nullptr);
    CHECK(seals == 50 * 4);
    CHECK_FALSE(repeated);
}

TEST_CASE("run_handshake over a memory channel") {
    World w(12);
    for (int round = 0; round < 2; ++round) {
        auto [a, b] = MemoryChannel::pair();
        a->set_timeout(std::chrono::seconds(10));
        b->set_timeout(std::chrono::seconds(10));
        std::optional<HandshakeResult> server_result;
        std::thread server([&] {
            server_result = run_handshake(w.w.server, *b, w.server_trust, w.server_replay, w.server_rng);
        });
        HandshakeResult cr = run_handshake(w.w.client, *a, w.client_trust, w.client_replay, w.client_rng);
        server.join();
        REQUIRE(server_result);
        CHECK(cr.keys.k_sym == server_result->keys.k_sym);
        CHECK(cr.ran_phase1 == (round == 0));
    }

    auto [a, b] = MemoryChannel::pair();
    b->close();
    CHECK(error_of([&] { run_handshake(w.w.client, *a, w.client_trust, w.client_replay, w.client_rng); }) ==
          Error::ChannelClosed);
}

TEST_CASE("config validation") {
    World w(13);
    HandshakeConfig c = w.w.client;
    CHECK_NOTHROW(c.validate());
    c.clock_skew_ms = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = w.w.client;
    c.certificate = w.w.insider_cert;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    CHECK(stage_name(Handshake::Stage::AwaitC2) == "AwaitC2");
}
