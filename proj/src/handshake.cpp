#include "lseg/handshake.hpp"

#include "lseg/channel.hpp"
#include "lseg/error.hpp"

#include <chrono>
#include <cstring>

namespace lseg {

uint64_t system_clock_ms() {
    using namespace std::chrono;
    return uint64_t(duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count());
}

void HandshakeConfig::validate() const {
    if (clock_skew_ms == 0)
        throw std::invalid_argument("clock skew must be positive");
    if (certificate.subject_public != identity.ed_public)
        throw std::invalid_argument("certificate does not match identity key");
    if (!clock)
        throw std::invalid_argument("clock not set");
}

namespace {

ByteView label(std::string_view s) { return {reinterpret_cast<const uint8_t*>(s.data()), s.size()}; }

AeadNonce derive_nonce(const AeadKey& key, ByteView info) {
    const Bytes n = hkdf(key.view(), {}, info, 16);
    AeadNonce out{};
    std::copy_n(n.begin(), std::min(n.size(), out.size()), out.begin());
    return out;
}

AeadKey derive_key16(ByteView ikm, ByteView salt, std::string_view info) {
    Bytes k = hkdf(ikm, salt, label(info), 16);
    AeadKey out(k);
    secure_wipe(k);
    return out;
}

template <class M> M make_auth(const HandshakeConfig& config, uint64_t now) {
    M m;
    m.cert = config.certificate;
    m.timestamp = now;
    m.sig = sign(config.identity, auth_signed_bytes(m.cert, m.timestamp));
    return m;
}

} // namespace

Msg1 make_m1(const HandshakeConfig& config, uint64_t now) { return make_auth<Msg1>(config, now); }
Msg2 make_m2(const HandshakeConfig& config, uint64_t now) { return make_auth<Msg2>(config, now); }

PeerFacts check_auth_msg(const AuthMessage& msg, const TrustAnchor& anchor, uint64_t now,
                         uint64_t skew_ms, ReplayCache& replay_cache) {
    if (auto s = check_cert_cheap(msg.cert, anchor, now); s != CertStatus::Ok)
        fail(Error::BadCert, std::string(cert_status_name(s)));
    if (msg.timestamp < now && now - msg.timestamp > skew_ms)
        fail(Error::StaleTimestamp);
    if (msg.timestamp > now && msg.timestamp - now > skew_ms)
        fail(Error::FutureTimestamp);
    if (auto s = check_cert_signature(msg.cert, anchor); s != CertStatus::Ok)
        fail(Error::BadCert, std::string(cert_status_name(s)));
    if (!verify(msg.cert.subject_public, auth_signed_bytes(msg.cert, msg.timestamp), msg.sig))
        fail(Error::BadSignature);
    if (replay_cache.seen(msg.cert.subject_id, msg.timestamp, now))
        fail(Error::Replayed);
    replay_cache.insert(msg.cert.subject_id, msg.timestamp, now);
    return {msg.cert.subject_id, msg.cert.subject_public, msg.timestamp};
}

AeadKey derive_initial_key(const IdentityKeyPair& my, const ByteArray<32>& peer_ed_public,
                           const ByteArray<32>& client_x_public,
                           const ByteArray<32>& server_x_public) {
    const ByteArray<32> peer_x = ed_public_to_x25519(peer_ed_public);

    // k = k_x || k_y
    SecretBytes<64> k;
    SharedSecret k_x = dh(my.x_scalar, peer_x);
    ByteArray<32> k_y = mont_to_edwards(MontgomeryU::decode(k_x)).encode();
    std::copy(k_x.begin(), k_x.end(), k.data());
    std::copy(k_y.begin(), k_y.end(), k.data() + 32);
    secure_wipe(k_x);
    secure_wipe(k_y);

    Bytes salt_input(client_x_public.begin(), client_x_public.end());
    append(salt_input, server_x_public);
    Digest salt = hash256(salt_input);

    return derive_key16(k.view(), salt, kInfoInit);
}

ByteArray<16> associated_data(const PartyId& client_id, const PartyId& server_id) {
    ByteArray<16> ad;
    std::copy(client_id.begin(), client_id.end(), ad.begin());
    std::copy(server_id.begin(), server_id.end(), ad.begin() + 8);
    return ad;
}

AeadNonce c1_nonce(const AeadKey& k_eph) { return derive_nonce(k_eph, label(kInfoC1Nonce)); }
AeadNonce c2_nonce(const AeadKey& k_eph) { return derive_nonce(k_eph, label(kInfoC2Nonce)); }

// ---------------------------------------------------------------------------
// Phase 2

const SecretBytes<32>& EphemeralState::my_eph_secret() const {
    if (erased_)
        fail(Error::StateError, "ephemeral secret already erased");
    return secret_;
}

void EphemeralState::erase() {
    secret_.wipe();
    raw_shared_.wipe();
    erased_ = true;
}

Bytes EphemeralState::storage_snapshot() const {
    Bytes out(secret_.bytes().begin(), secret_.bytes().end());
    append(out, raw_shared_.view());
    return out;
}

namespace {
struct Ids {
    PartyId client;
    PartyId server;
};

Ids ids_for(const PeerTrust& trust, const HandshakeConfig& config) {
    return config.role == Role::Client ? Ids{config.id(), trust.peer_id}
                                       : Ids{trust.peer_id, config.id()};
}
} // namespace

std::pair<EphemeralState, MsgEph> start_phase2(const PeerTrust& trust, const HandshakeConfig& config,
                                               RandomSource& rng) {
    EphemeralState st;
    rng.fill(st.secret_.mutable_bytes());
    clamp_scalar(st.secret_.mutable_bytes());
    st.my_public_ = x25519_public(st.secret_);

    const Ids ids = ids_for(trust, config);
    const Direction dir = sending_direction(config.role);
    MsgEph msg;
    msg.direction = dir;
    rng.fill(msg.nonce);
    Bytes sealed = aead_seal(trust.k_init, msg.nonce,
                             associated_data(ids.client, ids.server), st.my_public_);
    std::copy(sealed.begin(), sealed.end(), msg.sealed.begin());
    return {std::move(st), msg};
}

ByteArray<32> open_eph(const MsgEph& msg, const PeerTrust& trust, const HandshakeConfig& config) {
    const Direction expected = config.role == Role::Client ? Direction::ServerToClient
                                                           : Direction::ClientToServer;
    if (msg.direction != expected)
        fail(Error::WrongDirection);
    const Ids ids = ids_for(trust, config);
    Bytes pub = aead_open(trust.k_init, msg.nonce,
                          associated_data(ids.client, ids.server), msg.sealed);
    ByteArray<32> out;
    std::copy(pub.begin(), pub.end(), out.begin());
    return out;
}

AeadKey accept_eph(EphemeralState& state, const MsgEph& msg, const PeerTrust& trust,
                   const HandshakeConfig& config) {
    if (state.erased_)
        fail(Error::StateError, "ephemeral secret already used");
    try {
        state.peer_public_ = open_eph(msg, trust, config);
        SharedSecret raw = dh(state.secret_, *state.peer_public_);
        std::copy(raw.begin(), raw.end(), state.raw_shared_.data());
        secure_wipe(raw);
        AeadKey k_eph = derive_key16(state.raw_shared_.view(), {}, kInfoEph);
        state.erase();
        return k_eph;
    } catch (...) {
        state.erase();
        throw;
    }
}

std::pair<MsgC1, SecretBytes<16>> client_key_exchange(const AeadKey& k_eph, const PartyId& client_id,
                                                      const PartyId& server_id, RandomSource& rng) {
    SecretBytes<16> n_r;
    rng.fill(n_r.mutable_bytes());
    MsgC1 msg;
    Bytes sealed = aead_seal(k_eph, c1_nonce(k_eph), associated_data(client_id, server_id), n_r.view());
    std::copy(sealed.begin(), sealed.end(), msg.sealed.begin());
    return {msg, n_r};
}

namespace {
Digest confirm_hash(const SecretBytes<16>& k_sym, const SecretBytes<16>& nonce) {
    SecretBytes<16> x;
    for (size_t i = 0; i < 16; ++i)
        x.data()[i] = k_sym.data()[i] ^ nonce.data()[i];
    return hash256(x.view());
}
} // namespace

std::pair<MsgC2, SessionKeys> server_key_exchange(const AeadKey& k_eph, const PartyId& client_id,
                                                  const PartyId& server_id, const MsgC1& msg,
                                                  RandomSource& rng, const HandshakeTestHooks& hooks) {
    const auto ad = associated_data(client_id, server_id);
    Bytes d3 = aead_open(k_eph, c1_nonce(k_eph), ad, msg.sealed);

    SessionKeys keys;
    keys.k_eph = k_eph;
    keys.n_r = SecretBytes<16>(d3);
    secure_wipe(d3);
    rng.fill(keys.k_sym.mutable_bytes());
    keys.my_id = server_id;
    keys.peer_id = client_id;
    keys.role = Role::Server;

    MsgC2 out;
    out.confirm = confirm_hash(keys.k_sym, keys.n_r);
    SecretBytes<16> sent = keys.k_sym;
    if (hooks.flip_ksym_after_confirm)
        sent.data()[0] ^= 0x01;
    Bytes sealed = aead_seal(k_eph, c2_nonce(k_eph), ad, sent.view());
    std::copy(sealed.begin(), sealed.end(), out.sealed.begin());
    return {out, keys};
}

SessionKeys client_finish(const AeadKey& k_eph, const SecretBytes<16>& n_r,
                          const PartyId& client_id, const PartyId& server_id, const MsgC2& msg) {
    Bytes k = aead_open(k_eph, c2_nonce(k_eph), associated_data(client_id, server_id), msg.sealed);
    SessionKeys keys;
    keys.k_sym = SecretBytes<16>(k);
    secure_wipe(k);
    if (!equal_ct(confirm_hash(keys.k_sym, n_r), msg.confirm))
        fail(Error::ConfirmMismatch);
    keys.k_eph = k_eph;
    keys.n_r = n_r;
    keys.my_id = client_id;
    keys.peer_id = server_id;
    keys.role = Role::Client;
    return keys;
}

// ---------------------------------------------------------------------------
// State machine

std::string_view stage_name(Handshake::Stage s) {
    switch (s) {
    case Handshake::Stage::Idle: return "Idle";
    case Handshake::Stage::AwaitHello: return "AwaitHello";
    case Handshake::Stage::AwaitHelloAck: return "AwaitHelloAck";
    case Handshake::Stage::AwaitAuthOrEph: return "AwaitAuthOrEph";
    case Handshake::Stage::AwaitM2: return "AwaitM2";
    case Handshake::Stage::AwaitEph: return "AwaitEph";
    case Handshake::Stage::AwaitC1: return "AwaitC1";
    case Handshake::Stage::AwaitC2: return "AwaitC2";
    case Handshake::Stage::Complete: return "Complete";
    case Handshake::Stage::Failed: return "Failed";
    }
    return "Unknown";
}

Handshake::Handshake(HandshakeConfig config, TrustStore& trust, ReplayCache& replay, RandomSource& rng)
    : config_(std::move(config)), trust_(trust), replay_(replay), rng_(rng) {
    config_.validate();
}

Handshake::~Handshake() { wipe(); }

void Handshake::wipe() {
    if (eph_)
        eph_->erase();
    k_eph_.wipe();
    n_r_.wipe();
}

void Handshake::abort() {
    wipe();
    pending_trust_.reset();
    stage_ = Stage::Failed;
}

PartyId Handshake::client_id() const { return config_.role == Role::Client ? config_.id() : *peer_id_; }
PartyId Handshake::server_id() const { return config_.role == Role::Server ? config_.id() : *peer_id_; }

const SessionKeys& Handshake::session_keys() const {
    if (stage_ != Stage::Complete || !keys_)
        fail(Error::StateError, "handshake not complete");
    return *keys_;
}

const SecretBytes<32>& Handshake::ephemeral_secret() const {
    if (!eph_)
        fail(Error::StateError, "no ephemeral key pair");
    return eph_->my_eph_secret();
}

Bytes Handshake::ephemeral_storage_snapshot() const {
    Bytes out = eph_ ? eph_->storage_snapshot() : Bytes(64, 0);
    append(out, k_eph_.view());
    return out;
}

std::vector<Message> Handshake::send(std::vector<Message> out) {
    for (const auto& m : out)
        transcript_.record(m, sending_direction(config_.role));
    return out;
}

std::vector<Message> Handshake::start() {
    if (stage_ != Stage::Idle)
        fail(Error::StateError, "handshake already started");
    if (config_.role == Role::Server) {
        stage_ = Stage::AwaitHello;
        return {};
    }
    stage_ = Stage::AwaitHelloAck;
    return send({Hello{config_.id()}});
}

std::vector<Message> Handshake::receive(const Message& msg) {
    const Direction incoming = config_.role == Role::Client ? Direction::ServerToClient
                                                            : Direction::ClientToServer;
    transcript_.record(msg, incoming);
    try {
        return send(dispatch(msg));
    } catch (...) {
        abort();
        throw;
    }
}

std::vector<Message> Handshake::dispatch(const Message& msg) {
    const uint64_t now = config_.clock();

    switch (stage_) {
    case Stage::AwaitHello: {
        const auto* hello = std::get_if<Hello>(&msg);
        if (!hello)
            break;
        peer_id_ = hello->client_id;
        trust_entry_ = trust_.find(hello->client_id);
        stage_ = Stage::AwaitAuthOrEph;
        return {HelloAck{config_.id(), trust_entry_.has_value()}};
    }

    case Stage::AwaitHelloAck: {
        const auto* ack = std::get_if<HelloAck>(&msg);
        if (!ack)
            break;
        peer_id_ = ack->server_id;
        trust_entry_ = trust_.find(ack->server_id);
        if (ack->has_trust && trust_entry_) {
            auto [st, e1] = start_phase2(*trust_entry_, config_, rng_);
            eph_ = std::move(st);
            stage_ = Stage::AwaitEph;
            return {e1};
        }
        ran_phase1_ = true;
        stage_ = Stage::AwaitM2;
        return {make_m1(config_, now)};
    }

    case Stage::AwaitAuthOrEph: {
        if (const auto* m1 = std::get_if<Msg1>(&msg)) {
            PeerFacts facts = check_auth_msg(*m1, config_.anchor, now, config_.clock_skew_ms, replay_);
            if (facts.peer_id != *peer_id_)
                fail(Error::BadCert, "certificate subject differs from announced client id");
            const auto& me = config_.identity;
            PeerTrust t;
            t.peer_id = facts.peer_id;
            t.peer_ed_public = facts.peer_ed_public;
            t.k_init = derive_initial_key(me, facts.peer_ed_public,
                                          ed_public_to_x25519(facts.peer_ed_public), me.x_public);
            t.established_at = now;
            pending_trust_ = t;
            ran_phase1_ = true;
            stage_ = Stage::AwaitEph;
            return {make_m2(config_, now)};
        }
        if (std::holds_alternative<MsgEph>(msg)) {
            if (!trust_entry_)
                fail(Error::UnknownPeer);
            stage_ = Stage::AwaitEph;
            return dispatch(msg);
        }
        break;
    }

    case Stage::AwaitM2: {
        const auto* m2 = std::get_if<Msg2>(&msg);
        if (!m2)
            break;
        PeerFacts facts = check_auth_msg(*m2, config_.anchor, now, config_.clock_skew_ms, replay_);
        if (facts.peer_id != *peer_id_)
            fail(Error::BadCert, "certificate subject differs from announced server id");
        const auto& me = config_.identity;
        PeerTrust t;
        t.peer_id = facts.peer_id;
        t.peer_ed_public = facts.peer_ed_public;
        t.k_init = derive_initial_key(me, facts.peer_ed_public, me.x_public,
                                      ed_public_to_x25519(facts.peer_ed_public));
        t.established_at = now;
        trust_.put(t);
        trust_entry_ = t;

        auto [st, e1] = start_phase2(t, config_, rng_);
        eph_ = std::move(st);
        stage_ = Stage::AwaitEph;
        return {e1};
    }

    case Stage::AwaitEph: {
        const auto* e = std::get_if<MsgEph>(&msg);
        if (!e)
            break;
        if (config_.role == Role::Server) {
            const PeerTrust& t = pending_trust_ ? *pending_trust_ : *trust_entry_;
            // Authenticate E_1 before any public-key work.
            open_eph(*e, t, config_);
            auto [st, e2] = start_phase2(t, config_, rng_);
            eph_ = std::move(st);
            k_eph_ = accept_eph(*eph_, *e, t, config_);
            if (pending_trust_) {
                trust_.put(*pending_trust_);
                trust_entry_ = pending_trust_;
                pending_trust_.reset();
            }
            stage_ = Stage::AwaitC1;
            return {e2};
        }
        k_eph_ = accept_eph(*eph_, *e, *trust_entry_, config_);
        auto [c1, n_r] = client_key_exchange(k_eph_, client_id(), server_id(), rng_);
        n_r_ = n_r;
        stage_ = Stage::AwaitC2;
        return {c1};
    }

    case Stage::AwaitC1: {
        const auto* c1 = std::get_if<MsgC1>(&msg);
        if (!c1)
            break;
        auto [c2, keys] = server_key_exchange(k_eph_, client_id(), server_id(), *c1, rng_, config_.hooks);
        keys_ = keys;
        k_eph_.wipe();
        stage_ = Stage::Complete;
        return {c2};
    }

    case Stage::AwaitC2: {
        const auto* c2 = std::get_if<MsgC2>(&msg);
        if (!c2)
            break;
        keys_ = client_finish(k_eph_, n_r_, client_id(), server_id(), *c2);
        k_eph_.wipe();
        n_r_.wipe();
        stage_ = Stage::Complete;
        return {};
    }

    case Stage::Idle:
    case Stage::Complete:
    case Stage::Failed:
        break;
    }
    fail(Error::UnexpectedMessage,
         std::string(kind_name(kind_of(msg))) + " in stage " + std::string(stage_name(stage_)));
}

HandshakeResult run_handshake(const HandshakeConfig& config, Channel& channel, TrustStore& trust,
                              ReplayCache& replay, RandomSource& rng) {
    Handshake hs(config, trust, replay, rng);
    for (const auto& m : hs.start())
        channel.send(encode(m));
    while (!hs.complete()) {
        auto frame = channel.receive();
        if (!frame) {
            hs.abort();
            fail(Error::ChannelClosed);
        }
        Message msg;
        try {
            msg = decode(*frame);
        } catch (...) {
            hs.abort();
            throw;
        }
        for (const auto& m : hs.receive(msg))
            channel.send(encode(m));
    }
    return {hs.session_keys(), hs.transcript(), hs.ran_phase1()};
}

} // namespace lseg
