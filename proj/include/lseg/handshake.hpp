#pragma once

// The two-phase key exchange.
//
// Phase 1 (once per peer pair): signed certificate + timestamp in each
// direction, then a static X25519 agreement between the unified identity
// keys, reprojected to Edwards y and fed through HKDF to give k_init.
//
// Phase 2 (every session): ephemeral X25519 publics exchanged under k_init,
// k_eph from the ephemeral agreement, then the client's encrypted nonce n_r
// and the server's encrypted k_sym with h = SHA-256(k_sym XOR n_r).
//
// Message sequence as driven by Handshake:
//
//   client                         server
//   Hello(ID_c)            ->
//                          <-      HelloAck(ID_s, has_trust)
//   m1   (phase 1 only)    ->
//                          <-      m2
//   E_1                    ->
//                          <-      E_2
//   C_1                    ->
//                          <-      C_2, h
//
// Phase 1 is skipped when both sides hold a PeerTrust record for each other.

#include "lseg/bytes.hpp"
#include "lseg/certs.hpp"
#include "lseg/primitives.hpp"
#include "lseg/random.hpp"
#include "lseg/trust_store.hpp"
#include "lseg/wire.hpp"

#include <functional>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace lseg {

enum class Role { Client, Server };

inline Direction sending_direction(Role r) {
    return r == Role::Client ? Direction::ClientToServer : Direction::ServerToClient;
}

using Clock = std::function<uint64_t()>;

/// Wall-clock milliseconds since the Unix epoch.
uint64_t system_clock_ms();

inline constexpr uint64_t kDefaultClockSkewMs = 5000;

// HKDF labels. These are protocol constants; changing one breaks interop.
inline constexpr std::string_view kInfoInit = "LSEG-v1-init";
inline constexpr std::string_view kInfoEph = "LSEG-v1-eph";
inline constexpr std::string_view kInfoC1Nonce = "LSEG-c1-nonce";
inline constexpr std::string_view kInfoC2Nonce = "LSEG-c2-nonce";

/// Fault injection for tests and the attack harness.
struct HandshakeTestHooks {
    /// Server flips one bit of k_sym after computing h and before sealing C_2.
    bool flip_ksym_after_confirm = false;
};

struct HandshakeConfig {
    Role role = Role::Client;
    IdentityKeyPair identity;
    Certificate certificate;
    TrustAnchor anchor;
    uint64_t clock_skew_ms = kDefaultClockSkewMs;
    Clock clock = system_clock_ms;
    HandshakeTestHooks hooks;

    const PartyId& id() const { return certificate.subject_id; }

    /// Throws std::invalid_argument on a zero skew or a certificate that
    /// does not carry the identity's public key.
    void validate() const;
};

/// What a successful check_auth_msg establishes about the sender.
struct PeerFacts {
    PartyId peer_id{};
    ByteArray<32> peer_ed_public{};
    uint64_t timestamp = 0;
};

Msg1 make_m1(const HandshakeConfig& config, uint64_t now);
Msg2 make_m2(const HandshakeConfig& config, uint64_t now);

/// Validates an m1/m2 in cheap-first order:
///   certificate issuer and window   -> BadCert
///   timestamp vs. now +/- skew      -> StaleTimestamp / FutureTimestamp
///   certificate signature           -> BadCert
///   message signature               -> BadSignature
///   (peer, timestamp) in cache      -> Replayed
/// On success the pair is added to the replay cache.
PeerFacts check_auth_msg(const AuthMessage& msg, const TrustAnchor& anchor, uint64_t now,
                         uint64_t skew_ms, ReplayCache& replay_cache);

/// k_x = X25519(my x_scalar, peer's Montgomery key), k_y = Edwards-y
/// reprojection of k_x, k_init = HKDF(k_x || k_y, SHA-256(client_x || server_x),
/// "LSEG-v1-init", 16).
AeadKey derive_initial_key(const IdentityKeyPair& my, const ByteArray<32>& peer_ed_public,
                           const ByteArray<32>& client_x_public,
                           const ByteArray<32>& server_x_public);

/// ID_c || ID_s, the associated data of every handshake and record ciphertext.
ByteArray<16> associated_data(const PartyId& client_id, const PartyId& server_id);

AeadNonce c1_nonce(const AeadKey& k_eph);
AeadNonce c2_nonce(const AeadKey& k_eph);

/// One side's ephemeral key pair. The secret is overwritten as soon as
/// k_eph is derived; reading it afterwards throws Error::StateError.
class EphemeralState {
public:
    const ByteArray<32>& my_eph_public() const { return my_public_; }
    const std::optional<ByteArray<32>>& peer_eph_public() const { return peer_public_; }
    const SecretBytes<32>& my_eph_secret() const;
    bool erased() const { return erased_; }
    void erase();

    /// Test hook: raw copy of the secret buffers (scalar, then the raw DH
    /// output used to derive k_eph).
    Bytes storage_snapshot() const;

private:
    SecretBytes<32> secret_;
    SecretBytes<32> raw_shared_;
    ByteArray<32> my_public_{};
    std::optional<ByteArray<32>> peer_public_;
    bool erased_ = false;

    friend std::pair<EphemeralState, MsgEph> start_phase2(const PeerTrust&, const HandshakeConfig&,
                                                          RandomSource&);
    friend AeadKey accept_eph(EphemeralState&, const MsgEph&, const PeerTrust&,
                              const HandshakeConfig&);
};

/// Fresh clamped ephemeral scalar; E = Ascon(k_init, N, ID_c || ID_s, eph public)
/// with a random N sent alongside.
std::pair<EphemeralState, MsgEph> start_phase2(const PeerTrust& trust, const HandshakeConfig& config,
                                               RandomSource& rng);

/// Opens the peer's ephemeral challenge without any public-key work.
/// Throws WrongDirection or AuthFailure.
ByteArray<32> open_eph(const MsgEph& msg, const PeerTrust& trust, const HandshakeConfig& config);

/// k_eph = HKDF(X25519(my eph secret, peer eph public), "", "LSEG-v1-eph", 16).
/// Erases the ephemeral secret before returning (also on failure).
AeadKey accept_eph(EphemeralState& state, const MsgEph& msg, const PeerTrust& trust,
                   const HandshakeConfig& config);

struct SessionKeys {
    AeadKey k_eph;
    AeadKey k_sym;
    SecretBytes<16> n_r;
    PartyId my_id{};
    PartyId peer_id{};
    Role role = Role::Client;

    PartyId client_id() const { return role == Role::Client ? my_id : peer_id; }
    PartyId server_id() const { return role == Role::Client ? peer_id : my_id; }
};

std::pair<MsgC1, SecretBytes<16>> client_key_exchange(const AeadKey& k_eph, const PartyId& client_id,
                                                      const PartyId& server_id, RandomSource& rng);

/// Opens C_1 (D_3), draws k_sym, returns (C_2, h) and the server's keys.
std::pair<MsgC2, SessionKeys> server_key_exchange(const AeadKey& k_eph, const PartyId& client_id,
                                                  const PartyId& server_id, const MsgC1& msg,
                                                  RandomSource& rng,
                                                  const HandshakeTestHooks& hooks = {});

/// Opens C_2 and accepts k_sym iff SHA-256(k_sym XOR n_r) == h.
/// Throws AuthFailure or ConfirmMismatch.
SessionKeys client_finish(const AeadKey& k_eph, const SecretBytes<16>& n_r,
                          const PartyId& client_id, const PartyId& server_id, const MsgC2& msg);

/// Per-session state machine. Transport-agnostic: feed it decoded messages
/// and send whatever it returns. Any exception leaves it in the Failed
/// stage with all intermediate key material wiped.
class Handshake {
public:
    enum class Stage {
        Idle,
        AwaitHello,
        AwaitHelloAck,
        AwaitAuthOrEph, // server: m1 (phase 1) or E_1 (phase 2 only)
        AwaitM2,
        AwaitEph,
        AwaitC1,
        AwaitC2,
        Complete,
        Failed,
    };

    Handshake(HandshakeConfig config, TrustStore& trust, ReplayCache& replay, RandomSource& rng);
    ~Handshake();
    Handshake(const Handshake&) = delete;
    Handshake& operator=(const Handshake&) = delete;

    /// Client: returns the Hello. Server: returns nothing and waits.
    std::vector<Message> start();

    std::vector<Message> receive(const Message& msg);

    /// Wipes all intermediate secrets and moves to Failed.
    void abort();

    Stage stage() const { return stage_; }
    bool complete() const { return stage_ == Stage::Complete; }
    bool ran_phase1() const { return ran_phase1_; }
    const std::optional<PartyId>& peer_id() const { return peer_id_; }
    const Transcript& transcript() const { return transcript_; }
    Role role() const { return config_.role; }

    /// Error::StateError unless complete.
    const SessionKeys& session_keys() const;

    /// Error::StateError once the ephemeral secret has been erased or when
    /// no ephemeral pair exists.
    const SecretBytes<32>& ephemeral_secret() const;

    /// Test hook: raw bytes of every buffer k_eph could be recomputed from
    /// (ephemeral scalar, raw ephemeral DH output, pending k_eph copy).
    Bytes ephemeral_storage_snapshot() const;

private:
    HandshakeConfig config_;
    TrustStore& trust_;
    ReplayCache& replay_;
    RandomSource& rng_;

    Stage stage_ = Stage::Idle;
    bool ran_phase1_ = false;
    std::optional<PartyId> peer_id_;
    std::optional<PeerTrust> pending_trust_; // server: until E_1 proves the client derived k_init
    std::optional<PeerTrust> trust_entry_;
    std::optional<EphemeralState> eph_;
    AeadKey k_eph_;
    SecretBytes<16> n_r_;
    std::optional<SessionKeys> keys_;
    Transcript transcript_;

    std::vector<Message> dispatch(const Message& msg);
    std::vector<Message> send(std::vector<Message> out);
    void wipe();
    PartyId client_id() const;
    PartyId server_id() const;
};

std::string_view stage_name(Handshake::Stage s);

class Channel;

struct HandshakeResult {
    SessionKeys keys;
    Transcript transcript;
    bool ran_phase1 = false;
};

/// Drives a Handshake over a channel until it completes. Errors propagate
/// as LsegError after the state machine has wiped its secrets.
HandshakeResult run_handshake(const HandshakeConfig& config, Channel& channel, TrustStore& trust,
                              ReplayCache& replay, RandomSource& rng);

} // namespace lseg
