#pragma once

// Frame layout: kind (1) || body length (2, big-endian) || body.
// Body layouts are listed in docs/wire.md.

#include "lseg/bytes.hpp"
#include "lseg/certs.hpp"
#include "lseg/primitives.hpp"

#include <optional>
#include <string_view>
#include <variant>
#include <vector>

namespace lseg {

inline constexpr size_t kFrameHeaderSize = 3;
inline constexpr size_t kMaxBodySize = 0xFFFF;

enum class MessageKind : uint8_t {
    Hello = 0x01,
    HelloAck = 0x02,
    Msg1 = 0x10,
    Msg2 = 0x11,
    Eph = 0x20,
    C1 = 0x30,
    C2 = 0x31,
    App = 0x40,
};

enum class Direction : uint8_t { ClientToServer = 0, ServerToClient = 1 };

std::string_view kind_name(MessageKind k);
std::optional<MessageKind> kind_from_name(std::string_view name);

struct Hello {
    PartyId client_id{};
    friend bool operator==(const Hello&, const Hello&) = default;
};

struct HelloAck {
    PartyId server_id{};
    bool has_trust = false; ///< server holds a PeerTrust entry for the client
    friend bool operator==(const HelloAck&, const HelloAck&) = default;
};

/// m1 / m2: certificate, timestamp, signature over encode(cert) || timestamp.
struct AuthMessage {
    Certificate cert;
    uint64_t timestamp = 0;
    Signature sig{};
    friend bool operator==(const AuthMessage&, const AuthMessage&) = default;
};

struct Msg1 : AuthMessage {};
struct Msg2 : AuthMessage {};

/// Ephemeral key challenge (E_1 client->server, E_2 server->client).
/// k_init outlives the session, so each challenge carries a fresh nonce.
struct MsgEph {
    Direction direction = Direction::ClientToServer;
    AeadNonce nonce{};
    ByteArray<32 + kAeadTagSize> sealed{};
    friend bool operator==(const MsgEph&, const MsgEph&) = default;
};

/// Encrypted client nonce.
struct MsgC1 {
    ByteArray<16 + kAeadTagSize> sealed{};
    friend bool operator==(const MsgC1&, const MsgC1&) = default;
};

/// Encrypted session key plus the key-confirmation hash.
struct MsgC2 {
    ByteArray<16 + kAeadTagSize> sealed{};
    Digest confirm{};
    friend bool operator==(const MsgC2&, const MsgC2&) = default;
};

struct AppFrame {
    uint64_t seq = 0;
    Bytes sealed;
    friend bool operator==(const AppFrame&, const AppFrame&) = default;
};

using Message = std::variant<Hello, HelloAck, Msg1, Msg2, MsgEph, MsgC1, MsgC2, AppFrame>;

MessageKind kind_of(const Message& m);

/// The bytes an auth message signature covers.
Bytes auth_signed_bytes(const Certificate& cert, uint64_t timestamp);

Bytes encode(const Message& m);

/// Total: returns a message or throws Error::Malformed.
Message decode(ByteView frame);

/// Peeks at the header of a complete frame; throws Error::Malformed.
MessageKind frame_kind(ByteView frame);

// ---------------------------------------------------------------------------
// Transcript and communication-cost accounting.
//
// payload bits follow the published accounting: public keys, nonces, keys and
// hashes only; tags, AEAD nonces, headers and direction bytes count zero.
// wire bits count every transmitted byte.

/// 0 = session setup (Hello/HelloAck), 1 = authentication, 2 = key
/// exchange, 3 = application data.
int phase_of(MessageKind k);

uint64_t payload_bits_of(MessageKind k);

struct TranscriptEntry {
    MessageKind kind;
    Direction direction;
    uint64_t payload_bits;
    uint64_t wire_bits;
};

class Transcript {
public:
    void record(MessageKind kind, Direction dir, size_t frame_size);
    void record(const Message& m, Direction dir) { record(kind_of(m), dir, encode(m).size()); }

    const std::vector<TranscriptEntry>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    bool contains_phase(int phase) const;

private:
    std::vector<TranscriptEntry> entries_;
};

enum class Accounting { Complete, Partial };

/// Sum of payload bits for a phase (1 or 2). With Accounting::Complete the
/// phase must be finished (phase 1: m1 and m2; phase 2: two MsgEph, C1, C2)
/// or Error::IncompletePhase is thrown.
uint64_t payload_bits(const Transcript& t, int phase, Accounting mode = Accounting::Complete);

uint64_t wire_bits(const Transcript& t);
uint64_t wire_bits(const Transcript& t, int phase);

/// Messages in phase 2 after the ephemeral challenges (C1 and C2).
size_t key_exchange_messages(const Transcript& t);

} // namespace lseg
