#pragma once

// Record layer. Every application frame is sealed under k_sym with
//   nonce = direction (1) || 0^7 || seq (8, big-endian)
//   AD    = ID_c || ID_s
// and accepted only in strict sequence order.

#include "lseg/handshake.hpp"
#include "lseg/wire.hpp"

#include <limits>

namespace lseg {

inline constexpr uint64_t kMaxSequence = std::numeric_limits<uint64_t>::max();

AeadNonce record_nonce(Direction dir, uint64_t seq);

class RecordSender {
public:
    RecordSender(const AeadKey& key, Direction dir, const PartyId& client_id,
                 const PartyId& server_id, uint64_t first_seq = 0);

    /// Throws Error::CounterExhausted once seq reaches 2^64 - 1.
    AppFrame seal(ByteView plaintext);
    uint64_t next_seq() const { return seq_; }

private:
    AeadKey key_;
    Direction dir_;
    ByteArray<16> ad_;
    uint64_t seq_;
};

class RecordReceiver {
public:
    RecordReceiver(const AeadKey& key, Direction dir, const PartyId& client_id,
                   const PartyId& server_id, uint64_t first_seq = 0);

    /// Throws Replayed (seq below expected), OutOfOrder (seq above) or AuthFailure.
    Bytes open(const AppFrame& frame);
    uint64_t expected_seq() const { return seq_; }

private:
    AeadKey key_;
    Direction dir_;
    ByteArray<16> ad_;
    uint64_t seq_;
};

/// Both halves for one endpoint. The halves share no state and may be used
/// from different threads.
class RecordCipher {
public:
    explicit RecordCipher(const SessionKeys& keys);

    AppFrame seal_frame(ByteView plaintext) { return send_.seal(plaintext); }
    Bytes open_frame(const AppFrame& frame) { return recv_.open(frame); }

    RecordSender& sender() { return send_; }
    RecordReceiver& receiver() { return recv_; }

private:
    RecordSender send_;
    RecordReceiver recv_;
};

} // namespace lseg
