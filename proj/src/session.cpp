#include "lseg/session.hpp"

#include "lseg/error.hpp"

namespace lseg {

AeadNonce record_nonce(Direction dir, uint64_t seq) {
    AeadNonce n{};
    n[0] = uint8_t(dir);
    store_be64(n.data() + 8, seq);
    return n;
}

RecordSender::RecordSender(const AeadKey& key, Direction dir, const PartyId& client_id,
                           const PartyId& server_id, uint64_t first_seq)
    : key_(key), dir_(dir), ad_(associated_data(client_id, server_id)), seq_(first_seq) {}

AppFrame RecordSender::seal(ByteView plaintext) {
    if (seq_ == kMaxSequence)
        fail(Error::CounterExhausted);
    AppFrame f;
    f.seq = seq_;
    f.sealed = aead_seal(key_, record_nonce(dir_, seq_), ad_, plaintext);
    ++seq_;
    return f;
}

RecordReceiver::RecordReceiver(const AeadKey& key, Direction dir, const PartyId& client_id,
                               const PartyId& server_id, uint64_t first_seq)
    : key_(key), dir_(dir), ad_(associated_data(client_id, server_id)), seq_(first_seq) {}

Bytes RecordReceiver::open(const AppFrame& frame) {
    if (frame.seq < seq_)
        fail(Error::Replayed, "record " + std::to_string(frame.seq));
    if (frame.seq > seq_)
        fail(Error::OutOfOrder, "record " + std::to_string(frame.seq));
    Bytes pt = aead_open(key_, record_nonce(dir_, frame.seq), ad_, frame.sealed);
    ++seq_;
    return pt;
}

namespace {
Direction peer_direction(Role r) {
    return r == Role::Client ? Direction::ServerToClient : Direction::ClientToServer;
}
} // namespace

RecordCipher::RecordCipher(const SessionKeys& keys)
    : send_(keys.k_sym, sending_direction(keys.role), keys.client_id(), keys.server_id()),
      recv_(keys.k_sym, peer_direction(keys.role), keys.client_id(), keys.server_id()) {}

} // namespace lseg
