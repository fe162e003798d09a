#include "lseg/wire.hpp"

#include "lseg/error.hpp"

#include <array>
#include <cstring>

namespace lseg {

namespace {

struct KindInfo {
    MessageKind kind;
    std::string_view name;
};

constexpr std::array<KindInfo, 8> kKinds = {{
    {MessageKind::Hello, "hello"},
    {MessageKind::HelloAck, "hello_ack"},
    {MessageKind::Msg1, "m1"},
    {MessageKind::Msg2, "m2"},
    {MessageKind::Eph, "eph"},
    {MessageKind::C1, "c1"},
    {MessageKind::C2, "c2"},
    {MessageKind::App, "app"},
}};

constexpr size_t kAuthBodySize = Certificate::kEncodedSize + 8 + 64;

template <size_t N> void put(Bytes& out, const ByteArray<N>& a) { out.insert(out.end(), a.begin(), a.end()); }

template <size_t N> ByteArray<N> take(ByteView body, size_t offset) {
    ByteArray<N> a;
    std::memcpy(a.data(), body.data() + offset, N);
    return a;
}

void encode_auth(Bytes& body, const AuthMessage& m) {
    put(body, encode_cert(m.cert));
    append_be64(body, m.timestamp);
    put(body, m.sig);
}

AuthMessage decode_auth(ByteView body) {
    if (body.size() != kAuthBodySize)
        fail(Error::Malformed, "auth message length");
    AuthMessage m;
    m.cert = decode_cert(body.first(Certificate::kEncodedSize));
    m.timestamp = load_be64(body.data() + Certificate::kEncodedSize);
    m.sig = take<64>(body, Certificate::kEncodedSize + 8);
    return m;
}

void expect_size(ByteView body, size_t n) {
    if (body.size() != n)
        fail(Error::Malformed, "body length");
}

} // namespace

std::string_view kind_name(MessageKind k) {
    for (const auto& info : kKinds)
        if (info.kind == k)
            return info.name;
    return "unknown";
}

std::optional<MessageKind> kind_from_name(std::string_view name) {
    for (const auto& info : kKinds)
        if (info.name == name)
            return info.kind;
    return std::nullopt;
}

MessageKind kind_of(const Message& m) {
    struct Visitor {
        MessageKind operator()(const Hello&) const { return MessageKind::Hello; }
        MessageKind operator()(const HelloAck&) const { return MessageKind::HelloAck; }
        MessageKind operator()(const Msg1&) const { return MessageKind::Msg1; }
        MessageKind operator()(const Msg2&) const { return MessageKind::Msg2; }
        MessageKind operator()(const MsgEph&) const { return MessageKind::Eph; }
        MessageKind operator()(const MsgC1&) const { return MessageKind::C1; }
        MessageKind operator()(const MsgC2&) const { return MessageKind::C2; }
        MessageKind operator()(const AppFrame&) const { return MessageKind::App; }
    };
    return std::visit(Visitor{}, m);
}

Bytes auth_signed_bytes(const Certificate& cert, uint64_t timestamp) {
    auto c = encode_cert(cert);
    Bytes out(c.begin(), c.end());
    append_be64(out, timestamp);
    return out;
}

Bytes encode(const Message& m) {
    Bytes body;
    struct Visitor {
        Bytes& body;
        void operator()(const Hello& h) const { put(body, h.client_id); }
        void operator()(const HelloAck& a) const {
            put(body, a.server_id);
            body.push_back(a.has_trust ? 1 : 0);
        }
        void operator()(const Msg1& m) const { encode_auth(body, m); }
        void operator()(const Msg2& m) const { encode_auth(body, m); }
        void operator()(const MsgEph& e) const {
            body.push_back(uint8_t(e.direction));
            put(body, e.nonce);
            put(body, e.sealed);
        }
        void operator()(const MsgC1& c) const { put(body, c.sealed); }
        void operator()(const MsgC2& c) const {
            put(body, c.sealed);
            put(body, c.confirm);
        }
        void operator()(const AppFrame& f) const {
            append_be64(body, f.seq);
            append(body, f.sealed);
        }
    };
    std::visit(Visitor{body}, m);
    if (body.size() > kMaxBodySize)
        throw std::length_error("message body exceeds frame limit");

    Bytes frame;
    frame.reserve(kFrameHeaderSize + body.size());
    frame.push_back(uint8_t(kind_of(m)));
    frame.push_back(uint8_t(body.size() >> 8));
    frame.push_back(uint8_t(body.size()));
    append(frame, body);
    return frame;
}

MessageKind frame_kind(ByteView frame) {
    if (frame.size() < kFrameHeaderSize)
        fail(Error::Malformed, "short frame");
    for (const auto& info : kKinds)
        if (uint8_t(info.kind) == frame[0])
            return info.kind;
    fail(Error::Malformed, "unknown message kind");
}

Message decode(ByteView frame) {
    MessageKind kind = frame_kind(frame);
    size_t len = (size_t(frame[1]) << 8) | frame[2];
    if (frame.size() != kFrameHeaderSize + len)
        fail(Error::Malformed, "length field mismatch");
    ByteView body = frame.subspan(kFrameHeaderSize);

    switch (kind) {
    case MessageKind::Hello:
        expect_size(body, 8);
        return Hello{take<8>(body, 0)};
    case MessageKind::HelloAck:
        expect_size(body, 9);
        if (body[8] > 1)
            fail(Error::Malformed, "trust flag");
        return HelloAck{take<8>(body, 0), body[8] == 1};
    case MessageKind::Msg1:
        return Msg1{decode_auth(body)};
    case MessageKind::Msg2:
        return Msg2{decode_auth(body)};
    case MessageKind::Eph: {
        expect_size(body, 1 + 16 + 32 + kAeadTagSize);
        if (body[0] > 1)
            fail(Error::Malformed, "direction byte");
        MsgEph e;
        e.direction = Direction(body[0]);
        e.nonce = take<16>(body, 1);
        e.sealed = take<32 + kAeadTagSize>(body, 17);
        return e;
    }
    case MessageKind::C1:
        expect_size(body, 16 + kAeadTagSize);
        return MsgC1{take<16 + kAeadTagSize>(body, 0)};
    case MessageKind::C2:
        expect_size(body, 16 + kAeadTagSize + 32);
        return MsgC2{take<16 + kAeadTagSize>(body, 0), take<32>(body, 16 + kAeadTagSize)};
    case MessageKind::App: {
        if (body.size() < 8 + kAeadTagSize)
            fail(Error::Malformed, "app frame too short");
        AppFrame f;
        f.seq = load_be64(body.data());
        f.sealed.assign(body.begin() + 8, body.end());
        return f;
    }
    }
    fail(Error::Malformed, "unknown message kind");
}

int phase_of(MessageKind k) {
    switch (k) {
    case MessageKind::Hello:
    case MessageKind::HelloAck: return 0;
    case MessageKind::Msg1:
    case MessageKind::Msg2: return 1;
    case MessageKind::Eph:
    case MessageKind::C1:
    case MessageKind::C2: return 2;
    case MessageKind::App: return 3;
    }
    return -1;
}

uint64_t payload_bits_of(MessageKind k) {
    switch (k) {
    case MessageKind::Eph: return 256;        // ephemeral public key
    case MessageKind::C1: return 128;         // nonce n_r
    case MessageKind::C2: return 128 + 256;   // k_sym + confirmation hash
    case MessageKind::Msg1:
    case MessageKind::Msg2: return kAuthBodySize * 8; // certificate, timestamp, signature
    default: return 0;
    }
}

void Transcript::record(MessageKind kind, Direction dir, size_t frame_size) {
    entries_.push_back({kind, dir, payload_bits_of(kind), uint64_t(frame_size) * 8});
}

bool Transcript::contains_phase(int phase) const {
    for (const auto& e : entries_)
        if (phase_of(e.kind) == phase)
            return true;
    return false;
}

uint64_t payload_bits(const Transcript& t, int phase, Accounting mode) {
    if (phase != 1 && phase != 2)
        throw std::invalid_argument("payload_bits: phase must be 1 or 2");
    uint64_t bits = 0;
    int eph = 0, c1 = 0, c2 = 0, m1 = 0, m2 = 0;
    for (const auto& e : t.entries()) {
        if (phase_of(e.kind) != phase)
            continue;
        bits += e.payload_bits;
        eph += e.kind == MessageKind::Eph;
        c1 += e.kind == MessageKind::C1;
        c2 += e.kind == MessageKind::C2;
        m1 += e.kind == MessageKind::Msg1;
        m2 += e.kind == MessageKind::Msg2;
    }
    if (mode == Accounting::Complete) {
        bool complete = phase == 1 ? (m1 >= 1 && m2 >= 1) : (eph >= 2 && c1 >= 1 && c2 >= 1);
        if (!complete)
            fail(Error::IncompletePhase);
    }
    return bits;
}

uint64_t wire_bits(const Transcript& t) {
    uint64_t bits = 0;
    for (const auto& e : t.entries())
        bits += e.wire_bits;
    return bits;
}

uint64_t wire_bits(const Transcript& t, int phase) {
    uint64_t bits = 0;
    for (const auto& e : t.entries())
        if (phase_of(e.kind) == phase)
            bits += e.wire_bits;
    return bits;
}

size_t key_exchange_messages(const Transcript& t) {
    size_t n = 0;
    for (const auto& e : t.entries())
        n += e.kind == MessageKind::C1 || e.kind == MessageKind::C2;
    return n;
}

} // namespace lseg
