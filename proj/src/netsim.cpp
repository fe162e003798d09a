#include "lseg/netsim.hpp"

#include "lseg/random.hpp"
#include "lseg/trust_store.hpp"

#include <json.hpp>

#include <algorithm>
#include <deque>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <set>
#include <sstream>

namespace lseg {

// ---------------------------------------------------------------------------
// Script parsing

namespace {

[[noreturn]] void script_fail(size_t line, const std::string& what) {
    fail(Error::ScriptError, "line " + std::to_string(line) + ": " + what);
}

int64_t parse_int(const std::string& s, size_t line) {
    try {
        size_t pos = 0;
        long long v = std::stoll(s, &pos, 10);
        if (pos != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        script_fail(line, "expected an integer, got '" + s + "'");
    }
}

uint64_t parse_uint(const std::string& s, size_t line) {
    int64_t v = parse_int(s, line);
    if (v < 0)
        script_fail(line, "expected a non-negative integer, got '" + s + "'");
    return uint64_t(v);
}

const std::map<std::string, ActionKind, std::less<>> kActions = {
    {"pass", ActionKind::Pass},
    {"drop", ActionKind::Drop},
    {"replay", ActionKind::Replay},
    {"tamper_byte", ActionKind::TamperByte},
    {"substitute_key", ActionKind::SubstituteKey},
    {"delay", ActionKind::Delay},
    {"shift_timestamp", ActionKind::ShiftTimestamp},
};

bool action_takes_arg(ActionKind a) {
    return a != ActionKind::Pass && a != ActionKind::Drop;
}

EndpointExpectation parse_expectation(const std::string& s, size_t line) {
    if (s == "ok")
        return {};
    Error e;
    if (!error_from_name(s, e))
        script_fail(line, "unknown error name '" + s + "'");
    return {e};
}

} // namespace

const std::vector<std::string>& security_properties() {
    static const std::vector<std::string> props = {
        "mutual_authentication", "session_key_agreement", "replay", "mitm",
        "forward_secrecy",       "insider",               "impersonation", "dos",
    };
    return props;
}

AdversaryScript parse_script(std::string_view text) {
    AdversaryScript s;
    std::istringstream in{std::string(text)};
    std::string raw;
    size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (auto hash = raw.find('#'); hash != std::string::npos)
            raw.erase(hash);
        std::istringstream ls(raw);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;)
            tok.push_back(t);
        if (tok.empty())
            continue;

        const std::string& head = tok[0];
        if (head == "name" || head == "property") {
            if (tok.size() != 2)
                script_fail(line, head + " takes one word");
            if (head == "name") {
                s.name = tok[1];
            } else {
                const auto& props = security_properties();
                if (tok[1] != "control" && std::find(props.begin(), props.end(), tok[1]) == props.end())
                    script_fail(line, "unknown property '" + tok[1] + "'");
                s.property = tok[1];
            }
            continue;
        }
        if (head == "sessions" || head == "seed") {
            if (tok.size() != 2)
                script_fail(line, head + " takes one number");
            uint64_t v = parse_uint(tok[1], line);
            if (head == "sessions") {
                if (v == 0 || v > 10000)
                    script_fail(line, "sessions must be in 1..10000");
                s.sessions = v;
            } else {
                s.seed = v;
            }
            continue;
        }
        if (head == "option") {
            if (tok.size() != 2)
                script_fail(line, "option takes one word");
            auto& o = s.options;
            if (tok[1] == "no_replay_cache") o.no_replay_cache = true;
            else if (tok[1] == "no_trust_persistence") o.no_trust_persistence = true;
            else if (tok[1] == "leak_long_term_keys") o.leak_long_term_keys = true;
            else if (tok[1] == "leak_ephemeral_keys") o.leak_ephemeral_keys = true;
            else if (tok[1] == "fault_ksym") o.fault_ksym = true;
            else if (tok[1] == "insider") o.insider = true;
            else script_fail(line, "unknown option '" + tok[1] + "'");
            continue;
        }
        if (head == "expect") {
            if (tok.size() != 3)
                script_fail(line, "expect takes a target and a value");
            if (tok[1] == "client")
                s.expect_client = parse_expectation(tok[2], line);
            else if (tok[1] == "server")
                s.expect_server = parse_expectation(tok[2], line);
            else if (tok[1] == "server_calls_at_reject")
                s.expect_server_calls_at_reject = parse_uint(tok[2], line);
            else if (tok[1] == "adversary_key" && (tok[2] == "yes" || tok[2] == "no"))
                s.expect_adversary_key = tok[2] == "yes";
            else
                script_fail(line, "unknown expect target '" + tok[1] + "'");
            continue;
        }

        // <kind> <index> <direction> <action> [arg]
        ScriptRule r;
        auto kind = kind_from_name(head);
        if (!kind)
            script_fail(line, "unknown directive or message kind '" + head + "'");
        r.kind = *kind;
        if (tok.size() < 4)
            script_fail(line, "rule needs kind, index, direction and action");
        if (tok[1] != "*")
            r.index = parse_uint(tok[1], line);
        if (tok[2] == "c2s") r.direction = DirMatch::ClientToServer;
        else if (tok[2] == "s2c") r.direction = DirMatch::ServerToClient;
        else if (tok[2] == "any") r.direction = DirMatch::Any;
        else script_fail(line, "direction must be c2s, s2c or any");

        auto act = kActions.find(tok[3]);
        if (act == kActions.end())
            script_fail(line, "unknown action '" + tok[3] + "'");
        r.action = act->second;
        const size_t want = action_takes_arg(r.action) ? 5 : 4;
        if (tok.size() != want)
            script_fail(line, "action '" + tok[3] + "' takes " +
                                  (want == 5 ? "one argument" : "no argument"));

        switch (r.action) {
        case ActionKind::Replay:
            r.arg = int64_t(parse_uint(tok[4], line));
            if (r.direction == DirMatch::Any)
                script_fail(line, "replay needs an explicit direction");
            break;
        case ActionKind::TamperByte:
            r.arg = int64_t(parse_uint(tok[4], line));
            break;
        case ActionKind::Delay:
            r.arg = int64_t(parse_uint(tok[4], line));
            break;
        case ActionKind::ShiftTimestamp:
            r.arg = parse_int(tok[4], line);
            if (r.kind != MessageKind::Msg1 && r.kind != MessageKind::Msg2)
                script_fail(line, "shift_timestamp applies to m1 and m2 only");
            break;
        case ActionKind::SubstituteKey:
            if (tok[4] == "rogue") r.key = AdversaryKey::Rogue;
            else if (tok[4] == "insider") r.key = AdversaryKey::Insider;
            else script_fail(line, "substitute_key takes rogue or insider");
            if (r.kind == MessageKind::C1 || r.kind == MessageKind::C2 || r.kind == MessageKind::App)
                script_fail(line, "substitute_key applies to hello, hello_ack, m1, m2 and eph");
            break;
        default:
            break;
        }
        s.rules.push_back(r);
    }

    if (s.name.empty())
        fail(Error::ScriptError, "script has no name");
    if (s.property.empty())
        fail(Error::ScriptError, "script '" + s.name + "' has no property");
    for (const auto& r : s.rules)
        if (r.action == ActionKind::SubstituteKey && r.key == AdversaryKey::Insider && !s.options.insider)
            fail(Error::ScriptError, "substitute_key insider needs 'option insider'");
    return s;
}

AdversaryScript load_script(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        fail(Error::IoError, "cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_script(ss.str());
}

// ---------------------------------------------------------------------------
// World

namespace {

constexpr uint64_t kEpochMs = 1'700'000'000'000ULL;
constexpr uint64_t kDayMs = 86'400'000ULL;
constexpr uint64_t kSessionGapMs = 1000;

IdentityKeyPair fresh_identity(RandomSource& rng) { return derive_identity(rng.array<32>()); }

PartyId id_of(uint64_t v) {
    PartyId id;
    store_be64(id.data(), v);
    return id;
}

} // namespace

AttackWorld make_attack_world(uint64_t seed) {
    SeededRandom rng(seed);
    AttackWorld w;
    w.epoch_ms = kEpochMs;
    const ValidityWindow window{kEpochMs - kDayMs, kEpochMs + 365 * kDayMs};

    w.ca.id = id_of(0xCA00CA00CA00CA00ULL);
    w.ca.keys = fresh_identity(rng);
    w.rogue_ca.id = w.ca.id; // same name, different key
    w.rogue_ca.keys = fresh_identity(rng);

    auto make_endpoint = [&](Role role, uint64_t id) {
        HandshakeConfig c;
        c.role = role;
        c.identity = fresh_identity(rng);
        c.certificate = issue(w.ca, id_of(id), c.identity.ed_public, window);
        c.anchor = w.ca.anchor();
        return c;
    };
    w.client = make_endpoint(Role::Client, 0xC1C1C1C1C1C1C1C1ULL);
    w.server = make_endpoint(Role::Server, 0x5E5E5E5E5E5E5E5EULL);

    w.rogue = fresh_identity(rng);
    w.rogue_cert = issue(w.rogue_ca, id_of(0xADADADADADADADADULL), w.rogue.ed_public, window);
    w.insider = fresh_identity(rng);
    w.insider_cert = issue(w.ca, id_of(0x1D1D1D1D1D1D1D1DULL), w.insider.ed_public, window);
    return w;
}

// ---------------------------------------------------------------------------
// Run

namespace {

struct Frame {
    Direction dir;
    Bytes bytes;
};

struct Endpoint {
    std::unique_ptr<Handshake> hs;
    std::optional<Error> error;

    bool alive() const { return hs && !error && hs->stage() != Handshake::Stage::Complete; }
};

struct AdversaryIdentity {
    const IdentityKeyPair* keys;
    const Certificate* cert;
};

/// Everything the adversary saw or produced in one session.
struct SessionKnowledge {
    std::vector<Bytes> frames;
    std::vector<SecretBytes<32>> eph_scalars;
};

class Runner {
public:
    Runner(const AdversaryScript& script, const AttackWorld& world)
        : script_(script), world_(world), adv_rng_(script.seed * 4 + 3) {
        client_cfg_ = world.client;
        server_cfg_ = world.server;
        auto clock = [this] { return now_; };
        client_cfg_.clock = clock;
        server_cfg_.clock = clock;
        server_cfg_.hooks.flip_ksym_after_confirm = script.options.fault_ksym;
        now_ = world.epoch_ms;

        client_replay_ = std::make_unique<ReplayCache>(client_cfg_.clock_skew_ms);
        server_replay_ = std::make_unique<ReplayCache>(server_cfg_.clock_skew_ms);
        client_replay_->set_enabled(!script.options.no_replay_cache);
        server_replay_->set_enabled(!script.options.no_replay_cache);
    }

    AttackOutcome run() {
        AttackOutcome out;
        out.name = script_.name;
        out.property = script_.property;
        out.expect_adversary_key = script_.expect_adversary_key;
        SeededRandom client_rng(script_.seed * 4 + 1);
        SeededRandom server_rng(script_.seed * 4 + 2);

        for (uint64_t i = 0; i < script_.sessions; ++i) {
            if (i > 0)
                now_ += kSessionGapMs;
            if (i == 0 || script_.options.no_trust_persistence) {
                client_trust_ = std::make_unique<TrustStore>();
                server_trust_ = std::make_unique<TrustStore>();
            }
            knowledge_.emplace_back();
            out.sessions.push_back(run_session(client_rng, server_rng));
        }

        finish(out);
        out.wire_digest = hash256(wire_log_);
        return out;
    }

private:
    const AdversaryScript& script_;
    const AttackWorld& world_;
    HandshakeConfig client_cfg_;
    HandshakeConfig server_cfg_;
    uint64_t now_ = 0;
    SeededRandom adv_rng_;

    std::unique_ptr<TrustStore> client_trust_;
    std::unique_ptr<TrustStore> server_trust_;
    std::unique_ptr<ReplayCache> client_replay_;
    std::unique_ptr<ReplayCache> server_replay_;

    std::map<std::pair<MessageKind, Direction>, std::vector<Bytes>> history_;
    std::map<MessageKind, uint64_t> any_count_;
    std::vector<SessionKnowledge> knowledge_;
    Bytes wire_log_;

    // IDs as delivered in the current session.
    PartyId delivered_client_id_{};
    PartyId delivered_server_id_{};

    AdversaryIdentity adversary(AdversaryKey k) const {
        return k == AdversaryKey::Rogue ? AdversaryIdentity{&world_.rogue, &world_.rogue_cert}
                                        : AdversaryIdentity{&world_.insider, &world_.insider_cert};
    }

    SessionOutcome run_session(RandomSource& client_rng, RandomSource& server_rng) {
        Endpoint client, server;
        client.hs = std::make_unique<Handshake>(client_cfg_, *client_trust_, *client_replay_, client_rng);
        server.hs = std::make_unique<Handshake>(server_cfg_, *server_trust_, *server_replay_, server_rng);
        delivered_client_id_ = client_cfg_.id();
        delivered_server_id_ = server_cfg_.id();

        SessionOutcome so;
        std::deque<Frame> fifo;
        auto enqueue = [&](Direction d, const std::vector<Message>& msgs) {
            for (const auto& m : msgs)
                fifo.push_back({d, encode(m)});
        };
        server.hs->start();
        enqueue(Direction::ClientToServer, client.hs->start());
        auto leak = [&] {
            if (!script_.options.leak_ephemeral_keys)
                return;
            for (Endpoint* e : {&client, &server}) {
                try {
                    knowledge_.back().eph_scalars.push_back(e->hs->ephemeral_secret());
                } catch (const LsegError&) {
                }
            }
        };

        while (!fifo.empty()) {
            Frame f = std::move(fifo.front());
            fifo.pop_front();
            std::optional<Bytes> delivered = intercept(f);
            if (!delivered)
                continue;
            wire_log_.insert(wire_log_.end(), delivered->begin(), delivered->end());
            knowledge_.back().frames.push_back(*delivered);

            const bool to_server = f.dir == Direction::ClientToServer;
            Endpoint& dst = to_server ? server : client;
            if (!dst.alive())
                continue;
            PrimitiveCounters before = primitive_counters();
            try {
                auto replies = dst.hs->receive(decode(*delivered));
                enqueue(to_server ? Direction::ServerToClient : Direction::ClientToServer, replies);
            } catch (const LsegError& e) {
                dst.error = e.code();
            }
            if (to_server)
                add(so.server_calls, primitive_counters() - before);
            leak();
        }

        so.client = summarize(client);
        so.server = summarize(server);
        so.keys_agree = so.client.completed && so.server.completed && so.client.k_sym == so.server.k_sym;
        return so;
    }

    static void add(PrimitiveCounters& a, const PrimitiveCounters& b) {
        a.sign += b.sign;
        a.verify += b.verify;
        a.dh += b.dh;
    }

    static EndpointOutcome summarize(const Endpoint& e) {
        EndpointOutcome o;
        o.ran_phase1 = e.hs->ran_phase1();
        o.peer = e.hs->peer_id();
        if (e.hs->complete()) {
            o.completed = true;
            const auto& k = e.hs->session_keys().k_sym.bytes();
            o.k_sym.assign(k.begin(), k.end());
        } else {
            o.error = e.error.value_or(Error::Timeout);
        }
        return o;
    }

    static bool matches(const ScriptRule& r, MessageKind kind, Direction dir, uint64_t dir_index,
                        uint64_t any_index) {
        if (r.kind != kind)
            return false;
        if (r.direction == DirMatch::ClientToServer && dir != Direction::ClientToServer)
            return false;
        if (r.direction == DirMatch::ServerToClient && dir != Direction::ServerToClient)
            return false;
        if (!r.index)
            return true;
        return *r.index == (r.direction == DirMatch::Any ? any_index : dir_index);
    }

    /// Applies the script to one frame; nullopt when dropped.
    std::optional<Bytes> intercept(const Frame& f) {
        knowledge_.back().frames.push_back(f.bytes);
        const MessageKind kind = frame_kind(f.bytes);
        auto& hist = history_[{kind, f.dir}];
        const uint64_t dir_index = hist.size();
        const uint64_t any_index = any_count_[kind]++;
        hist.push_back(f.bytes);

        Bytes frame = f.bytes;
        for (const auto& r : script_.rules) {
            if (!matches(r, kind, f.dir, dir_index, any_index))
                continue;
            switch (r.action) {
            case ActionKind::Pass:
                break;
            case ActionKind::Drop:
                return std::nullopt;
            case ActionKind::Replay:
                if (uint64_t(r.arg) >= dir_index)
                    fail(Error::ScriptError, "replay of an occurrence not yet seen");
                frame = hist[size_t(r.arg)];
                break;
            case ActionKind::TamperByte: {
                size_t off = kFrameHeaderSize + size_t(r.arg);
                if (off >= frame.size())
                    fail(Error::ScriptError, "tamper offset beyond message body");
                frame[off] ^= 0x01;
                break;
            }
            case ActionKind::Delay:
                now_ += uint64_t(r.arg);
                break;
            case ActionKind::ShiftTimestamp: {
                uint8_t* ts = frame.data() + kFrameHeaderSize + Certificate::kEncodedSize;
                store_be64(ts, load_be64(ts) + uint64_t(r.arg));
                break;
            }
            case ActionKind::SubstituteKey:
                frame = substitute(frame, f.dir, adversary(r.key));
                break;
            }
        }

        // Track the identities each side has been told about.
        Message m = decode_or_empty(frame);
        if (auto* h = std::get_if<Hello>(&m))
            delivered_client_id_ = h->client_id;
        if (auto* a = std::get_if<HelloAck>(&m))
            delivered_server_id_ = a->server_id;
        return frame;
    }

    static Message decode_or_empty(ByteView frame) {
        try {
            return decode(frame);
        } catch (const LsegError&) {
            return AppFrame{};
        }
    }

    Bytes substitute(const Bytes& frame, Direction dir, const AdversaryIdentity& adv) {
        Message m = decode(frame);
        if (auto* h = std::get_if<Hello>(&m)) {
            h->client_id = adv.cert->subject_id;
        } else if (auto* a = std::get_if<HelloAck>(&m)) {
            a->server_id = adv.cert->subject_id;
        } else if (auto* m1 = std::get_if<Msg1>(&m)) {
            resign(*m1, adv);
        } else if (auto* m2 = std::get_if<Msg2>(&m)) {
            resign(*m2, adv);
        } else if (auto* e = std::get_if<MsgEph>(&m)) {
            reseal(*e, dir, adv);
        } else {
            fail(Error::ScriptError, "substitute_key on unsupported message");
        }
        return encode(m);
    }

    static void resign(AuthMessage& m, const AdversaryIdentity& adv) {
        m.cert = *adv.cert;
        m.sig = sign(*adv.keys, auth_signed_bytes(m.cert, m.timestamp));
    }

    /// Replaces the sealed ephemeral key with the adversary's own, sealed
    /// under the k_init the adversary shares with the recipient.
    void reseal(MsgEph& e, Direction dir, const AdversaryIdentity& adv) {
        const bool to_server = dir == Direction::ClientToServer;
        const HandshakeConfig& recipient = to_server ? server_cfg_ : client_cfg_;
        const ByteArray<32> recipient_x = recipient.identity.x_public;
        AeadKey k_init = to_server
                             ? derive_initial_key(*adv.keys, recipient.identity.ed_public,
                                                  adv.keys->x_public, recipient_x)
                             : derive_initial_key(*adv.keys, recipient.identity.ed_public,
                                                  recipient_x, adv.keys->x_public);
        const PartyId cid = to_server ? delivered_client_id_ : client_cfg_.id();
        const PartyId sid = to_server ? server_cfg_.id() : delivered_server_id_;

        SecretBytes<32> scalar;
        adv_rng_.fill(scalar.mutable_bytes());
        clamp_scalar(scalar.mutable_bytes());
        ByteArray<32> pub = x25519_public(scalar);
        knowledge_.back().eph_scalars.push_back(scalar);

        adv_rng_.fill(e.nonce);
        Bytes sealed = aead_seal(k_init, e.nonce, associated_data(cid, sid), pub);
        std::copy(sealed.begin(), sealed.end(), e.sealed.begin());
    }

    // -----------------------------------------------------------------------
    // Key recomputation: every k_sym the adversary can derive from what it saw.

    std::vector<const IdentityKeyPair*> known_identities() const {
        std::vector<const IdentityKeyPair*> ids = {&world_.rogue};
        if (script_.options.insider)
            ids.push_back(&world_.insider);
        if (script_.options.leak_long_term_keys) {
            ids.push_back(&world_.client.identity);
            ids.push_back(&world_.server.identity);
        }
        return ids;
    }

    std::vector<PartyId> party_ids() const {
        return {world_.client.id(), world_.server.id(), world_.rogue_cert.subject_id,
                world_.insider_cert.subject_id};
    }

    std::vector<ByteArray<32>> directory_ed_publics() const {
        return {world_.client.identity.ed_public, world_.server.identity.ed_public,
                world_.rogue.ed_public, world_.insider.ed_public};
    }

    std::vector<AeadKey> k_init_candidates() const {
        std::vector<AeadKey> out;
        for (const auto* me : known_identities()) {
            for (const auto& peer_ed : directory_ed_publics()) {
                const ByteArray<32> peer_x = ed_public_to_x25519(peer_ed);
                try {
                    out.push_back(derive_initial_key(*me, peer_ed, me->x_public, peer_x));
                    out.push_back(derive_initial_key(*me, peer_ed, peer_x, me->x_public));
                } catch (const LsegError&) {
                }
            }
        }
        return out;
    }

    std::set<Bytes> k_sym_candidates(const SessionKnowledge& k, const std::vector<AeadKey>& k_inits) const {
        const auto ids = party_ids();
        std::vector<ByteArray<16>> ads;
        for (const auto& c : ids)
            for (const auto& s : ids)
                ads.push_back(associated_data(c, s));

        // Ephemeral publics: opened challenges plus static keys.
        std::vector<ByteArray<32>> publics;
        for (const auto& ed : directory_ed_publics())
            publics.push_back(ed_public_to_x25519(ed));
        for (const auto& frame : k.frames) {
            Message m = decode_or_empty(frame);
            const auto* e = std::get_if<MsgEph>(&m);
            if (!e)
                continue;
            for (const auto& ki : k_inits)
                for (const auto& ad : ads) {
                    try {
                        Bytes pub = aead_open(ki, e->nonce, ad, e->sealed);
                        ByteArray<32> p;
                        std::copy(pub.begin(), pub.end(), p.begin());
                        publics.push_back(p);
                    } catch (const LsegError&) {
                    }
                }
        }

        std::vector<const SecretBytes<32>*> scalars;
        for (const auto& s : k.eph_scalars)
            scalars.push_back(&s);
        for (const auto* id : known_identities())
            scalars.push_back(&id->x_scalar);

        std::vector<AeadKey> k_ephs;
        for (const auto* s : scalars)
            for (const auto& p : publics) {
                try {
                    SharedSecret raw = dh(*s, p);
                    Bytes ke = hkdf(raw, {}, ByteView(reinterpret_cast<const uint8_t*>(kInfoEph.data()),
                                                      kInfoEph.size()), 16);
                    k_ephs.emplace_back(ke);
                } catch (const LsegError&) {
                }
            }

        std::set<Bytes> out;
        for (const auto& frame : k.frames) {
            Message m = decode_or_empty(frame);
            const auto* c2 = std::get_if<MsgC2>(&m);
            if (!c2)
                continue;
            for (const auto& ke : k_ephs)
                for (const auto& ad : ads) {
                    try {
                        out.insert(aead_open(ke, c2_nonce(ke), ad, c2->sealed));
                    } catch (const LsegError&) {
                    }
                }
        }
        return out;
    }

    void finish(AttackOutcome& out) {
        const auto k_inits = k_init_candidates();
        const PartyId honest[] = {world_.client.id(), world_.server.id()};
        auto is_honest = [&](const std::optional<PartyId>& p) {
            return p && (*p == honest[0] || *p == honest[1]);
        };

        for (size_t i = 0; i < out.sessions.size(); ++i) {
            SessionOutcome& so = out.sessions[i];
            const bool any_accept = (so.client.completed && is_honest(so.client.peer)) ||
                                    (so.server.completed && is_honest(so.server.peer));
            if (any_accept) {
                auto cands = k_sym_candidates(knowledge_[i], k_inits);
                so.adversary_computable =
                    (so.client.completed && is_honest(so.client.peer) && cands.count(so.client.k_sym)) ||
                    (so.server.completed && is_honest(so.server.peer) && cands.count(so.server.k_sym));
            }
            if (so.server.error)
                out.server_calls_at_reject += so.server_calls.total();
        }

        auto check = [&](const char* who, const std::optional<EndpointExpectation>& want,
                         const EndpointOutcome& got) {
            if (!want)
                return;
            auto name = [](const std::optional<Error>& e) {
                return e ? std::string(error_name(*e)) : std::string("ok");
            };
            if (want->error != got.error)
                out.failures.push_back(std::string(who) + ": expected " + name(want->error) + ", got " +
                                       name(got.error));
        };
        check("client", script_.expect_client, out.last().client);
        check("server", script_.expect_server, out.last().server);
        if (script_.expect_server_calls_at_reject &&
            *script_.expect_server_calls_at_reject != out.server_calls_at_reject)
            out.failures.push_back("server calls at reject: expected " +
                                   std::to_string(*script_.expect_server_calls_at_reject) + ", got " +
                                   std::to_string(out.server_calls_at_reject));
        const auto& l = out.last();
        if (l.client.completed && l.server.completed && !l.keys_agree)
            out.failures.push_back("both endpoints completed with different k_sym");
    }
};

} // namespace

bool AttackOutcome::adversary_computable() const {
    return std::any_of(sessions.begin(), sessions.end(),
                       [](const SessionOutcome& s) { return s.adversary_computable; });
}

AttackOutcome run_attack(const AdversaryScript& script, const AttackWorld& world) {
    return Runner(script, world).run();
}

AttackOutcome run_attack(const AdversaryScript& script) {
    return run_attack(script, make_attack_world(script.seed));
}

// ---------------------------------------------------------------------------
// Suite

std::vector<std::string> SuiteResult::resisted() const {
    std::vector<std::string> out;
    for (const auto& p : security_properties()) {
        bool any = false, all = true;
        for (const auto& o : outcomes)
            if (o.property == p) {
                any = true;
                all = all && o.passed();
            }
        if (any && all)
            out.push_back(p);
    }
    return out;
}

bool SuiteResult::control_passed() const {
    for (const auto& o : outcomes)
        if (o.property == "control" && !o.passed())
            return false;
    return true;
}

bool SuiteResult::passed() const {
    if (outcomes.empty())
        return true;
    return std::all_of(outcomes.begin(), outcomes.end(), [](const AttackOutcome& o) { return o.passed(); }) &&
           resisted().size() == security_properties().size();
}

namespace {
std::string endpoint_cell(const EndpointOutcome& e) {
    return e.completed ? "ok" : std::string(error_name(*e.error));
}
} // namespace

std::string SuiteResult::table() const {
    std::ostringstream os;
    os << std::left << std::setw(30) << "script" << std::setw(24) << "property" << std::setw(18)
       << "client" << std::setw(18) << "server" << std::setw(12) << "adv. key" << "result\n";
    for (const auto& o : outcomes) {
        os << std::setw(30) << o.name << std::setw(24) << o.property << std::setw(18)
           << endpoint_cell(o.last().client) << std::setw(18) << endpoint_cell(o.last().server)
           << std::setw(12) << (o.adversary_computable() ? "yes" : "no")
           << (o.passed() ? "PASS" : "FAIL") << "\n";
        for (const auto& f : o.failures)
            os << "    " << f << "\n";
    }
    os << resisted().size() << "/" << security_properties().size() << " properties resisted";
    if (std::any_of(outcomes.begin(), outcomes.end(), [](const auto& o) { return o.property == "control"; }))
        os << "; control " << (control_passed() ? "behaved as expected" : "FAILED");
    os << "\n";
    return os.str();
}

std::string SuiteResult::summary_json() const {
    nlohmann::json j;
    j["passed"] = passed();
    j["resisted"] = resisted();
    j["properties"] = security_properties().size();
    j["control_passed"] = control_passed();
    auto& arr = j["scripts"] = nlohmann::json::array();
    for (const auto& o : outcomes) {
        nlohmann::json s;
        s["name"] = o.name;
        s["property"] = o.property;
        s["client"] = endpoint_cell(o.last().client);
        s["server"] = endpoint_cell(o.last().server);
        s["sessions"] = o.sessions.size();
        s["adversary_computable"] = o.adversary_computable();
        s["server_calls_at_reject"] = o.server_calls_at_reject;
        s["wire_digest"] = to_hex(o.wire_digest);
        s["passed"] = o.passed();
        s["failures"] = o.failures;
        arr.push_back(s);
    }
    return j.dump(2);
}

std::vector<std::pair<std::string, std::string>> builtin_script_texts() {
    return {
#include "builtin_attacks.inc"
    };
}

std::vector<AdversaryScript> default_suite() {
    std::vector<AdversaryScript> out;
    for (const auto& [file, text] : builtin_script_texts())
        out.push_back(parse_script(text));
    return out;
}

SuiteResult run_attack_suite(const std::vector<AdversaryScript>& scripts) {
    SuiteResult r;
    for (const auto& s : scripts)
        r.outcomes.push_back(run_attack(s));
    return r;
}

} // namespace lseg
