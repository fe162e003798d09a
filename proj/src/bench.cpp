#include "lseg/bench.hpp"

#include "lseg/certs.hpp"
#include "lseg/handshake.hpp"
#include "lseg/netsim.hpp"
#include "lseg/random.hpp"
#include "lseg/trust_store.hpp"
#include "lseg/wire.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace lseg {

BenchRow summarize(std::string label, std::vector<double> samples, std::string unit) {
    BenchRow r;
    r.label = std::move(label);
    r.unit = std::move(unit);
    r.n = samples.size();
    if (samples.empty())
        return r;
    std::sort(samples.begin(), samples.end());
    r.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / double(samples.size());
    const size_t mid = samples.size() / 2;
    r.median = samples.size() % 2 ? samples[mid] : (samples[mid - 1] + samples[mid]) / 2;
    const size_t rank = (95 * samples.size() + 99) / 100; // nearest rank
    r.p95 = samples[std::max<size_t>(rank, 1) - 1];
    return r;
}

const std::vector<std::string>& primitive_labels() {
    static const std::vector<std::string> labels = {
        "certificate_generation", "certificate_verification", "ecdh_key_generation",
        "birational_mapping",     "hashing",                  "aead_encrypt",
        "aead_decrypt",
    };
    return labels;
}

const BenchRow* BenchReport::primitive(const std::string& label) const {
    for (const auto& r : primitives)
        if (r.label == label)
            return &r;
    return nullptr;
}

const StepRow* BenchReport::step(const std::string& label) const {
    for (const auto& r : steps)
        if (r.label == label)
            return &r;
    return nullptr;
}

namespace {

using SteadyClock = std::chrono::steady_clock;

double micros(SteadyClock::duration d) { return std::chrono::duration<double, std::micro>(d).count(); }

volatile uint8_t g_sink;

template <class T> void keep(const T& bytes) {
    if (!bytes.empty())
        g_sink = bytes[0];
}

/// Runs `setup(i)` untimed and `body(state)` timed; body returns the
/// number of microseconds to record (so it can time several segments).
template <class Fn> std::vector<double> sample(size_t warmup, size_t n, Fn&& fn) {
    for (size_t i = 0; i < warmup; ++i)
        fn(i);
    std::vector<double> out;
    out.reserve(n);
    for (size_t i = 0; i < n; ++i)
        out.push_back(fn(warmup + i));
    return out;
}

template <class Fn> double timed(Fn&& fn) {
    auto t0 = SteadyClock::now();
    fn();
    return micros(SteadyClock::now() - t0);
}

PartyId bench_id(uint64_t i) {
    PartyId id;
    store_be64(id.data(), 0xBE00000000000000ULL | i);
    return id;
}

void write_row(std::ostringstream& os, const BenchRow& r, const std::string& label) {
    os << label << "," << r.unit << "," << std::fixed << std::setprecision(3) << r.mean << ","
       << r.median << "," << r.p95 << "," << r.n << "\n";
}

} // namespace

BenchReport run_bench(const BenchOptions& opt) {
    const AttackWorld world = make_attack_world(opt.seed);
    SeededRandom rng(opt.seed + 100);
    const uint64_t now0 = world.epoch_ms;
    const ValidityWindow window{now0 - 86'400'000ULL, now0 + 86'400'000ULL};
    const auto& ca = world.ca;
    const TrustAnchor anchor = ca.anchor();
    const size_t np = opt.primitive_iterations;
    const size_t ns = opt.step_iterations;
    const size_t w = opt.warmup;

    BenchReport report;

    // ----- primitives ---------------------------------------------------
    Certificate sample_cert = world.client.certificate;
    const auto sample_enc = encode_cert(sample_cert);
    const ByteArray<32> peer_x = world.server.identity.x_public;
    const AeadKey aead_key(rng.array<16>());
    const AeadNonce aead_nonce = rng.array<16>();
    const ByteArray<16> ad = associated_data(world.client.id(), world.server.id());
    const ByteArray<32> aead_pt = rng.array<32>();
    const Bytes aead_ct = aead_seal(aead_key, aead_nonce, ad, aead_pt);

    std::vector<std::vector<double>> prim(7);
    prim[0] = sample(w, np, [&](size_t i) {
        return timed([&] {
            IdentityKeyPair id = derive_identity(rng.array<32>());
            auto enc = encode_cert(issue(ca, bench_id(i), id.ed_public, window));
            keep(enc);
        });
    });
    prim[1] = sample(w, np, [&](size_t) {
        return timed([&] {
            if (check_cert(decode_cert(sample_enc), anchor, now0) != CertStatus::Ok)
                throw std::logic_error("bench certificate failed verification");
        });
    });
    prim[2] = sample(w, np, [&](size_t) {
        return timed([&] {
            SecretBytes<32> s;
            rng.fill(s.mutable_bytes());
            clamp_scalar(s.mutable_bytes());
            keep(x25519_public(s));
            keep(dh(s, peer_x));
        });
    });
    std::vector<ByteArray<32>> us(w + np);
    for (auto& u : us)
        u = rng.array<32>();
    prim[3] = sample(w, np, [&](size_t i) {
        return timed([&] { keep(mont_to_edwards(MontgomeryU::decode(us[i])).encode()); });
    });
    const ByteArray<16> hash_in = rng.array<16>();
    prim[4] = sample(w, np, [&](size_t) { return timed([&] { keep(hash256(hash_in)); }); });
    prim[5] = sample(w, np, [&](size_t) {
        return timed([&] { keep(aead_seal(aead_key, aead_nonce, ad, aead_pt)); });
    });
    prim[6] = sample(w, np, [&](size_t) {
        return timed([&] { keep(aead_open(aead_key, aead_nonce, ad, aead_ct)); });
    });
    for (size_t i = 0; i < prim.size(); ++i)
        report.primitives.push_back(summarize(primitive_labels()[i], std::move(prim[i])));

    // ----- protocol steps -----------------------------------------------
    HandshakeConfig client = world.client;
    HandshakeConfig server = world.server;
    ReplayCache client_cache(client.clock_skew_ms), server_cache(server.clock_skew_ms);
    const PartyId cid = client.id(), sid = server.id();

    PeerTrust client_trust{sid, server.identity.ed_public,
                           derive_initial_key(client.identity, server.identity.ed_public,
                                              client.identity.x_public, server.identity.x_public),
                           now0};
    PeerTrust server_trust{cid, client.identity.ed_public, client_trust.k_init, now0};

    // Step 1: certificate generation, m1/m2 creation and verification.
    auto step1_client = sample(w, ns, [&](size_t i) {
        const uint64_t now = now0 + i;
        const Bytes m2 = encode(make_m2(server, now));
        return timed([&] {
            HandshakeConfig me = client;
            me.identity = derive_identity(rng.array<32>());
            me.certificate = issue(ca, cid, me.identity.ed_public, window);
            keep(encode(make_m1(me, now)));
            Message in = decode(m2);
            check_auth_msg(std::get<Msg2>(in), anchor, now, client.clock_skew_ms, client_cache);
        });
    });
    auto step1_server = sample(w, ns, [&](size_t i) {
        const uint64_t now = now0 + i;
        const Bytes m1 = encode(make_m1(client, now));
        return timed([&] {
            HandshakeConfig me = server;
            me.identity = derive_identity(rng.array<32>());
            me.certificate = issue(ca, sid, me.identity.ed_public, window);
            Message in = decode(m1);
            check_auth_msg(std::get<Msg1>(in), anchor, now, server.clock_skew_ms, server_cache);
            keep(encode(make_m2(me, now)));
        });
    });

    // Step 2: static ECDH, reprojection, concatenation, HKDF.
    auto step2_client = sample(w, ns, [&](size_t) {
        return timed([&] {
            keep(derive_initial_key(client.identity, server.identity.ed_public, client.identity.x_public,
                                    server.identity.x_public).bytes());
        });
    });
    auto step2_server = sample(w, ns, [&](size_t) {
        return timed([&] {
            keep(derive_initial_key(server.identity, client.identity.ed_public, client.identity.x_public,
                                    server.identity.x_public).bytes());
        });
    });

    // Step 3: ephemeral key pair, sealed exchange, ECDHE.
    auto step3_client = sample(w, ns, [&](size_t) {
        const Bytes e2 = encode(start_phase2(server_trust, server, rng).second);
        return timed([&] {
            auto [st, e1] = start_phase2(client_trust, client, rng);
            keep(encode(e1));
            Message in = decode(e2);
            keep(accept_eph(st, std::get<MsgEph>(in), client_trust, client).bytes());
        });
    });
    auto step3_server = sample(w, ns, [&](size_t) {
        const Bytes e1 = encode(start_phase2(client_trust, client, rng).second);
        return timed([&] {
            Message in = decode(e1);
            auto [st, e2] = start_phase2(server_trust, server, rng);
            keep(accept_eph(st, std::get<MsgEph>(in), server_trust, server).bytes());
            keep(encode(e2));
        });
    });

    // Step 4: nonce challenge, k_sym, confirmation hash.
    const AeadKey k_eph(rng.array<16>());
    auto step4_client = sample(w, ns, [&](size_t) {
        std::optional<std::pair<MsgC1, SecretBytes<16>>> c1;
        double t = timed([&] {
            c1 = client_key_exchange(k_eph, cid, sid, rng);
            keep(encode(c1->first));
        });
        const Bytes c2 = encode(server_key_exchange(k_eph, cid, sid, c1->first, rng).first);
        t += timed([&] {
            Message in = decode(c2);
            keep(client_finish(k_eph, c1->second, cid, sid, std::get<MsgC2>(in)).k_sym.bytes());
        });
        return t;
    });
    auto step4_server = sample(w, ns, [&](size_t) {
        const Bytes c1 = encode(client_key_exchange(k_eph, cid, sid, rng).first);
        return timed([&] {
            Message in = decode(c1);
            keep(encode(server_key_exchange(k_eph, cid, sid, std::get<MsgC1>(in), rng).first));
        });
    });

    auto add_step = [&](const char* label, std::vector<double> c, std::vector<double> s) {
        report.steps.push_back({label, summarize(label, std::move(c)), summarize(label, std::move(s))});
    };
    add_step("step1", std::move(step1_client), std::move(step1_server));
    add_step("step2", std::move(step2_client), std::move(step2_server));
    add_step("step3", std::move(step3_client), std::move(step3_server));
    add_step("step4", std::move(step4_client), std::move(step4_server));

    // ----- whole handshake, client-side time -------------------------------
    Transcript first_contact;
    auto full = sample(w, ns, [&](size_t i) {
        HandshakeConfig c = client, s = server;
        const uint64_t now = now0 + 1'000'000 + i;
        c.clock = s.clock = [now] { return now; };
        TrustStore ct, st;
        ReplayCache cc(c.clock_skew_ms), sc(s.clock_skew_ms);
        Handshake hc(c, ct, cc, rng), hs(s, st, sc, rng);
        hs.start();
        double t = 0;
        std::vector<Message> to_server, to_client;
        t += timed([&] { to_server = hc.start(); });
        while (!to_server.empty() || !to_client.empty()) {
            std::vector<Message> next_to_client;
            for (const auto& m : to_server) {
                auto r = hs.receive(decode(encode(m)));
                next_to_client.insert(next_to_client.end(), r.begin(), r.end());
            }
            to_server.clear();
            for (const auto& m : to_client) {
                t += timed([&] {
                    auto r = hc.receive(decode(encode(m)));
                    to_server.insert(to_server.end(), r.begin(), r.end());
                });
            }
            to_client = std::move(next_to_client);
        }
        if (!hc.complete() || !hs.complete())
            throw std::logic_error("bench handshake did not complete");
        first_contact = hc.transcript();
        return t;
    });
    report.client_handshake = summarize("client_handshake", std::move(full));

    auto& cost = report.cost;
    cost.phase1_payload_bits = payload_bits(first_contact, 1);
    cost.phase2_payload_bits = payload_bits(first_contact, 2);
    cost.phase1_wire_bits = wire_bits(first_contact, 1);
    cost.phase2_wire_bits = wire_bits(first_contact, 2);
    for (const auto& e : first_contact.entries())
        cost.phase2_messages += phase_of(e.kind) == 2;
    cost.key_exchange_messages = key_exchange_messages(first_contact);
    return report;
}

std::string BenchReport::csv() const {
    std::ostringstream os;
    os << "label,unit,mean,median,p95,n\n";
    for (const auto& r : primitives)
        write_row(os, r, r.label);
    for (const auto& s : steps) {
        write_row(os, s.client, s.label + "_client");
        write_row(os, s.server, s.label + "_server");
    }
    write_row(os, client_handshake, client_handshake.label);
    auto bits = [&](const char* label, uint64_t v) {
        BenchRow r{label, "bits", double(v), double(v), double(v), 1};
        write_row(os, r, label);
    };
    bits("phase1_payload", cost.phase1_payload_bits);
    bits("phase2_payload", cost.phase2_payload_bits);
    bits("phase1_wire", cost.phase1_wire_bits);
    bits("phase2_wire", cost.phase2_wire_bits);
    return os.str();
}

std::string BenchReport::table() const {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2);
    os << std::left << std::setw(28) << "primitive" << std::right << std::setw(12) << "mean us"
       << std::setw(12) << "median" << std::setw(12) << "p95" << std::setw(8) << "n" << "\n";
    for (const auto& r : primitives)
        os << std::left << std::setw(28) << r.label << std::right << std::setw(12) << r.mean
           << std::setw(12) << r.median << std::setw(12) << r.p95 << std::setw(8) << r.n << "\n";
    os << "\n" << std::left << std::setw(28) << "step" << std::right << std::setw(12) << "client us"
       << std::setw(12) << "server us" << std::setw(8) << "n" << "\n";
    for (const auto& s : steps)
        os << std::left << std::setw(28) << s.label << std::right << std::setw(12) << s.client.mean
           << std::setw(12) << s.server.mean << std::setw(8) << s.client.n << "\n";
    os << "\nclient-side handshake (phase 1 + 2): mean " << client_handshake.mean << " us, p95 "
       << client_handshake.p95 << " us\n";
    os << "\ncommunication cost     payload bits   wire bits\n";
    os << "  phase 1              " << std::setw(12) << cost.phase1_payload_bits << std::setw(12)
       << cost.phase1_wire_bits << "\n";
    os << "  phase 2              " << std::setw(12) << cost.phase2_payload_bits << std::setw(12)
       << cost.phase2_wire_bits << "\n";
    os << "  phase 2 messages " << cost.phase2_messages << ", after the ephemeral exchange "
       << cost.key_exchange_messages << "\n";
    return os.str();
}

} // namespace lseg
