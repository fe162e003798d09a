// lseg: certificate generation, client/server endpoints, benchmark, attack
// suite and vector conformance in one binary.

#include "lseg/bench.hpp"
#include "lseg/certs.hpp"
#include "lseg/channel.hpp"
#include "lseg/conformance.hpp"
#include "lseg/error.hpp"
#include "lseg/handshake.hpp"
#include "lseg/netsim.hpp"
#include "lseg/random.hpp"
#include "lseg/session.hpp"
#include "lseg/trust_store.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

using namespace lseg;

namespace {

constexpr int kUsageError = 2;
constexpr uint64_t kDayMs = 86'400'000ULL;

std::mutex g_log_mutex;

template <class... Args> void log(Args&&... args) {
    std::lock_guard lock(g_log_mutex);
    (std::cerr << ... << args) << std::endl;
}

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::filesystem::path with_extension(std::filesystem::path p, const char* ext) {
    p.replace_extension(ext);
    return p;
}

// ---------------------------------------------------------------------------
// certgen

struct CertgenArgs {
    bool ca = false;
    std::string subject_id;
    std::string ca_key;
    std::string ca_cert;
    unsigned valid_days = 365;
    std::string out;
};

int cmd_certgen(const CertgenArgs& a) {
    PartyId subject;
    try {
        subject = party_id_from_hex(a.subject_id);
    } catch (const std::invalid_argument&) {
        throw UsageError("--subject-id must be exactly 16 hex digits");
    }
    if (!a.ca && a.ca_key.empty())
        throw UsageError("leaf certificates need --ca-key (or pass --ca)");
    if (a.valid_days == 0)
        throw UsageError("--valid-days must be positive");

    SystemRandom rng;
    const ByteArray<32> seed = rng.array<32>();
    IdentityKeyPair id = derive_identity(seed);
    const uint64_t now = system_clock_ms();
    const ValidityWindow window{now - 60'000, now + uint64_t(a.valid_days) * kDayMs};

    Certificate cert;
    if (a.ca) {
        CertificateAuthority self{subject, id};
        cert = issue(self, subject, id.ed_public, window);
    } else {
        const std::filesystem::path ca_key = a.ca_key;
        const std::filesystem::path ca_cert_path =
            a.ca_cert.empty() ? with_extension(ca_key, ".lsegc") : std::filesystem::path(a.ca_cert);
        const Certificate ca_cert = load_cert(ca_cert_path);
        CertificateAuthority ca{ca_cert.subject_id, derive_identity(load_seed(ca_key))};
        if (ca.keys.ed_public != ca_cert.subject_public)
            throw UsageError("CA key does not match " + ca_cert_path.string());
        cert = issue(ca, subject, id.ed_public, window);
    }

    const std::filesystem::path out = a.out;
    save_seed(with_extension(out, ".lsegk"), seed);
    save_cert(with_extension(out, ".lsegc"), cert);
    std::cout << "wrote " << with_extension(out, ".lsegk").string() << " and "
              << with_extension(out, ".lsegc").string() << " for " << to_hex(subject)
              << (a.ca ? " (self-issued anchor)" : "") << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// server / client

struct EndpointArgs {
    std::string endpoint;
    std::string key;
    std::string cert;
    std::string anchor;
    std::string trust_store;
    uint64_t skew_ms = kDefaultClockSkewMs;
    unsigned timeout_ms = 10'000;
};

HandshakeConfig load_config(const EndpointArgs& a, Role role) {
    HandshakeConfig c;
    c.role = role;
    c.identity = derive_identity(load_seed(a.key));
    c.certificate = load_cert(a.cert);
    c.anchor = anchor_from_self_signed(load_cert(a.anchor));
    c.clock_skew_ms = a.skew_ms;
    if (c.certificate.subject_public != c.identity.ed_public)
        throw UsageError("--key does not match --cert");
    c.validate();
    return c;
}

std::unique_ptr<TrustStore> open_trust_store(const std::string& flag) {
    std::string path = flag;
    if (path.empty())
        if (const char* env = std::getenv("LSEG_TRUST_STORE"))
            path = env;
    if (path.empty())
        return std::make_unique<TrustStore>();
    return std::make_unique<TrustStore>(std::filesystem::path(path));
}

const char* phase_note(bool ran_phase1) { return ran_phase1 ? "phase 1 + phase 2" : "phase 2 only"; }

struct ServerArgs : EndpointArgs {
    bool echo = false;
    unsigned max_sessions = 0; // 0 = serve forever
};

void serve_connection(std::unique_ptr<TcpChannel> ch, unsigned n, const HandshakeConfig& config,
                      TrustStore& trust, ReplayCache& replay, bool echo, unsigned timeout_ms) {
    try {
        ch->set_timeout(std::chrono::milliseconds(timeout_ms));
        SystemRandom rng;
        HandshakeResult hs = run_handshake(config, *ch, trust, replay, rng);
        log("[conn ", n, "] session with ", to_hex(hs.keys.peer_id), ", ", phase_note(hs.ran_phase1));
        RecordCipher rc(hs.keys);
        while (auto frame = ch->receive()) {
            Message m = decode(*frame);
            const auto* app = std::get_if<AppFrame>(&m);
            if (!app)
                fail(Error::UnexpectedMessage, "expected application data");
            Bytes pt = rc.open_frame(*app);
            log("[conn ", n, "] ", pt.size(), " bytes");
            if (echo)
                ch->send(encode(rc.seal_frame(pt)));
        }
        log("[conn ", n, "] closed");
    } catch (const LsegError& e) {
        log("[conn ", n, "] error: ", e.what());
    } catch (const std::exception& e) {
        log("[conn ", n, "] error: ", e.what());
    }
}

int cmd_server(const ServerArgs& a) {
    const HandshakeConfig config = load_config(a, Role::Server);
    auto trust = open_trust_store(a.trust_store);
    ReplayCache replay(config.clock_skew_ms);

    TcpListener listener(a.endpoint);
    std::cout << "listening on port " << listener.port() << std::endl;

    std::vector<std::thread> workers;
    for (unsigned n = 1; a.max_sessions == 0 || n <= a.max_sessions; ++n) {
        auto ch = listener.accept();
        workers.emplace_back(serve_connection, std::move(ch), n, std::cref(config), std::ref(*trust),
                             std::ref(replay), a.echo, a.timeout_ms);
        if (a.max_sessions == 0)
            workers.back().detach();
    }
    for (auto& w : workers)
        if (w.joinable())
            w.join();
    return 0;
}

struct ClientArgs : EndpointArgs {
    std::string send;
};

int cmd_client(const ClientArgs& a) {
    const HandshakeConfig config = load_config(a, Role::Client);
    auto trust = open_trust_store(a.trust_store);
    ReplayCache replay(config.clock_skew_ms);
    SystemRandom rng;

    auto ch = TcpChannel::connect(a.endpoint);
    ch->set_timeout(std::chrono::milliseconds(a.timeout_ms));
    HandshakeResult hs = run_handshake(config, *ch, *trust, replay, rng);
    log("session with ", to_hex(hs.keys.peer_id), ", ", phase_note(hs.ran_phase1));

    if (!a.send.empty()) {
        RecordCipher rc(hs.keys);
        ch->send(encode(rc.seal_frame(ByteView(reinterpret_cast<const uint8_t*>(a.send.data()), a.send.size()))));
        auto frame = ch->receive();
        if (!frame)
            fail(Error::ChannelClosed, "no echo");
        Message m = decode(*frame);
        const auto* app = std::get_if<AppFrame>(&m);
        if (!app)
            fail(Error::UnexpectedMessage, "expected application data");
        Bytes pt = rc.open_frame(*app);
        std::cout << std::string(pt.begin(), pt.end()) << std::endl;
    }
    ch->close();
    return 0;
}

// ---------------------------------------------------------------------------
// bench / attacks / conformance

struct BenchArgs {
    size_t iterations = 1000;
    size_t step_iterations = 100;
    uint64_t seed = 1;
    std::string csv;
};

int cmd_bench(const BenchArgs& a) {
    if (a.iterations < 1000 || a.step_iterations < 100)
        throw UsageError("need at least 1000 primitive and 100 step iterations");
    BenchOptions o;
    o.primitive_iterations = a.iterations;
    o.step_iterations = a.step_iterations;
    o.seed = a.seed;
    BenchReport r = run_bench(o);
    std::cout << r.table();
    if (!a.csv.empty()) {
        std::ofstream out(a.csv);
        if (!(out << r.csv()))
            fail(Error::IoError, "cannot write " + a.csv);
        std::cout << "wrote " << a.csv << "\n";
    }
    return 0;
}

struct AttackArgs {
    bool list = false;
    std::vector<std::string> scripts;
    std::string dir;
    std::string summary;
};

int cmd_attacks(const AttackArgs& a) {
    std::vector<AdversaryScript> suite;
    if (a.dir.empty()) {
        suite = default_suite();
    } else {
        std::vector<std::filesystem::path> files;
        for (const auto& e : std::filesystem::directory_iterator(a.dir))
            if (e.path().extension() == ".atk")
                files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files)
            suite.push_back(load_script(f));
    }

    if (a.list) {
        for (const auto& s : suite)
            std::cout << s.name << "  (" << s.property << ")\n";
        return 0;
    }
    if (!a.scripts.empty()) {
        std::vector<AdversaryScript> chosen;
        for (const auto& name : a.scripts) {
            auto it = std::find_if(suite.begin(), suite.end(), [&](const auto& s) { return s.name == name; });
            if (it == suite.end())
                throw UsageError("unknown script '" + name + "' (see --list)");
            chosen.push_back(*it);
        }
        suite = std::move(chosen);
    }

    SuiteResult r = run_attack_suite(suite);
    std::cout << r.table();
    if (!a.summary.empty()) {
        std::ofstream out(a.summary);
        if (!(out << r.summary_json() << "\n"))
            fail(Error::IoError, "cannot write " + a.summary);
    }
    const bool ok = a.scripts.empty()
                        ? r.passed()
                        : std::all_of(r.outcomes.begin(), r.outcomes.end(), [](const auto& o) { return o.passed(); });
    return ok ? 0 : 1;
}

int cmd_conformance(const std::string& dir) {
    bool ok = true;
    for (const auto& r : run_conformance(dir)) {
        std::cout << (r.ok() ? "PASS " : "FAIL ") << r.suite << " " << r.passed << "/" << r.total << "\n";
        for (size_t i = 0; i < r.failures.size() && i < 5; ++i)
            std::cout << "    " << r.failures[i] << "\n";
        ok = ok && r.ok();
    }
    return ok ? 0 : 1;
}

void add_endpoint_flags(CLI::App* cmd, EndpointArgs& a, const char* endpoint_flag) {
    cmd->add_option(endpoint_flag, a.endpoint, "host:port")->required();
    cmd->add_option("--key", a.key, "32-byte seed file")->required();
    cmd->add_option("--cert", a.cert, "certificate file")->required();
    cmd->add_option("--anchor", a.anchor, "CA certificate (self-issued)")->required();
    cmd->add_option("--trust-store", a.trust_store, "PeerTrust file (default: $LSEG_TRUST_STORE)");
    cmd->add_option("--skew-ms", a.skew_ms, "accepted timestamp skew")->check(CLI::PositiveNumber);
    cmd->add_option("--timeout-ms", a.timeout_ms, "receive timeout")->check(CLI::PositiveNumber);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"LSEG key exchange tools"};
    app.require_subcommand(1);

    CertgenArgs certgen;
    auto* c_certgen = app.add_subcommand("certgen", "generate a key and certificate");
    c_certgen->add_flag("--ca", certgen.ca, "self-issue a trust anchor");
    c_certgen->add_option("--subject-id", certgen.subject_id, "16 hex digits")->required();
    c_certgen->add_option("--ca-key", certgen.ca_key, "CA seed file");
    c_certgen->add_option("--ca-cert", certgen.ca_cert, "CA certificate (default: next to --ca-key)");
    c_certgen->add_option("--valid-days", certgen.valid_days, "validity period");
    c_certgen->add_option("--out", certgen.out, "output prefix")->required();

    ServerArgs server;
    auto* c_server = app.add_subcommand("server", "accept connections and run the handshake");
    add_endpoint_flags(c_server, server, "--listen");
    c_server->add_flag("--echo", server.echo, "echo application frames");
    c_server->add_option("--max-sessions", server.max_sessions, "exit after this many connections");

    ClientArgs client;
    auto* c_client = app.add_subcommand("client", "connect and run the handshake");
    add_endpoint_flags(c_client, client, "--connect");
    c_client->add_option("--send", client.send, "send one frame and print the echo");

    BenchArgs bench;
    auto* c_bench = app.add_subcommand("bench", "time primitives and protocol steps");
    c_bench->add_option("-n,--iterations", bench.iterations, "primitive iterations (>= 1000)");
    c_bench->add_option("--step-iterations", bench.step_iterations, "step iterations (>= 100)");
    c_bench->add_option("--seed", bench.seed);
    c_bench->add_option("--csv", bench.csv, "write label,unit,mean,median,p95,n rows");

    AttackArgs attacks;
    auto* c_attacks = app.add_subcommand("attacks", "run the adversary scripts");
    c_attacks->add_flag("--list", attacks.list, "print script names");
    c_attacks->add_option("--script", attacks.scripts, "run only these scripts");
    c_attacks->add_option("--dir", attacks.dir, "load *.atk from this directory instead of the built-ins")
        ->check(CLI::ExistingDirectory);
    c_attacks->add_option("--summary", attacks.summary, "write a JSON summary");

    std::string vector_dir = "vectors";
    auto* c_conf = app.add_subcommand("conformance", "check the primitives against published vectors");
    c_conf->add_option("--vectors", vector_dir, "vector directory")->check(CLI::ExistingDirectory);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kUsageError;
    }

    try {
        if (*c_certgen) return cmd_certgen(certgen);
        if (*c_server) return cmd_server(server);
        if (*c_client) return cmd_client(client);
        if (*c_bench) return cmd_bench(bench);
        if (*c_attacks) return cmd_attacks(attacks);
        if (*c_conf) return cmd_conformance(vector_dir);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsageError;
    } catch (const LsegError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kUsageError;
}
