#pragma once

// Scripted active adversary between one client and one server.
//
// Script format, one directive or rule per line, '#' starts a comment:
//
//   name <text>
//   property <mutual_authentication|session_key_agreement|replay|mitm|
//             forward_secrecy|insider|impersonation|dos|control>
//   sessions <n>             sequential sessions between the same endpoints
//   seed <n>
//   option <no_replay_cache|no_trust_persistence|leak_long_term_keys|
//           leak_ephemeral_keys|fault_ksym|insider>
//   expect <client|server> <ErrorName|ok>      checked on the last session
//   expect server_calls_at_reject <n>          sign+verify+dh run by the
//                                              server in rejected sessions
//   expect adversary_key <yes|no>              default no
//
//   <kind> <index|*> <c2s|s2c|any> <action> [arg]
//     kind    hello hello_ack m1 m2 eph c1 c2 app
//     index   occurrence of that kind (and direction, unless 'any') over
//             the whole run, counted from 0
//     action  pass | drop | replay <i> | tamper_byte <offset> |
//             substitute_key <rogue|insider> | delay <ms> |
//             shift_timestamp <ms>
//
// Every matching rule is applied in script order; drop ends processing of
// that message. Unmatched traffic passes.
//
// The run is single-threaded: client, server and adversary exchange owned
// frames through one FIFO, so identical scripts give identical outcomes.

#include "lseg/certs.hpp"
#include "lseg/error.hpp"
#include "lseg/handshake.hpp"
#include "lseg/wire.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lseg {

enum class DirMatch { ClientToServer, ServerToClient, Any };

enum class ActionKind { Pass, Drop, Replay, TamperByte, SubstituteKey, Delay, ShiftTimestamp };

enum class AdversaryKey { Rogue, Insider };

struct ScriptRule {
    MessageKind kind = MessageKind::Hello;
    std::optional<uint64_t> index; // nullopt matches every occurrence
    DirMatch direction = DirMatch::Any;
    ActionKind action = ActionKind::Pass;
    int64_t arg = 0;
    AdversaryKey key = AdversaryKey::Rogue;

    friend bool operator==(const ScriptRule&, const ScriptRule&) = default;
};

struct ScriptOptions {
    bool no_replay_cache = false;
    bool no_trust_persistence = false;
    bool leak_long_term_keys = false;
    bool leak_ephemeral_keys = false; // scalars read from live endpoint state
    bool fault_ksym = false;
    bool insider = false;

    friend bool operator==(const ScriptOptions&, const ScriptOptions&) = default;
};

/// nullopt means the endpoint is expected to complete.
struct EndpointExpectation {
    std::optional<Error> error;
    friend bool operator==(const EndpointExpectation&, const EndpointExpectation&) = default;
};

struct AdversaryScript {
    std::string name;
    std::string property;
    uint64_t sessions = 1;
    uint64_t seed = 1;
    ScriptOptions options;
    std::vector<ScriptRule> rules;
    std::optional<EndpointExpectation> expect_client;
    std::optional<EndpointExpectation> expect_server;
    std::optional<uint64_t> expect_server_calls_at_reject;
    bool expect_adversary_key = false;

    friend bool operator==(const AdversaryScript&, const AdversaryScript&) = default;
};

/// Throws Error::ScriptError with the offending line number.
AdversaryScript parse_script(std::string_view text);
AdversaryScript load_script(const std::filesystem::path& path);

/// The eight properties every suite must cover.
const std::vector<std::string>& security_properties();

struct EndpointOutcome {
    bool completed = false;
    std::optional<Error> error; // Timeout when the endpoint stalled
    std::optional<PartyId> peer;
    Bytes k_sym;
    bool ran_phase1 = false;

    friend bool operator==(const EndpointOutcome&, const EndpointOutcome&) = default;
};

struct SessionOutcome {
    EndpointOutcome client;
    EndpointOutcome server;
    bool keys_agree = false;         // both completed with equal k_sym
    bool adversary_computable = false;
    PrimitiveCounters server_calls;  // public-key work done by the server

    friend bool operator==(const SessionOutcome& a, const SessionOutcome& b) {
        return a.client == b.client && a.server == b.server && a.keys_agree == b.keys_agree &&
               a.adversary_computable == b.adversary_computable &&
               a.server_calls.total() == b.server_calls.total();
    }
};

struct AttackOutcome {
    std::string name;
    std::string property;
    std::vector<SessionOutcome> sessions;
    uint64_t server_calls_at_reject = 0;
    Digest wire_digest{}; // SHA-256 over every delivered frame
    std::vector<std::string> failures; // unmet expectations, human readable
    bool expect_adversary_key = false;

    const SessionOutcome& last() const { return sessions.back(); }
    bool adversary_computable() const;
    /// Expectations met, and an adversary-computable session only where the
    /// script expects one.
    bool passed() const { return failures.empty() && adversary_computable() == expect_adversary_key; }

    friend bool operator==(const AttackOutcome&, const AttackOutcome&) = default;
};

/// Everything the harness needs: a CA, the honest pair, and the adversary's
/// identities. `rogue` is certified by a CA nobody trusts; `insider` holds a
/// genuine certificate from the real CA (a compromised registered device).
struct AttackWorld {
    CertificateAuthority ca;
    HandshakeConfig client;
    HandshakeConfig server;
    CertificateAuthority rogue_ca;
    IdentityKeyPair rogue;
    Certificate rogue_cert;
    IdentityKeyPair insider;
    Certificate insider_cert;
    uint64_t epoch_ms = 0;
};

AttackWorld make_attack_world(uint64_t seed);

AttackOutcome run_attack(const AdversaryScript& script, const AttackWorld& world);
AttackOutcome run_attack(const AdversaryScript& script);

struct SuiteResult {
    std::vector<AttackOutcome> outcomes;

    /// Properties with at least one script, all of whose scripts passed.
    std::vector<std::string> resisted() const;
    bool control_passed() const;
    /// Every script passed and all eight properties are covered. An empty
    /// suite passes vacuously.
    bool passed() const;

    std::string table() const;
    std::string summary_json() const;
};

/// Built-in scripts (the same text as attacks/*.atk).
std::vector<std::pair<std::string, std::string>> builtin_script_texts();
std::vector<AdversaryScript> default_suite();

SuiteResult run_attack_suite(const std::vector<AdversaryScript>& scripts);
inline SuiteResult run_attack_suite() { return run_attack_suite(default_suite()); }

} // namespace lseg
