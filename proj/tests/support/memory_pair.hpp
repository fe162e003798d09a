#pragma once

// Drives a client and a server Handshake against each other in memory,
// passing every message through the wire codec.

#include "lseg/handshake.hpp"
#include "lseg/netsim.hpp"

#include <deque>
#include <optional>

namespace testing_pair {

using namespace lseg;

struct PumpResult {
    std::optional<Error> client_error;
    std::optional<Error> server_error;
};

/// Runs until both sides stop producing messages. `tap` may rewrite a
/// frame in flight (direction, frame) before delivery.
template <class Tap>
PumpResult pump(Handshake& client, Handshake& server, Tap&& tap) {
    struct Item {
        Direction dir;
        Bytes frame;
    };
    std::deque<Item> q;
    PumpResult r;
    server.start();
    for (auto& m : client.start())
        q.push_back({Direction::ClientToServer, encode(m)});
    while (!q.empty()) {
        Item it = std::move(q.front());
        q.pop_front();
        tap(it.dir, it.frame);
        const bool to_server = it.dir == Direction::ClientToServer;
        Handshake& dst = to_server ? server : client;
        auto& err = to_server ? r.server_error : r.client_error;
        if (err)
            continue;
        try {
            for (auto& m : dst.receive(decode(it.frame)))
                q.push_back({to_server ? Direction::ServerToClient : Direction::ClientToServer, encode(m)});
        } catch (const LsegError& e) {
            err = e.code();
        }
    }
    return r;
}

inline PumpResult pump(Handshake& client, Handshake& server) {
    return pump(client, server, [](Direction, Bytes&) {});
}

/// A CA-issued client and server with their own stores and a fixed clock.
struct World {
    AttackWorld w;
    TrustStore client_trust, server_trust;
    ReplayCache client_replay, server_replay;
    SeededRandom client_rng, server_rng;

    explicit World(uint64_t seed)
        : w(make_attack_world(seed)), client_rng(seed * 2 + 1), server_rng(seed * 2 + 2) {
        const uint64_t now = w.epoch_ms;
        w.client.clock = [now] { return now; };
        w.server.clock = [now] { return now; };
    }

    Handshake client() { return Handshake(w.client, client_trust, client_replay, client_rng); }
    Handshake server() { return Handshake(w.server, server_trust, server_replay, server_rng); }
};

} // namespace testing_pair
