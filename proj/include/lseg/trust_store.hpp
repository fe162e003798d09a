#pragma once

#include "lseg/certs.hpp"
#include "lseg/primitives.hpp"

#include <deque>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <utility>

namespace lseg {

/// Result of a completed authentication phase with one peer.
struct PeerTrust {
    PartyId peer_id{};
    ByteArray<32> peer_ed_public{};
    AeadKey k_init;
    uint64_t established_at = 0;
};

/// Thread-safe map of PeerTrust records, optionally persisted.
///
/// File layout: "LSEGTRS1" (8) || count (u32 BE) || count records of
///   peer_id (8) || peer_ed_public (32) || k_init (16) || established_at (u64 BE)
class TrustStore {
public:
    static constexpr size_t kRecordSize = 64;

    TrustStore() = default;

    /// Opens (or starts) a persisted store. A missing file is an empty store.
    explicit TrustStore(std::filesystem::path path);

    std::optional<PeerTrust> find(const PartyId& peer) const;
    bool contains(const PartyId& peer) const { return find(peer).has_value(); }

    /// Inserts or replaces; persists when a path is set.
    void put(const PeerTrust& trust);

    /// Returns the existing entry, or inserts `make()` atomically.
    template <class Fn> PeerTrust get_or_insert(const PartyId& peer, Fn&& make) {
        std::lock_guard lock(mutex_);
        if (auto it = entries_.find(peer); it != entries_.end())
            return it->second;
        PeerTrust t = make();
        entries_[peer] = t;
        save_locked();
        return t;
    }

    void erase(const PartyId& peer);
    size_t size() const;

    Bytes serialize() const;
    /// Replaces the contents with a serialized store; Error::Malformed on bad input.
    void load_bytes(ByteView bytes);

private:
    mutable std::mutex mutex_;
    std::map<PartyId, PeerTrust> entries_;
    std::optional<std::filesystem::path> path_;

    void save_locked() const;
    Bytes serialize_locked() const;
};

/// Recently accepted (peer, timestamp) pairs. Entries older than twice the
/// clock skew are evicted; beyond `capacity` the oldest entries go first.
class ReplayCache {
public:
    explicit ReplayCache(uint64_t skew_ms = 5000, size_t capacity = 1 << 16)
        : skew_ms_(skew_ms), capacity_(capacity) {}

    /// Disabled caches accept everything (used as a negative control).
    void set_enabled(bool on) { enabled_ = on; }
    bool enabled() const { return enabled_; }

    bool seen(const PartyId& peer, uint64_t timestamp, uint64_t now);
    void insert(const PartyId& peer, uint64_t timestamp, uint64_t now);
    size_t size() const;

private:
    mutable std::mutex mutex_;
    uint64_t skew_ms_;
    size_t capacity_;
    bool enabled_ = true;
    std::set<std::pair<PartyId, uint64_t>> entries_;
    std::deque<std::pair<PartyId, uint64_t>> order_;

    void evict_locked(uint64_t now);
};

} // namespace lseg
