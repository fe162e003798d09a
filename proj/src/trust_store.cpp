#include "lseg/trust_store.hpp"

#include "lseg/error.hpp"

#include <cstring>
#include <fstream>
#include <iterator>

namespace lseg {

namespace {
constexpr char kMagic[8] = {'L', 'S', 'E', 'G', 'T', 'R', 'S', '1'};
}

TrustStore::TrustStore(std::filesystem::path path) : path_(std::move(path)) {
    std::ifstream in(*path_, std::ios::binary);
    if (!in)
        return;
    Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    load_bytes(bytes);
}

std::optional<PeerTrust> TrustStore::find(const PartyId& peer) const {
    std::lock_guard lock(mutex_);
    if (auto it = entries_.find(peer); it != entries_.end())
        return it->second;
    return std::nullopt;
}

void TrustStore::put(const PeerTrust& trust) {
    std::lock_guard lock(mutex_);
    entries_[trust.peer_id] = trust;
    save_locked();
}

void TrustStore::erase(const PartyId& peer) {
    std::lock_guard lock(mutex_);
    entries_.erase(peer);
    save_locked();
}

size_t TrustStore::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

Bytes TrustStore::serialize() const {
    std::lock_guard lock(mutex_);
    return serialize_locked();
}

Bytes TrustStore::serialize_locked() const {
    Bytes out(kMagic, kMagic + 8);
    uint32_t n = uint32_t(entries_.size());
    for (int i = 3; i >= 0; --i)
        out.push_back(uint8_t(n >> (8 * i)));
    for (const auto& [id, t] : entries_) {
        out.insert(out.end(), t.peer_id.begin(), t.peer_id.end());
        out.insert(out.end(), t.peer_ed_public.begin(), t.peer_ed_public.end());
        out.insert(out.end(), t.k_init.bytes().begin(), t.k_init.bytes().end());
        append_be64(out, t.established_at);
    }
    return out;
}

void TrustStore::load_bytes(ByteView b) {
    if (b.size() < 12 || std::memcmp(b.data(), kMagic, 8) != 0)
        fail(Error::Malformed, "trust store header");
    uint32_t n = (uint32_t(b[8]) << 24) | (uint32_t(b[9]) << 16) | (uint32_t(b[10]) << 8) | b[11];
    if (b.size() != 12 + size_t(n) * kRecordSize)
        fail(Error::Malformed, "trust store length");
    std::lock_guard lock(mutex_);
    entries_.clear();
    const uint8_t* p = b.data() + 12;
    for (uint32_t i = 0; i < n; ++i, p += kRecordSize) {
        PeerTrust t;
        std::memcpy(t.peer_id.data(), p, 8);
        std::memcpy(t.peer_ed_public.data(), p + 8, 32);
        std::memcpy(t.k_init.data(), p + 40, 16);
        t.established_at = load_be64(p + 56);
        entries_[t.peer_id] = t;
    }
}

void TrustStore::save_locked() const {
    if (!path_)
        return;
    Bytes bytes = serialize_locked();
    auto tmp = *path_;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out.write(reinterpret_cast<const char*>(bytes.data()), bytes.size()))
            fail(Error::IoError, "cannot write " + tmp.string());
    }
    std::filesystem::permissions(tmp, std::filesystem::perms::owner_read |
                                          std::filesystem::perms::owner_write);
    std::filesystem::rename(tmp, *path_);
    secure_wipe(bytes);
}

bool ReplayCache::seen(const PartyId& peer, uint64_t timestamp, uint64_t now) {
    if (!enabled_)
        return false;
    std::lock_guard lock(mutex_);
    evict_locked(now);
    return entries_.count({peer, timestamp}) != 0;
}

void ReplayCache::insert(const PartyId& peer, uint64_t timestamp, uint64_t now) {
    if (!enabled_)
        return;
    std::lock_guard lock(mutex_);
    evict_locked(now);
    if (entries_.insert({peer, timestamp}).second)
        order_.push_back({peer, timestamp});
    while (entries_.size() > capacity_) {
        entries_.erase(order_.front());
        order_.pop_front();
    }
}

size_t ReplayCache::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

void ReplayCache::evict_locked(uint64_t now) {
    // Insertion order tracks acceptance time closely enough: an accepted
    // timestamp is within skew of the clock at insertion.
    const uint64_t horizon = 2 * skew_ms_;
    while (!order_.empty() && now > order_.front().second &&
           now - order_.front().second > horizon) {
        entries_.erase(order_.front());
        order_.pop_front();
    }
}

} // namespace lseg
