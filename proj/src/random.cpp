#include "lseg/random.hpp"

#include "lseg/primitives.hpp"

#include <sodium.h>

namespace lseg {

void SystemRandom::fill(std::span<uint8_t> out) { randombytes_buf(out.data(), out.size()); }

SeededRandom::SeededRandom(uint64_t seed) {
    ByteArray<32> s{};
    store_be64(s.data(), seed);
    seed_ = SecretBytes<32>(s);
}

void SeededRandom::fill(std::span<uint8_t> out) {
    Bytes material(seed_.bytes().begin(), seed_.bytes().end());
    append_be64(material, calls_++);
    SecretBytes<32> key(hash256(material));
    secure_wipe(material);
    if (!out.empty())
        randombytes_buf_deterministic(out.data(), out.size(), key.data());
}

} // namespace lseg
