#pragma once

#include "lseg/bytes.hpp"

namespace lseg {

/// Source of key material, nonces and ephemeral scalars. Production code
/// uses SystemRandom; tests and the attack harness use SeededRandom so
/// runs are reproducible.
class RandomSource {
public:
    virtual ~RandomSource() = default;
    virtual void fill(std::span<uint8_t> out) = 0;

    template <size_t N> ByteArray<N> array() {
        ByteArray<N> a;
        fill(a);
        return a;
    }
};

class SystemRandom final : public RandomSource {
public:
    void fill(std::span<uint8_t> out) override;
};

/// Deterministic stream: each fill() call draws from ChaCha20 keyed by
/// SHA-256(seed || call counter).
class SeededRandom final : public RandomSource {
public:
    explicit SeededRandom(uint64_t seed);
    explicit SeededRandom(const ByteArray<32>& seed) : seed_(seed) {}

    void fill(std::span<uint8_t> out) override;

private:
    SecretBytes<32> seed_;
    uint64_t calls_ = 0;
};

} // namespace lseg
