#include "lseg/field.hpp"

namespace lseg {

namespace {
constexpr uint64_t kMask51 = (uint64_t(1) << 51) - 1;
using u128 = unsigned __int128;

uint64_t load_le64(const uint8_t* p) {
    uint64_t v = 0;
    for (int i = 7; i >= 0; --i)
        v = (v << 8) | p[i];
    return v;
}
} // namespace

FieldElement FieldElement::from_u64(uint64_t v) {
    FieldElement r;
    r.limb_[0] = v & kMask51;
    r.limb_[1] = v >> 51;
    return r;
}

FieldElement FieldElement::from_bytes(const ByteArray<32>& in) {
    uint64_t w0 = load_le64(in.data());
    uint64_t w1 = load_le64(in.data() + 8);
    uint64_t w2 = load_le64(in.data() + 16);
    uint64_t w3 = load_le64(in.data() + 24);

    FieldElement r;
    r.limb_[0] = w0 & kMask51;
    r.limb_[1] = ((w0 >> 51) | (w1 << 13)) & kMask51;
    r.limb_[2] = ((w1 >> 38) | (w2 << 26)) & kMask51;
    r.limb_[3] = ((w2 >> 25) | (w3 << 39)) & kMask51;
    r.limb_[4] = (w3 >> 12) & kMask51;
    // bit 255
    r.limb_[0] += 19 * (w3 >> 63);
    r.carry();
    return r;
}

void FieldElement::carry() {
    for (int i = 0; i < 4; ++i) {
        limb_[i + 1] += limb_[i] >> 51;
        limb_[i] &= kMask51;
    }
    limb_[0] += 19 * (limb_[4] >> 51);
    limb_[4] &= kMask51;
    limb_[1] += limb_[0] >> 51;
    limb_[0] &= kMask51;
}

ByteArray<32> FieldElement::to_bytes() const {
    FieldElement t = *this;
    t.carry();
    t.carry();
    for (int i = 0; i < 4; ++i) {
        t.limb_[i + 1] += t.limb_[i] >> 51;
        t.limb_[i] &= kMask51;
    }
    // Limbs 0..3 are now < 2^51 and t < 2p; subtract p once if t >= p, branch-free.
    // q = 1 iff t + 19 >= 2^255.
    uint64_t q = (t.limb_[0] + 19) >> 51;
    q = (t.limb_[1] + q) >> 51;
    q = (t.limb_[2] + q) >> 51;
    q = (t.limb_[3] + q) >> 51;
    q = (t.limb_[4] + q) >> 51;

    t.limb_[0] += 19 * q;
    for (int i = 0; i < 4; ++i) {
        t.limb_[i + 1] += t.limb_[i] >> 51;
        t.limb_[i] &= kMask51;
    }
    t.limb_[4] &= kMask51;

    uint64_t w0 = t.limb_[0] | (t.limb_[1] << 51);
    uint64_t w1 = (t.limb_[1] >> 13) | (t.limb_[2] << 38);
    uint64_t w2 = (t.limb_[2] >> 26) | (t.limb_[3] << 25);
    uint64_t w3 = (t.limb_[3] >> 39) | (t.limb_[4] << 12);

    ByteArray<32> out;
    const uint64_t words[4] = {w0, w1, w2, w3};
    for (int w = 0; w < 4; ++w)
        for (int i = 0; i < 8; ++i)
            out[8 * w + i] = uint8_t(words[w] >> (8 * i));
    return out;
}

bool FieldElement::is_zero() const {
    auto b = to_bytes();
    uint8_t acc = 0;
    for (uint8_t x : b)
        acc |= x;
    return acc == 0;
}

FieldElement operator+(const FieldElement& a, const FieldElement& b) {
    FieldElement r;
    for (int i = 0; i < 5; ++i)
        r.limb_[i] = a.limb_[i] + b.limb_[i];
    r.carry();
    return r;
}

FieldElement operator-(const FieldElement& a, const FieldElement& b) {
    // Add 4p before subtracting so no limb underflows (inputs are carried,
    // hence each limb < 2^52).
    constexpr uint64_t k4p0 = 0x1FFFFFFFFFFFB4ULL; // 4 * (2^51 - 19)
    constexpr uint64_t k4pi = 0x1FFFFFFFFFFFFCULL; // 4 * (2^51 - 1)
    FieldElement r;
    r.limb_[0] = a.limb_[0] + k4p0 - b.limb_[0];
    for (int i = 1; i < 5; ++i)
        r.limb_[i] = a.limb_[i] + k4pi - b.limb_[i];
    r.carry();
    return r;
}

FieldElement operator*(const FieldElement& a, const FieldElement& b) {
    const auto& x = a.limb_;
    const auto& y = b.limb_;
    const uint64_t y1_19 = 19 * y[1], y2_19 = 19 * y[2], y3_19 = 19 * y[3], y4_19 = 19 * y[4];

    u128 t0 = u128(x[0]) * y[0] + u128(x[1]) * y4_19 + u128(x[2]) * y3_19 + u128(x[3]) * y2_19 +
              u128(x[4]) * y1_19;
    u128 t1 = u128(x[0]) * y[1] + u128(x[1]) * y[0] + u128(x[2]) * y4_19 + u128(x[3]) * y3_19 +
              u128(x[4]) * y2_19;
    u128 t2 = u128(x[0]) * y[2] + u128(x[1]) * y[1] + u128(x[2]) * y[0] + u128(x[3]) * y4_19 +
              u128(x[4]) * y3_19;
    u128 t3 = u128(x[0]) * y[3] + u128(x[1]) * y[2] + u128(x[2]) * y[1] + u128(x[3]) * y[0] +
              u128(x[4]) * y4_19;
    u128 t4 = u128(x[0]) * y[4] + u128(x[1]) * y[3] + u128(x[2]) * y[2] + u128(x[3]) * y[1] +
              u128(x[4]) * y[0];

    FieldElement r;
    t1 += uint64_t(t0 >> 51);
    r.limb_[0] = uint64_t(t0) & kMask51;
    t2 += uint64_t(t1 >> 51);
    r.limb_[1] = uint64_t(t1) & kMask51;
    t3 += uint64_t(t2 >> 51);
    r.limb_[2] = uint64_t(t2) & kMask51;
    t4 += uint64_t(t3 >> 51);
    r.limb_[3] = uint64_t(t3) & kMask51;
    r.limb_[0] += 19 * uint64_t(t4 >> 51);
    r.limb_[4] = uint64_t(t4) & kMask51;
    r.limb_[1] += r.limb_[0] >> 51;
    r.limb_[0] &= kMask51;
    return r;
}

bool operator==(const FieldElement& a, const FieldElement& b) {
    return equal_ct(a.to_bytes(), b.to_bytes());
}

FieldElement FieldElement::pow_p_minus_2() const {
    // p - 2 = 2^255 - 21: bits 254..5 are all set, low five bits are 01011.
    FieldElement result = one();
    for (int bit = 254; bit >= 0; --bit) {
        result = result.square();
        bool set = bit >= 5 || ((0x0B >> bit) & 1);
        if (set)
            result = result * *this;
    }
    return result;
}

FieldElement field_minus_one() { return FieldElement::zero() - FieldElement::one(); }

} // namespace lseg
