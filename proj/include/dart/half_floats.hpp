#pragma once

#include <bit>
#include <cstdint>

namespace dart {

// fp16/bf16 <-> fp32 bit conversions, round-to-nearest-even on the way down.

inline float f16_to_f32(uint16_t h) {
    uint32_t sign = uint32_t(h & 0x8000u) << 16;
    uint32_t exp = (h >> 10) & 0x1Fu;
    uint32_t mant = h & 0x3FFu;
    uint32_t bits;
    if (exp == 0) {
        if (mant == 0) {
            bits = sign;
        } else {
            // subnormal half: renormalize into the f32 exponent range.
            // mant * 2^-24 == (1 + frac/1024) * 2^(-14 - shift) once bit 10
            // is shifted into place.
            int shift = 0;
            while (!(mant & 0x400u)) {
                mant <<= 1;
                ++shift;
            }
            mant &= 0x3FFu;
            bits = sign | uint32_t(127 - 14 - shift) << 23 | (mant << 13);
        }
    } else if (exp == 0x1F) {
        bits = sign | 0x7F800000u | (mant << 13);
    } else {
        bits = sign | ((exp - 15 + 127) << 23) | (mant << 13);
    }
    return std::bit_cast<float>(bits);
}

inline uint16_t f32_to_f16(float f) {
    uint32_t x = std::bit_cast<uint32_t>(f);
    uint16_t sign = uint16_t((x >> 16) & 0x8000u);
    uint32_t mant = x & 0x007FFFFFu;
    int32_t exp = int32_t((x >> 23) & 0xFFu);
    if (exp == 0xFF) {  // inf or nan
        return uint16_t(sign | 0x7C00u | (mant ? 0x0200u | (mant >> 13) : 0u));
    }
    int32_t hexp = exp - 127 + 15;
    if (hexp >= 0x1F) return uint16_t(sign | 0x7C00u);  // overflow -> inf
    if (hexp <= 0) {
        if (hexp < -10) return sign;  // magnitude below half the smallest subnormal
        mant |= 0x00800000u;
        uint32_t shift = uint32_t(14 - hexp);  // 14..24
        uint16_t half = uint16_t(mant >> shift);
        uint32_t rem = mant & ((1u << shift) - 1);
        uint32_t halfway = 1u << (shift - 1);
        if (rem > halfway || (rem == halfway && (half & 1))) ++half;
        return uint16_t(sign | half);
    }
    uint16_t half = uint16_t(sign | (hexp << 10) | (mant >> 13));
    uint32_t rem = mant & 0x1FFFu;
    // rounding carry may overflow into the exponent; that is the correct
    // behavior (e.g. values just under 65520 round to inf)
    if (rem > 0x1000u || (rem == 0x1000u && (half & 1))) ++half;
    return half;
}

inline float bf16_to_f32(uint16_t b) {
    return std::bit_cast<float>(uint32_t(b) << 16);
}

inline uint16_t f32_to_bf16(float f) {
    uint32_t x = std::bit_cast<uint32_t>(f);
    if ((x & 0x7FFFFFFFu) > 0x7F800000u) {
        return uint16_t((x >> 16) | 0x0040u);  // keep nan quiet
    }
    uint32_t rounding = 0x7FFFu + ((x >> 16) & 1u);
    return uint16_t((x + rounding) >> 16);
}

}  // namespace dart
