#pragma once

// SHA-1 (FIPS 180-1). Self-contained so the library carries no crypto
// dependency; verified against the standard test vectors in the suite.

#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>

namespace qtss {

using Sha1Digest = std::array<std::uint8_t, 20>;

namespace detail {

inline std::uint32_t rotl32(std::uint32_t x, int n) { return (x << n) | (x >> (32 - n)); }

inline void sha1_block(std::uint32_t state[5], const std::uint8_t* block) {
    std::uint32_t w[80];
    for (int i = 0; i < 16; ++i) {
        w[i] = (std::uint32_t(block[4 * i]) << 24) | (std::uint32_t(block[4 * i + 1]) << 16) |
               (std::uint32_t(block[4 * i + 2]) << 8) | std::uint32_t(block[4 * i + 3]);
    }
    for (int i = 16; i < 80; ++i) w[i] = rotl32(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);

    std::uint32_t a = state[0], b = state[1], c = state[2], d = state[3], e = state[4];
    for (int i = 0; i < 80; ++i) {
        std::uint32_t f, k;
        if (i < 20) {
            f = (b & c) | (~b & d);
            k = 0x5a827999;
        } else if (i < 40) {
            f = b ^ c ^ d;
            k = 0x6ed9eba1;
        } else if (i < 60) {
            f = (b & c) | (b & d) | (c & d);
            k = 0x8f1bbcdc;
        } else {
            f = b ^ c ^ d;
            k = 0xca62c1d6;
        }
        const std::uint32_t tmp = rotl32(a, 5) + f + e + k + w[i];
        e = d;
        d = c;
        c = rotl32(b, 30);
        b = a;
        a = tmp;
    }
    state[0] += a;
    state[1] += b;
    state[2] += c;
    state[3] += d;
    state[4] += e;
}

}  // namespace detail

inline Sha1Digest sha1(std::span<const std::uint8_t> data) {
    std::uint32_t state[5] = {0x67452301, 0xefcdab89, 0x98badcfe, 0x10325476, 0xc3d2e1f0};

    std::size_t full = data.size() / 64;
    for (std::size_t i = 0; i < full; ++i) detail::sha1_block(state, data.data() + 64 * i);

    // final padded block(s): 0x80, zeros, 64-bit big-endian bit length
    std::uint8_t tail[128] = {0};
    const std::size_t rem = data.size() - 64 * full;
    if (rem > 0) std::memcpy(tail, data.data() + 64 * full, rem);
    tail[rem] = 0x80;
    const std::size_t tail_len = (rem + 9 <= 64) ? 64 : 128;
    const std::uint64_t bits = std::uint64_t(data.size()) * 8;
    for (int i = 0; i < 8; ++i) tail[tail_len - 1 - i] = std::uint8_t(bits >> (8 * i));
    detail::sha1_block(state, tail);
    if (tail_len == 128) detail::sha1_block(state, tail + 64);

    Sha1Digest out;
    for (int i = 0; i < 5; ++i) {
        out[4 * i] = std::uint8_t(state[i] >> 24);
        out[4 * i + 1] = std::uint8_t(state[i] >> 16);
        out[4 * i + 2] = std::uint8_t(state[i] >> 8);
        out[4 * i + 3] = std::uint8_t(state[i]);
    }
    return out;
}

inline Sha1Digest sha1(std::string_view s) {
    return sha1(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(s.data()),
                                              s.size()));
}

inline std::string to_hex(const Sha1Digest& digest) {
    static const char* hexdig = "0123456789abcdef";
    std::string s;
    s.reserve(40);
    for (std::uint8_t b : digest) {
        s.push_back(hexdig[b >> 4]);
        s.push_back(hexdig[b & 0xf]);
    }
    return s;
}

}  // namespace qtss
