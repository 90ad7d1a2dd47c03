// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <string>

#include "gsim/image.hpp"

namespace gsim {

// FNV-1a 64-bit.
inline std::uint64_t hash_bytes(const void* data, std::size_t size,
                                std::uint64_t seed = 1469598103934665603ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

// Canonical image hash over dimensions and raw float bits; deliberately not a
// file-level hash so encoder settings cannot affect determinism checks.
template <int C>
std::uint64_t hash_image(const Image<C>& image, std::uint64_t seed = 1469598103934665603ull) {
    const std::int32_t dims[2] = {image.width, image.height};
    std::uint64_t h = hash_bytes(dims, sizeof(dims), seed);
    return hash_bytes(image.data.data(), image.data.size() * sizeof(float), h);
}

inline std::uint64_t hash_target(const RenderTarget& t,
                                 std::uint64_t seed = 1469598103934665603ull) {
    std::uint64_t h = hash_image(t.rgb, seed);
    h = hash_image(t.depth, h);
    return hash_image(t.accum_alpha, h);
}

inline std::string to_hex(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

}  // namespace gsim
