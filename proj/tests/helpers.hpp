#pragma once

#include <cstdint>
#include <cstdlib>
#include <string>

namespace testutil {

// 64-bit FNV-1a; fixture texts are pinned by (length, checksum) pairs.
inline uint64_t fnv1a(const std::string& s) {
    uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string env_or(const char* name, const std::string& fallback = {}) {
    const char* v = std::getenv(name);
    return v && *v ? std::string(v) : fallback;
}

}  // namespace testutil
