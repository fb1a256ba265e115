#pragma once

// Counter-based random streams.  Every draw is a pure function of
// (seed, stream, counter), so results do not depend on evaluation order or
// on how work is split across threads.  A stream identifies one logical
// random quantity (e.g. "residue mod p in trial t"); the counter moves only
// inside rejection loops.

#include "lmlab/common.hpp"

namespace lmlab {

// splitmix64 finalizer; full-avalanche 64 -> 64 bijection.
inline u64 mix64(u64 x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline u64 stream_u64(u64 seed, u64 stream, u64 counter) {
    return mix64(mix64(seed ^ 0x8e7c11d5f1f0a83bULL) + mix64(stream) + counter);
}

// Uniform draw in [0, bound) by rejection; exact, no modulo bias.
inline u64 stream_below(u64 seed, u64 stream, u64 bound) {
    // Largest multiple of bound that fits in 2^64.
    const u64 limit = std::numeric_limits<u64>::max() - std::numeric_limits<u64>::max() % bound;
    for (u64 counter = 0;; ++counter) {
        u64 r = stream_u64(seed, stream, counter);
        if (r < limit) return r % bound;
    }
}

// Stream tags.  Combining the tag into the stream id keeps draws for
// different purposes independent even at equal (trial, index).
enum class StreamKind : u64 {
    residue_mod_p = 1,
    residue_mod_p2 = 2,
    hl_sequence = 3,
    trial_scratch = 4,
};

inline u64 make_stream(StreamKind kind, u64 trial, u64 index) {
    return mix64(static_cast<u64>(kind)) ^ mix64(trial) * 0x9e3779b97f4a7c15ULL ^ index;
}

}  // namespace lmlab
