#pragma once

// Deterministic block-parallel helper.  Work is cut into fixed blocks that do
// not depend on the worker count; callers merge per-block results in block
// order, so output is identical for any parallelism degree.

#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "lmlab/common.hpp"

namespace lmlab {

// Invokes fn(block_index, begin, end) for consecutive [begin, end) slices of
// [0, n).  Blocks are distributed round-robin over `degree` threads; fn must
// write only to its own block's slot.  The first exception thrown by any
// block is rethrown after all workers join.
inline void parallel_blocks(u64 n, u64 block_size, unsigned degree,
                            const std::function<void(u64, u64, u64)>& fn) {
    if (n == 0) return;
    if (block_size == 0) block_size = 1;
    const u64 nblocks = (n + block_size - 1) / block_size;
    if (degree <= 1 || nblocks == 1) {
        for (u64 b = 0; b < nblocks; ++b)
            fn(b, b * block_size, std::min(n, (b + 1) * block_size));
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(degree);
    std::mutex error_mutex;
    std::exception_ptr error;
    for (unsigned t = 0; t < degree; ++t) {
        workers.emplace_back([&, t] {
            try {
                for (u64 b = t; b < nblocks; b += degree)
                    fn(b, b * block_size, std::min(n, (b + 1) * block_size));
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    if (error) std::rethrow_exception(error);
}

inline u64 block_count(u64 n, u64 block_size) {
    return n == 0 ? 0 : (n + block_size - 1) / block_size;
}

}  // namespace lmlab
