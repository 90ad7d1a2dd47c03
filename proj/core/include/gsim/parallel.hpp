// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace gsim {

// Worker count used by parallel_for. 0 means "use the default", which is
// GSIM_THREADS from the environment, else std::thread::hardware_concurrency().
void set_thread_count(int threads);
int thread_count();

// Runs fn(i) for i in [0, n). Indices are split into contiguous chunks, one
// per worker, so results must be written to per-index slots only; under that
// contract the output is identical for any thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// Chunked variant: fn(begin, end) per contiguous range, fewer dispatches.
void parallel_for_chunks(std::size_t n,
                         const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace gsim
