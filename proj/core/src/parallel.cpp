// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#include "gsim/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace gsim {

namespace {
std::atomic<int> g_threads{0};
thread_local bool g_in_worker = false;

int default_threads() {
    if (const char* env = std::getenv("GSIM_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}
}  // namespace

void set_thread_count(int threads) { g_threads.store(threads); }

int thread_count() {
    const int n = g_threads.load();
    return n > 0 ? n : default_threads();
}

void parallel_for_chunks(std::size_t n,
                         const std::function<void(std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n);
    // Nested calls run inline; only the outermost loop fans out.
    if (workers <= 1 || g_in_worker) {
        fn(0, n);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end] {
            g_in_worker = true;
            fn(begin, end);
        });
    }
    for (auto& t : pool) t.join();
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    parallel_for_chunks(n, [&fn](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) fn(i);
    });
}

}  // namespace gsim
