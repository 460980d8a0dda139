#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace chatelet {

inline unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

// Execution settings shared by all enumeration routines.
struct Exec {
    unsigned threads = default_threads();
    std::uint64_t budget = 100'000'000;  // max points / residues / tree nodes per call
};

// Runs body(chunk) for chunk in [0, nchunks) on up to `threads` workers. Chunks are
// claimed dynamically, so bodies must write only to per-chunk slots; callers reduce the
// slots in chunk order, which keeps results independent of the worker count.
template <class Body>
void parallel_chunks(std::size_t nchunks, unsigned threads, Body&& body) {
    threads = std::max(1u, std::min<unsigned>(threads, unsigned(std::min<std::size_t>(nchunks, 1u << 16))));
    if (threads <= 1) {
        for (std::size_t c = 0; c < nchunks; ++c) body(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::size_t error_chunk = SIZE_MAX;
    std::mutex mu;
    auto worker = [&] {
        for (;;) {
            std::size_t c = next.fetch_add(1);
            if (c >= nchunks) return;
            try {
                body(c);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (c < error_chunk) {
                    error_chunk = c;
                    error = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace chatelet
