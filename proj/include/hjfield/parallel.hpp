#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace hjfield {

/// Worker bound from HJFIELD_THREADS (0 or unset = hardware concurrency).
int worker_count();

/// Overrides the environment for the rest of the process; 0 restores it.
void set_worker_count(int workers);

/// Calls body(i) for i in [0, count) split into contiguous chunks. Each index
/// is visited exactly once, so results written per index are deterministic.
/// The exception from the lowest-numbered failing chunk is rethrown.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
    const std::size_t workers = static_cast<std::size_t>(worker_count());
    if (workers <= 1 || count < 2 * workers) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = begin + chunk < count ? begin + chunk : count;
        pool.emplace_back([&, w, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace hjfield
