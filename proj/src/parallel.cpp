#include "hjfield/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace hjfield {

namespace {
std::atomic<int> g_override{0};
}

int worker_count() {
    if (const int forced = g_override.load(); forced > 0) return forced;
    int requested = 0;
    if (const char* env = std::getenv("HJFIELD_THREADS")) {
        try {
            requested = std::stoi(env);
        } catch (...) {
            requested = 0;
        }
    }
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void set_worker_count(int workers) { g_override.store(workers < 0 ? 0 : workers); }

}  // namespace hjfield
