#pragma once

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace fedoq {

// Worker count for fan-out over independent check samples. FEDOQ_WORKERS=0/1
// (or unset) keeps everything on the calling thread.
inline int worker_count_from_env() {
    const char* raw = std::getenv("FEDOQ_WORKERS");
    if (!raw) return 1;
    int n = std::atoi(raw);
    return n < 1 ? 1 : n;
}

template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    int workers = worker_count_from_env();
    if (workers <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto body = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    int spawn = std::min<int>(workers, static_cast<int>(count));
    pool.reserve(spawn);
    for (int t = 0; t < spawn; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
}

} // namespace fedoq
