#include "bent/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace bent {

int thread_count() {
    if (const char *env = std::getenv("BENT_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) {
            return n;
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void for_each_chunk(std::size_t n, std::size_t chunk_size,
                    const std::function<void(std::size_t, std::size_t, std::size_t)> &body) {
    std::size_t chunks = (n + chunk_size - 1) / chunk_size;
    std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), chunks);
    auto run_chunk = [&](std::size_t c) { body(c, c * chunk_size, std::min(n, (c + 1) * chunk_size)); };
    if (workers <= 1) {
        for (std::size_t c = 0; c < chunks; c++) {
            run_chunk(c);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; w++) {
        pool.emplace_back([&] {
            for (std::size_t c = next++; c < chunks; c = next++) {
                try {
                    run_chunk(c);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto &t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

}  // namespace bent
