#include "compreg/parallel.hpp"

#include <atomic>
#include <thread>
#include <vector>

namespace compreg {

namespace {
std::atomic<unsigned> g_max_threads{0};
}

void set_max_threads(unsigned n) { g_max_threads.store(n); }

unsigned max_threads() {
    unsigned n = g_max_threads.load();
    if (n == 0) {
        n = std::thread::hardware_concurrency();
        if (n == 0) n = 1;
    }
    return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    const unsigned threads = max_threads();
    if (threads <= 1 || n < 512) {
        fn(0, n);
        return;
    }
    const std::size_t chunk = (n + threads - 1) / threads;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t begin = 0; begin < n; begin += chunk) {
        const std::size_t end = std::min(n, begin + chunk);
        pool.emplace_back(fn, begin, end);
    }
    for (auto& t : pool) t.join();
}

}  // namespace compreg
