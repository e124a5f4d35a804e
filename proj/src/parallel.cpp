#include "bgreg/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace bgreg {

namespace {
std::atomic<int> g_max_threads{1};
}

void set_max_threads(int n) {
    g_max_threads.store(std::max(1, n));
}

int max_threads() { return g_max_threads.load(); }

void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)> &body) {
    const int threads = std::min<std::size_t>(g_max_threads.load(), n ? n : 1);
    if (threads <= 1 || n < 4096) {
        body(0, n);
        return;
    }
    const std::size_t chunk = (n + threads - 1) / threads;
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        const std::size_t b = std::min(n, static_cast<std::size_t>(t) * chunk);
        const std::size_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&body, b, e] { body(b, e); });
    }
}

}  // namespace bgreg
