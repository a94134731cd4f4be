#include "roughfou/parallel.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace roughfou {

namespace {
std::atomic<unsigned> g_max_threads{0};
}

void set_max_threads(unsigned n) { g_max_threads.store(n); }

unsigned max_threads() {
    unsigned n = g_max_threads.load();
    if (n == 0) n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

void parallel_for(std::uint64_t n_blocks, const std::function<void(std::uint64_t)>& body) {
    if (n_blocks == 0) return;
    const std::uint64_t n_workers = std::min<std::uint64_t>(max_threads(), n_blocks);
    if (n_workers <= 1) {
        for (std::uint64_t b = 0; b < n_blocks; ++b) body(b);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::uint64_t b = next.fetch_add(1);
            if (b >= n_blocks) return;
            try {
                body(b);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (std::uint64_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace roughfou
