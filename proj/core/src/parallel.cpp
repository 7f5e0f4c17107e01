#include "nilharmonics/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace nilh {

namespace {

std::atomic<int> g_override{0};
constexpr std::size_t kChunk = 1024;

void run_chunks(std::size_t chunks, const std::function<void(std::size_t)>& job) {
    int t = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), chunks);
    if (t <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) job(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int i = 0; i < t; ++i)
        pool.emplace_back([&] {
            for (std::size_t c = next++; c < chunks; c = next++) job(c);
        });
    for (auto& th : pool) th.join();
}

}  // namespace

int thread_count() {
    int o = g_override.load();
    if (o > 0) return o;
    if (const char* env = std::getenv("NILH_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned h = std::thread::hardware_concurrency();
    return h == 0 ? 1 : static_cast<int>(h);
}

void set_thread_count(int n) { g_override.store(n); }

double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    std::size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

double parallel_sum(std::size_t n, const std::function<double(std::size_t)>& f) {
    if (n == 0) return 0.0;
    std::size_t chunks = (n + kChunk - 1) / kChunk;
    std::vector<double> partial(chunks, 0.0);
    run_chunks(chunks, [&](std::size_t c) {
        std::size_t lo = c * kChunk, hi = std::min(n, lo + kChunk);
        double buf[kChunk];
        for (std::size_t i = lo; i < hi; ++i) buf[i - lo] = f(i);
        partial[c] = pairwise_sum(buf, hi - lo);
    });
    return pairwise_sum(partial.data(), chunks);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f) {
    if (n == 0) return;
    std::size_t chunks = (n + kChunk - 1) / kChunk;
    run_chunks(chunks, [&](std::size_t c) {
        std::size_t lo = c * kChunk, hi = std::min(n, lo + kChunk);
        for (std::size_t i = lo; i < hi; ++i) f(i);
    });
}

}  // namespace nilh
