#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <optional>
#include <thread>
#include <vector>

namespace sklab {

struct McOptions {
    std::uint64_t seed = 1;
    int workers = 1;
};

// Evaluates body(i) for i in [0, n) on `workers` threads and hands results to
// consume(i, result) strictly in index order, so output never depends on scheduling.
// An exception from body(i) is rethrown when index i is reached.
template <class Result, class Body, class Consume>
void ordered_map(std::size_t n, int workers, Body&& body, Consume&& consume, std::size_t block = 0) {
    workers = std::max(1, workers);
    if (block == 0) block = std::max<std::size_t>(64, 32 * std::size_t(workers));
    std::vector<std::optional<Result>> slots;
    std::vector<std::exception_ptr> errors;
    for (std::size_t base = 0; base < n; base += block) {
        std::size_t len = std::min(block, n - base);
        slots.assign(len, std::nullopt);
        errors.assign(len, nullptr);
        std::atomic<std::size_t> next{0};
        auto work = [&] {
            for (std::size_t j; (j = next.fetch_add(1)) < len;) {
                try {
                    slots[j].emplace(body(base + j));
                } catch (...) {
                    errors[j] = std::current_exception();
                }
            }
        };
        if (workers == 1 || len == 1) {
            work();
        } else {
            std::vector<std::thread> pool;
            int t = std::min<int>(workers, int(len));
            for (int w = 0; w < t; ++w) pool.emplace_back(work);
            for (auto& th : pool) th.join();
        }
        for (std::size_t j = 0; j < len; ++j) {
            if (errors[j]) std::rethrow_exception(errors[j]);
            consume(base + j, std::move(*slots[j]));
        }
    }
}

}  // namespace sklab
