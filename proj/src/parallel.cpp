#include "cfunhddc/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace cfunhddc {

int max_threads() {
    if (const char* env = std::getenv("CFUNHDDC_THREADS")) {
        const int parsed = std::atoi(env);
        if (parsed >= 1) {
            return parsed;
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

void parallel_tasks(std::size_t count,
                    const std::function<void(std::size_t)>& task) {
    if (count == 0) {
        return;
    }
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(max_threads()), count);

    std::vector<std::exception_ptr> errors(count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            task(i);
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) {
                return;
            }
            try {
                task(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back(worker);
    }
    for (auto& t : pool) {
        t.join();
    }
    // Rethrow the lowest-index failure so error reporting is deterministic.
    for (const auto& err : errors) {
        if (err) {
            std::rethrow_exception(err);
        }
    }
}

} // namespace cfunhddc
