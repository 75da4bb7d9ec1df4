#pragma once

#include <cstddef>
#include <functional>

namespace cfunhddc {

// Worker cap: CFUNHDDC_THREADS when set (>= 1), else hardware concurrency.
int max_threads();

// Runs task(0..count-1) across up to max_threads() workers. Tasks must be
// independent; results keyed by index stay deterministic regardless of
// scheduling. The first task exception (by index) is rethrown after all
// workers finish.
void parallel_tasks(std::size_t count,
                    const std::function<void(std::size_t)>& task);

} // namespace cfunhddc
