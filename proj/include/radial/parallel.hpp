#pragma once

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace radial {

/// Worker count: explicit request, else RADIAL_SHOOTER_JOBS, else 1.
inline int resolve_jobs(int requested = 0)
{
    if (requested > 0) return requested;
    if (const char* env = std::getenv("RADIAL_SHOOTER_JOBS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 1;
}

/// Index-sharded fan-out; results keyed by index stay deterministic
/// regardless of the schedule.
template <class F>
void parallel_for(std::size_t n, int jobs, F&& body)
{
    jobs = resolve_jobs(jobs);
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::size_t nj = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
    std::vector<std::thread> pool;
    pool.reserve(nj);
    for (std::size_t t = 0; t < nj; ++t) {
        pool.emplace_back([&, t]() {
            std::size_t lo = n * t / nj, hi = n * (t + 1) / nj;
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace radial
