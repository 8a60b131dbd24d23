#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace lendfair {

/// Worker cap: LENDFAIR_THREADS if set and positive, else hardware concurrency.
std::size_t worker_count();

/*!
 * Runs fn(i) for i in [0, n) on up to worker_count() threads.
 *
 * Work is handed out in fixed-size chunks; fn must write its result to a slot
 * keyed by i so the outcome never depends on scheduling. The first exception
 * thrown by any worker is rethrown on the calling thread.
 */
template<class Fn>
void parallel_for(std::size_t n, Fn&& fn, std::size_t chunk = 64)
{
    std::size_t const workers = std::min(worker_count(), (n + chunk - 1) / chunk);
    if (workers <= 1)
    {
        for (std::size_t i = 0; i < n; ++i)
        {
            fn(i);
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        try
        {
            for (;;)
            {
                std::size_t const begin = next.fetch_add(chunk);
                if (begin >= n)
                {
                    return;
                }
                std::size_t const end = std::min(n, begin + chunk);
                for (std::size_t i = begin; i < end; ++i)
                {
                    fn(i);
                }
            }
        }
        catch (...)
        {
            std::lock_guard lock{error_mutex};
            if (!error)
            {
                error = std::current_exception();
            }
            next.store(n);
        }
    };

    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w)
    {
        pool.emplace_back(work);
    }
    work();
    pool.clear();
    if (error)
    {
        std::rethrow_exception(error);
    }
}

/// Pairwise (cascade) summation in index order.
double pairwise_sum(std::span<double const> values);

struct SampleStats
{
    double mean = 0.0;
    double std_error = 0.0;
};

/// Mean and standard error of the mean; exact for constant samples.
SampleStats sample_stats(std::span<double const> values);

}  // namespace lendfair
