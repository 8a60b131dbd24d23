#include "lendfair/parallel.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace lendfair {

std::size_t worker_count()
{
    if (char const* env = std::getenv("LENDFAIR_THREADS"))
    {
        try
        {
            long const requested = std::stol(env);
            if (requested > 0)
            {
                return static_cast<std::size_t>(requested);
            }
        }
        catch (std::exception const&)
        {
            // fall through to the hardware default
        }
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

double pairwise_sum(std::span<double const> values)
{
    constexpr std::size_t kLeaf = 32;
    if (values.size() <= kLeaf)
    {
        double total = 0.0;
        for (double v : values)
        {
            total += v;
        }
        return total;
    }
    std::size_t const half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

SampleStats sample_stats(std::span<double const> values)
{
    SampleStats out;
    if (values.empty())
    {
        return out;
    }
    std::size_t const n = values.size();
    double const shift = values.front();
    std::vector<double> work(values.begin(), values.end());
    for (double& v : work)
    {
        v -= shift;
    }
    double const offset = pairwise_sum(work) / static_cast<double>(n);
    out.mean = shift + offset;
    if (n < 2)
    {
        return out;
    }
    for (double& v : work)
    {
        v = (v - offset) * (v - offset);
    }
    double const variance = pairwise_sum(work) / static_cast<double>(n - 1);
    out.std_error = std::sqrt(variance / static_cast<double>(n));
    return out;
}

}  // namespace lendfair
