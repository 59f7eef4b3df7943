#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace dnls
{
inline std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Seed for one sweep point, a function of (global seed, m, start index) only.
inline std::uint64_t point_seed(std::uint64_t seed, double m, std::uint64_t start) noexcept
{
    return splitmix64(splitmix64(seed ^ splitmix64(std::bit_cast<std::uint64_t>(m))) + start);
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double unit_double(std::uint64_t bits) noexcept
{
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Number of workers to use when the caller asks for `requested` (0 = hardware).
inline unsigned resolve_workers(unsigned requested) noexcept
{
    if (requested == 0)
        requested = std::max(1u, std::thread::hardware_concurrency());
    return requested;
}

/// Applies `fn` to 0..count-1 on up to `workers` threads; results are stored by
/// index so the output does not depend on scheduling. The first exception is
/// rethrown after all threads finish.
template <class T>
std::vector<T> parallel_map(std::size_t count, unsigned workers, const std::function<T(std::size_t)>& fn)
{
    std::vector<std::optional<T>> slots(count);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        for (std::size_t i = next++; i < count; i = next++)
        {
            try
            {
                slots[i].emplace(fn(i));
            }
            catch (...)
            {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
            }
        }
    };
    const auto nthreads = std::min<std::size_t>(resolve_workers(workers), count);
    if (nthreads <= 1)
    {
        body();
    }
    else
    {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < nthreads; ++t)
            pool.emplace_back(body);
        for (auto& th : pool)
            th.join();
    }
    if (error)
        std::rethrow_exception(error);
    std::vector<T> out;
    out.reserve(count);
    for (auto& s : slots)
        out.push_back(std::move(*s));
    return out;
}

} // namespace dnls
