#pragma once

// Data-parallel loops shared by the estimators and the Monte-Carlo drivers.
//
// Every kernel comes in two flavours with identical results: `serial` is the
// reference loop, `parallel` distributes indices over OpenMP threads. Work
// item i must depend only on i (callers derive per-item seeds with
// derive_seed), and reductions are order-independent (max, counts) or are
// done afterwards over an index-ordered buffer, so both flavours agree bit
// for bit regardless of thread count.

#include <omp.h>

#include <cstddef>
#include <exception>
#include <limits>
#include <optional>
#include <vector>

namespace proxreg::kernels {

enum class Execution { serial, parallel };

struct RatioStats {
    double max_ratio = 0.0;
    std::size_t used = 0;
    std::size_t skipped = 0;

    friend bool operator==(const RatioStats&, const RatioStats&) = default;
};

namespace detail {

// Keeps the exception raised by the lowest failing index so parallel runs
// report the same error as the serial loop.
class FirstError {
public:
    void record(std::size_t index, std::exception_ptr error)
    {
#pragma omp critical(proxreg_first_error)
        {
            if (!error_ || index < index_) {
                index_ = index;
                error_ = error;
            }
        }
    }

    void rethrow_if_any() const
    {
        if (error_) {
            std::rethrow_exception(error_);
        }
    }

private:
    std::size_t index_ = std::numeric_limits<std::size_t>::max();
    std::exception_ptr error_;
};

inline RatioStats merge(RatioStats a, const RatioStats& b)
{
    if (b.max_ratio > a.max_ratio) {
        a.max_ratio = b.max_ratio;
    }
    a.used += b.used;
    a.skipped += b.skipped;
    return a;
}

inline void accumulate(RatioStats& stats, const std::optional<double>& ratio)
{
    if (ratio) {
        ++stats.used;
        if (*ratio > stats.max_ratio) {
            stats.max_ratio = *ratio;
        }
    } else {
        ++stats.skipped;
    }
}

} // namespace detail

namespace serial {

/// out[i] = item(i) for i in [0, n).
template <class T, class F>
std::vector<T> generate(std::size_t n, F&& item)
{
    std::vector<T> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(item(i));
    }
    return out;
}

/// Max of the defined ratios ratio_at(i); undefined ones count as skipped.
template <class F>
RatioStats max_ratio(std::size_t n, F&& ratio_at)
{
    RatioStats stats;
    for (std::size_t i = 0; i < n; ++i) {
        detail::accumulate(stats, ratio_at(i));
    }
    return stats;
}

} // namespace serial

namespace parallel {

template <class T, class F>
std::vector<T> generate(std::size_t n, F&& item)
{
    std::vector<std::optional<T>> slots(n);
    detail::FirstError failure;
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        try {
            slots[static_cast<std::size_t>(i)].emplace(item(static_cast<std::size_t>(i)));
        } catch (...) {
            failure.record(static_cast<std::size_t>(i), std::current_exception());
        }
    }
    failure.rethrow_if_any();
    std::vector<T> out;
    out.reserve(n);
    for (auto& slot : slots) {
        out.push_back(std::move(*slot));
    }
    return out;
}

template <class F>
RatioStats max_ratio(std::size_t n, F&& ratio_at)
{
    RatioStats total;
    detail::FirstError failure;
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel
    {
        RatioStats local;
#pragma omp for schedule(static)
        for (std::ptrdiff_t i = 0; i < count; ++i) {
            try {
                detail::accumulate(local, ratio_at(static_cast<std::size_t>(i)));
            } catch (...) {
                failure.record(static_cast<std::size_t>(i), std::current_exception());
            }
        }
#pragma omp critical(proxreg_ratio_merge)
        total = detail::merge(total, local);
    }
    failure.rethrow_if_any();
    return total;
}

} // namespace parallel

template <class T, class F>
std::vector<T> generate(Execution exec, std::size_t n, F&& item)
{
    return exec == Execution::parallel ? parallel::generate<T>(n, item) : serial::generate<T>(n, item);
}

template <class F>
RatioStats max_ratio(Execution exec, std::size_t n, F&& ratio_at)
{
    return exec == Execution::parallel ? parallel::max_ratio(n, ratio_at) : serial::max_ratio(n, ratio_at);
}

} // namespace proxreg::kernels
