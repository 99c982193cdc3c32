#pragma once

#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "cma/random.hpp"
#include "cma/types.hpp"

namespace cma {

/// Runs fn(item) for item in [0, items) on up to `threads` workers. Items are
/// handed out dynamically; callers must make per-item results independent of
/// which worker ran them. The exception from the lowest failing item wins.
template <class F>
void parallel_for(std::size_t items, unsigned threads, F&& fn)
{
    if (threads <= 1 || items <= 1) {
        for (std::size_t i = 0; i < items; ++i)
            fn(i);
        return;
    }
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, items));
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    std::size_t error_item = std::numeric_limits<std::size_t>::max();

    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= items)
                return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (i < error_item) {
                    error_item = i;
                    error = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w)
        pool.emplace_back(work);
    work();
    for (auto& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

/// n^k, saturating at UINT64_MAX.
inline std::uint64_t saturating_pow(std::uint64_t n, unsigned k)
{
    std::uint64_t r = 1;
    for (unsigned i = 0; i < k; ++i) {
        if (n != 0 && r > std::numeric_limits<std::uint64_t>::max() / n)
            return std::numeric_limits<std::uint64_t>::max();
        r *= n;
    }
    return r;
}

template <std::size_t K>
using Tuple = std::array<Point, K>;

template <std::size_t K>
struct ScanResult {
    Ticks value = 0;
    Tuple<K> witness{};
    bool has = false;
    ScanMode mode = ScanMode::exhaustive;
    std::uint64_t evaluated = 0;
    std::uint64_t seed = 0;

    [[nodiscard]] bool lower_bound() const { return mode == ScanMode::sampled; }
};

/// Decides whether a K-tuple scan over n points runs exhaustively.
inline ScanMode choose_mode(std::uint64_t total, const ScanOptions& opt, const std::string& what)
{
    if (!opt.force_sampling && total <= opt.budget)
        return ScanMode::exhaustive;
    if (!opt.allow_sampling)
        throw BudgetError(what + ": " + std::to_string(total) + " tuples exceed budget " +
                          std::to_string(opt.budget) + " and sampling is disabled");
    return ScanMode::sampled;
}

/// Per-item states from a K-tuple enumeration over [0,n). Exhaustive mode has
/// one item per leading index; sampled mode has one item per chunk of the
/// counter stream, and tuple s of the stream is drawn from counters s*K..s*K+K-1.
template <class State>
struct TupleRun {
    std::vector<State> states;
    ScanMode mode = ScanMode::exhaustive;
    std::uint64_t evaluated = 0;
};

template <std::size_t K, class State, class Visit>
TupleRun<State> for_each_tuple(std::size_t n, const ScanOptions& opt, const std::string& what, const State& init,
                               Visit&& visit)
{
    static_assert(K >= 1);
    TupleRun<State> run;
    if (n == 0)
        return run;
    run.mode = choose_mode(saturating_pow(n, K), opt, what);
    std::vector<std::uint64_t> counts;

    if (run.mode == ScanMode::exhaustive) {
        run.states.assign(n, init);
        counts.resize(n);
        parallel_for(n, opt.threads, [&](std::size_t lead) {
            Tuple<K> t{};
            t[0] = static_cast<Point>(lead);
            auto& state = run.states[lead];
            std::uint64_t seen = 0;
            for (;;) {
                visit(state, static_cast<const Tuple<K>&>(t));
                ++seen;
                std::size_t j = K - 1;
                while (j >= 1) {
                    if (++t[j] < n)
                        break;
                    t[j] = 0;
                    --j;
                }
                if (j == 0)
                    break;
            }
            counts[lead] = seen;
        });
    } else {
        constexpr std::uint64_t chunk = 1 << 14;
        const std::uint64_t samples = opt.samples;
        const auto items = static_cast<std::size_t>((samples + chunk - 1) / chunk);
        run.states.assign(items, init);
        counts.resize(items);
        parallel_for(items, opt.threads, [&](std::size_t item) {
            const std::uint64_t lo = item * chunk;
            const std::uint64_t hi = std::min(samples, lo + chunk);
            auto& state = run.states[item];
            Tuple<K> t{};
            for (std::uint64_t s = lo; s < hi; ++s) {
                for (std::size_t j = 0; j < K; ++j)
                    t[j] = static_cast<Point>(counter_uniform(opt.seed, s * K + j, n));
                visit(state, static_cast<const Tuple<K>&>(t));
            }
            counts[item] = hi - lo;
        });
    }
    for (auto c : counts)
        run.evaluated += c;
    return run;
}

/// Maximum of f over K-tuples of points in [0,n). Exhaustive when n^K fits the
/// budget, otherwise opt.samples tuples drawn from the counter-based stream.
/// Ties resolve to the lexicographically smallest tuple, so the result does not
/// depend on the thread count.
template <std::size_t K, class F>
ScanResult<K> max_scan(std::size_t n, const ScanOptions& opt, F&& f, const std::string& what = "scan")
{
    auto run = for_each_tuple<K>(n, opt, what, MaxWitness<Tuple<K>>{},
                                 [&](MaxWitness<Tuple<K>>& best, const Tuple<K>& t) { best.offer(f(t), t); });
    MaxWitness<Tuple<K>> merged;
    for (const auto& p : run.states)
        merged.merge(p);
    ScanResult<K> out;
    out.seed = opt.seed;
    out.mode = run.mode;
    out.evaluated = run.evaluated;
    out.value = merged.value;
    out.witness = merged.witness;
    out.has = merged.has;
    return out;
}

template <std::size_t K>
struct BucketScan {
    std::vector<MaxWitness<Tuple<K>>> buckets;
    ScanMode mode = ScanMode::exhaustive;
    std::uint64_t evaluated = 0;
};

/// Per-bucket maxima. f(tuple, emit) calls emit(bucket, value) any number of
/// times; buckets are indices in [0, bucket_count).
template <std::size_t K, class F>
BucketScan<K> bucket_max_scan(std::size_t n, const ScanOptions& opt, std::size_t bucket_count, F&& f,
                              const std::string& what = "scan")
{
    using Buckets = std::vector<MaxWitness<Tuple<K>>>;
    auto run = for_each_tuple<K>(n, opt, what, Buckets(bucket_count), [&](Buckets& b, const Tuple<K>& t) {
        f(t, [&](std::size_t bucket, Ticks value) { b[bucket].offer(value, t); });
    });
    BucketScan<K> out;
    out.buckets.resize(bucket_count);
    for (const auto& state : run.states)
        for (std::size_t i = 0; i < bucket_count; ++i)
            out.buckets[i].merge(state[i]);
    out.mode = run.mode;
    out.evaluated = run.evaluated;
    return out;
}

}  // namespace cma
