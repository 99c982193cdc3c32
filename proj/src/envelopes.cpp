#include <algorithm>
#include <bit>
#include <cstring>
#include <numeric>

#include "cma/interval_distance.hpp"
#include "cma/parallel.hpp"
#include "cma/rank.hpp"

// Both envelopes have the same shape. For a base point p there is a
// compatibility value c(x,y) and a reach value v(x,q); a tuple x_1..x_k is
// admissible at threshold th when c(x_i,x_j) <= th for all i != j, and its
// value is max over q of min_i v(x_i,q). For fixed p the best value at th is
// found exactly by asking, for rising t, whether some admissible k-clique has
// a common q with every v(x_i,q) >= t.

namespace cma {

namespace {

constexpr std::size_t batch_size = 8;

class Bits {
public:
    Bits() = default;
    Bits(std::size_t rows, std::size_t n) : words_((n + 63) / 64), data_(rows * words_, 0) {}

    [[nodiscard]] std::size_t words() const { return words_; }
    std::uint64_t* row(std::size_t r) { return &data_[r * words_]; }
    [[nodiscard]] const std::uint64_t* row(std::size_t r) const { return &data_[r * words_]; }
    void clear() { std::fill(data_.begin(), data_.end(), 0); }

private:
    std::size_t words_ = 0;
    std::vector<std::uint64_t> data_;
};

std::size_t popcount(const std::uint64_t* a, std::size_t w)
{
    std::size_t c = 0;
    for (std::size_t i = 0; i < w; ++i)
        c += static_cast<std::size_t>(std::popcount(a[i]));
    return c;
}

bool any(const std::uint64_t* a, std::size_t w)
{
    for (std::size_t i = 0; i < w; ++i)
        if (a[i])
            return true;
    return false;
}

Point lowest(const std::uint64_t* a, std::size_t w)
{
    for (std::size_t i = 0; i < w; ++i)
        if (a[i])
            return static_cast<Point>(i * 64 + static_cast<std::size_t>(std::countr_zero(a[i])));
    return 0;
}

struct BaseResult {
    std::vector<Ticks> value;  // -1 when nothing is admissible
    std::vector<std::vector<Point>> witness;
    std::uint64_t work = 0;
};

class BaseSolver {
public:
    BaseSolver(std::size_t n, int k, Point p, std::vector<Ticks> c, std::vector<Ticks> v)
        : n_(n), k_(k), p_(p), c_(std::move(c)), v_(std::move(v)), adj_(n, n), q_(n, n),
          levels_(static_cast<std::size_t>(k) + 1, n), queries_(static_cast<std::size_t>(k) + 1, n)
    {
        work_ += 2 * n * n;
    }

    BaseResult run(const std::vector<Ticks>& thresholds)
    {
        std::vector<Ticks> values = v_;
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());

        BaseResult out;
        out.value.assign(thresholds.size(), -1);
        out.witness.resize(thresholds.size());
        std::size_t idx = 0;
        bool started = false;
        for (std::size_t ti = 0; ti < thresholds.size(); ++ti) {
            build_adjacency(thresholds[ti]);
            std::vector<Point> w;
            if (!started) {
                if (!exists(values[0], w))
                    continue;
                started = true;
            } else if (!exists(values[idx], w)) {
                continue;  // cannot happen for growing thresholds
            }
            while (idx + 1 < values.size()) {
                std::vector<Point> next;
                if (!exists(values[idx + 1], next))
                    break;
                ++idx;
                w = std::move(next);
            }
            out.value[ti] = values[idx];
            out.witness[ti] = std::move(w);
        }
        out.work = work_;
        return out;
    }

private:
    void build_adjacency(Ticks th)
    {
        adj_.clear();
        loop_.assign(n_, 0);
        for (std::size_t x = 0; x < n_; ++x) {
            loop_[x] = c_[x * n_ + x] <= th;
            for (std::size_t y = x + 1; y < n_; ++y)
                if (std::max(c_[x * n_ + y], c_[y * n_ + x]) <= th) {
                    adj_.row(x)[y / 64] |= std::uint64_t{1} << (y % 64);
                    adj_.row(y)[x / 64] |= std::uint64_t{1} << (x % 64);
                }
        }
        work_ += n_ * n_;
    }

    bool exists(Ticks t, std::vector<Point>& witness)
    {
        const std::size_t w = q_.words();
        q_.clear();
        for (std::size_t x = 0; x < n_; ++x)
            for (std::size_t q = 0; q < n_; ++q)
                if (v_[x * n_ + q] >= t)
                    q_.row(x)[q / 64] |= std::uint64_t{1} << (q % 64);
        work_ += n_ * n_;

        for (std::size_t x = 0; x < n_; ++x)
            if (loop_[x] && any(q_.row(x), w)) {
                witness.assign(static_cast<std::size_t>(k_), static_cast<Point>(x));
                witness.push_back(p_);
                witness.push_back(lowest(q_.row(x), w));
                return true;
            }
        if (k_ == 1)
            return false;

        std::uint64_t* cand = levels_.row(0);
        std::uint64_t* query = queries_.row(0);
        std::fill(cand, cand + w, 0);
        std::fill(query, query + w, 0);
        for (std::size_t x = 0; x < n_; ++x) {
            query[x / 64] |= std::uint64_t{1} << (x % 64);
            if (any(q_.row(x), w))
                cand[x / 64] |= std::uint64_t{1} << (x % 64);
        }
        chosen_.clear();
        if (!search(0))
            return false;
        witness = chosen_;
        witness.push_back(p_);
        witness.push_back(lowest(queries_.row(static_cast<std::size_t>(k_)), w));
        return true;
    }

    bool search(std::size_t depth)
    {
        ++work_;
        const std::size_t k = static_cast<std::size_t>(k_);
        if (depth == k)
            return true;
        const std::size_t w = q_.words();
        const std::size_t remaining = k - depth;
        const std::uint64_t* cand = levels_.row(depth);
        const std::uint64_t* query = queries_.row(depth);
        if (popcount(cand, w) < remaining)
            return false;
        std::uint64_t* next_cand = levels_.row(depth + 1);
        std::uint64_t* next_query = queries_.row(depth + 1);
        for (std::size_t word = 0; word < w; ++word) {
            std::uint64_t bits = cand[word];
            while (bits) {
                const std::size_t x = word * 64 + static_cast<std::size_t>(std::countr_zero(bits));
                bits &= bits - 1;
                const std::uint64_t* qx = q_.row(x);
                bool nonempty = false;
                for (std::size_t i = 0; i < w; ++i) {
                    next_query[i] = query[i] & qx[i];
                    nonempty |= next_query[i] != 0;
                }
                if (!nonempty)
                    continue;
                const std::uint64_t* ax = adj_.row(x);
                for (std::size_t i = 0; i < w; ++i)
                    next_cand[i] = (i < word ? 0 : cand[i]) & ax[i];
                next_cand[word] &= bits;  // only candidates after x
                if (remaining > 1 && popcount(next_cand, w) < remaining - 1)
                    continue;
                chosen_.push_back(static_cast<Point>(x));
                if (search(depth + 1))
                    return true;
                chosen_.pop_back();
            }
        }
        return false;
    }

    std::size_t n_;
    int k_;
    Point p_;
    std::vector<Ticks> c_;
    std::vector<Ticks> v_;
    Bits adj_;
    Bits q_;
    Bits levels_;
    Bits queries_;
    std::vector<char> loop_;
    std::vector<Point> chosen_;
    std::uint64_t work_ = 0;
};

template <class Fill>
EnvelopeTable run_envelope(std::size_t N, Ticks scale, int n, const ScanOptions& opt, std::vector<Ticks> thresholds,
                           const std::vector<Ticks>& default_thresholds, Fill&& fill, const char* what)
{
    if (n < 1)
        throw InputError(std::string(what) + ": n must be at least 1");
    if (thresholds.empty())
        thresholds = default_thresholds;
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    EnvelopeTable out;
    out.n = n;
    out.scale = scale;
    out.bases_total = N;
    out.table.args = thresholds;
    out.table.values.assign(thresholds.size(), -1);
    out.witness.resize(thresholds.size());

    std::vector<Point> order(N);
    std::iota(order.begin(), order.end(), Point{0});
    for (std::size_t i = N; i > 1; --i)
        std::swap(order[i - 1], order[counter_uniform(opt.seed, i, i)]);

    const std::uint64_t limit = opt.force_sampling ? std::min(opt.samples, opt.budget) : opt.budget;
    const int k = n + 1;
    std::size_t done = 0;
    while (done < N) {
        if (out.work >= limit) {
            if (!opt.allow_sampling && !opt.force_sampling)
                throw BudgetError(std::string(what) + ": exhaustive run exceeds the budget of " +
                                  std::to_string(opt.budget) + " work units");
            break;
        }
        const std::size_t count = std::min(batch_size, N - done);
        std::vector<BaseResult> results(count);
        parallel_for(count, opt.threads, [&](std::size_t i) {
            const Point p = order[done + i];
            std::vector<Ticks> c(N * N), v(N * N);
            fill(p, c, v);
            BaseSolver solver(N, k, p, std::move(c), std::move(v));
            results[i] = solver.run(thresholds);
        });
        for (auto& r : results) {
            out.work += r.work;
            for (std::size_t t = 0; t < thresholds.size(); ++t) {
                if (r.value[t] < 0)
                    continue;
                auto& best = out.table.values[t];
                if (r.value[t] > best || (r.value[t] == best && r.witness[t] < out.witness[t])) {
                    best = r.value[t];
                    out.witness[t] = std::move(r.witness[t]);
                }
            }
        }
        done += count;
    }
    out.bases_done = done;
    out.mode = done < N || opt.force_sampling ? ScanMode::sampled : ScanMode::exhaustive;
    return out;
}

}  // namespace

Ticks EnvelopeTable::at(Ticks threshold) const
{
    auto it = std::upper_bound(table.args.begin(), table.args.end(), threshold);
    if (it == table.args.begin())
        return -1;
    return table.values[static_cast<std::size_t>(it - table.args.begin()) - 1];
}

EnvelopeTable thin_cubes_envelope(const TernarySpace& space, const MetricMatrix& d, int n, const ScanOptions& opt,
                                  std::vector<Ticks> thresholds)
{
    if (d.size() != space.size())
        throw InputError("metric size does not match the space");
    const std::size_t N = space.size();
    return run_envelope(
        N, d.scale(), n, opt, std::move(thresholds), d.realized(),
        [&](Point p, std::vector<Ticks>& c, std::vector<Ticks>& v) {
            for (Point x = 0; x < N; ++x)
                for (Point y = 0; y < N; ++y) {
                    c[x * N + y] = d(p, space.mu(x, y, p));
                    v[x * N + y] = d(p, space.mu(x, p, y));
                }
        },
        "thin cubes");
}

EnvelopeTable multi_median_table(const TernarySpace& space, const MetricMatrix& d, int n, const ScanOptions& opt,
                                 std::vector<Ticks> thresholds)
{
    if (d.size() != space.size())
        throw InputError("metric size does not match the space");
    const std::size_t N = space.size();
    const auto dist = interval_distances(space, d);
    return run_envelope(
        N, d.scale(), n, opt, std::move(thresholds), d.realized(),
        [&](Point p, std::vector<Ticks>& c, std::vector<Ticks>& v) {
            for (Point x = 0; x < N; ++x)
                for (Point y = 0; y < N; ++y) {
                    c[x * N + y] = dist(x, y, p);
                    v[x * N + y] = c[x * N + y];
                }
        },
        "multi-median");
}

MultiMedianValue multi_median_envelope(const TernarySpace& space, const MetricMatrix& d, int n, Ticks lambda,
                                       const ScanOptions& opt)
{
    if (lambda < 0)
        throw InputError("multi-median: lambda must be non-negative");
    const auto t = multi_median_table(space, d, n, opt, {lambda});
    MultiMedianValue out;
    out.value = std::max<Ticks>(t.table.values[0], 0);
    out.witness = t.witness[0];
    out.mode = t.mode;
    return out;
}

}  // namespace cma
