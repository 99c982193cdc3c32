#include "cma/space.hpp"

#include <algorithm>
#include <mutex>
#include <unordered_map>

namespace cma {

bool Interval::contains(Point x) const
{
    return std::binary_search(members.begin(), members.end(), x);
}

TernarySpace TernarySpace::from_table(std::size_t n, std::vector<Point> table, std::string label, bool median)
{
    if (n == 0)
        throw InputError("space must have at least one point");
    if (table.size() != n * n * n)
        throw InputError("mu table has " + std::to_string(table.size()) + " entries, expected " +
                         std::to_string(n * n * n));
    for (std::size_t i = 0; i < table.size(); ++i)
        if (table[i] >= n)
            throw InputError("mu table entry " + std::to_string(i) + " = " + std::to_string(table[i]) +
                             " is out of range");
    TernarySpace s;
    s.core_ = std::make_shared<Core>();
    s.core_->n = n;
    s.core_->table = std::move(table);
    s.core_->label = std::move(label);
    s.core_->median = median;
    s.cache_ = std::make_shared<IntervalTable>(s);
    return s;
}

TernarySpace TernarySpace::from_rule(std::size_t n, Rule rule, std::string label, bool median, bool keep_rule)
{
    if (n == 0)
        throw InputError("space must have at least one point");
    if (!rule)
        throw InputError("space rule is empty");
    TernarySpace s;
    s.core_ = std::make_shared<Core>();
    s.core_->n = n;
    s.core_->label = std::move(label);
    s.core_->median = median;
    if (n <= table_limit && !keep_rule) {
        s.core_->table.resize(n * n * n);
        std::size_t i = 0;
        for (Point a = 0; a < n; ++a)
            for (Point b = 0; b < n; ++b)
                for (Point c = 0; c < n; ++c)
                    s.core_->table[i++] = rule(a, b, c);
        for (auto v : s.core_->table)
            if (v >= n)
                throw InputError("rule produced an out-of-range point");
    }
    s.core_->rule = std::move(rule);
    s.cache_ = std::make_shared<IntervalTable>(s);
    return s;
}

Point TernarySpace::mu_rule(Point a, Point b, Point c) const
{
    if (core_->rule)
        return core_->rule(a, b, c);
    return mu(a, b, c);
}

void TernarySpace::check_point(Point p) const
{
    if (p >= size())
        throw InputError("point " + std::to_string(p) + " out of range [0," + std::to_string(size()) + ")");
}

Point TernarySpace::mu_checked(Point a, Point b, Point c) const
{
    check_point(a);
    check_point(b);
    check_point(c);
    const Point r = mu(a, b, c);
    if (r >= size())
        throw InputError("operation returned out-of-range point " + std::to_string(r));
    return r;
}

void TernarySpace::set_origin(std::string origin_json)
{
    core_ = std::make_shared<Core>(*core_);
    core_->origin = std::move(origin_json);
}

void TernarySpace::set_label(std::string label)
{
    core_ = std::make_shared<Core>(*core_);
    core_->label = std::move(label);
}

std::vector<Point> enumerate_interval(const TernarySpace& space, Point a, Point b)
{
    const std::size_t n = space.size();
    std::vector<char> seen(n, 0);
    std::vector<Point> out;
    for (Point x = 0; x < n; ++x) {
        const Point m = space.mu(a, x, b);
        if (!seen[m]) {
            seen[m] = 1;
            out.push_back(m);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Dense storage up to this many points; sharded hash maps beyond.
namespace {
constexpr std::size_t dense_limit = 1024;
constexpr std::size_t shard_count = 64;
}  // namespace

struct IntervalTable::Impl {
    TernarySpace space;  // shares the operation, not the cache
    std::size_t n = 0;
    std::vector<std::vector<Point>> dense;
    std::unique_ptr<std::once_flag[]> flags;
    struct Shard {
        std::mutex mutex;
        std::unordered_map<std::uint64_t, std::unique_ptr<std::vector<Point>>> map;
    };
    std::unique_ptr<Shard[]> shards;
};

IntervalTable::IntervalTable(const TernarySpace& space) : impl_(std::make_unique<Impl>())
{
    impl_->space.core_ = space.core_;
    impl_->n = space.size();
    const std::size_t n = impl_->n;
    if (n <= dense_limit) {
        impl_->dense.resize(n * n);
        impl_->flags = std::make_unique<std::once_flag[]>(n * n);
    } else {
        impl_->shards = std::make_unique<Impl::Shard[]>(shard_count);
    }
}

IntervalTable::~IntervalTable() = default;

const std::vector<Point>& IntervalTable::members(Point a, Point b) const
{
    auto& m = *impl_;
    if (m.n <= dense_limit) {
        const std::size_t key = static_cast<std::size_t>(a) * m.n + b;
        std::call_once(m.flags[key], [&] { m.dense[key] = enumerate_interval(m.space, a, b); });
        return m.dense[key];
    }
    const std::uint64_t key = static_cast<std::uint64_t>(a) * m.n + b;
    auto& shard = m.shards[key % shard_count];
    {
        std::lock_guard lock(shard.mutex);
        auto it = shard.map.find(key);
        if (it != shard.map.end())
            return *it->second;
    }
    auto fresh = std::make_unique<std::vector<Point>>(enumerate_interval(m.space, a, b));
    std::lock_guard lock(shard.mutex);
    auto [it, inserted] = shard.map.try_emplace(key, std::move(fresh));
    return *it->second;
}

Interval interval(const TernarySpace& space, Point a, Point b)
{
    space.check_point(a);
    space.check_point(b);
    return Interval{a, b, space.intervals().members(a, b)};
}

Point iterated_median(const TernarySpace& space, const std::vector<Point>& xs, Point b)
{
    if (xs.empty())
        throw InputError("iterated median needs at least one point");
    space.check_point(b);
    for (auto x : xs)
        space.check_point(x);
    Point acc = xs.front();
    for (std::size_t i = 1; i < xs.size(); ++i)
        acc = space.mu(acc, xs[i], b);
    return acc;
}

Ticks permutation_defect(const TernarySpace& space, const MetricMatrix& d, const std::vector<Point>& xs, Point b,
                         std::size_t cap)
{
    if (xs.size() > cap)
        throw BudgetError("permutation defect: " + std::to_string(xs.size()) + " points exceed the cap of " +
                          std::to_string(cap));
    if (d.size() != space.size())
        throw InputError("metric size does not match the space");
    const Point base = iterated_median(space, xs, b);
    std::vector<std::size_t> order(xs.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::vector<Point> perm(xs.size());
    Ticks worst = 0;
    do {
        for (std::size_t i = 0; i < order.size(); ++i)
            perm[i] = xs[order[i]];
        worst = std::max(worst, d(iterated_median(space, perm, b), base));
    } while (std::next_permutation(order.begin(), order.end()));
    return worst;
}

Ticks absorption_defect(const TernarySpace& space, const MetricMatrix& d, std::size_t k, const std::vector<Point>& xs,
                        Point b)
{
    if (k < 1 || k > xs.size())
        throw InputError("absorption defect: k = " + std::to_string(k) + " must lie in [1," +
                         std::to_string(xs.size()) + "]");
    if (d.size() != space.size())
        throw InputError("metric size does not match the space");
    const std::vector<Point> head(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(k));
    const Point inner = iterated_median(space, xs, b);
    return d(iterated_median(space, head, inner), iterated_median(space, head, b));
}

}  // namespace cma
