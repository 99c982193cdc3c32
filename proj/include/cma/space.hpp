#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "cma/metric.hpp"
#include "cma/types.hpp"

namespace cma {

/// The set {mu(a,x,b) : x in X}, members sorted ascending.
struct Interval {
    Point a = 0;
    Point b = 0;
    std::vector<Point> members;

    [[nodiscard]] std::size_t card() const { return members.size(); }
    [[nodiscard]] bool contains(Point x) const;
};

class IntervalTable;

/// Finite ground set {0..N-1} with a total ternary operation. Spaces with
/// N <= table_limit keep an explicit N^3 table; larger ones evaluate their rule.
/// Copies share the immutable operation and the interval cache.
class TernarySpace {
public:
    using Rule = std::function<Point(Point, Point, Point)>;
    static constexpr std::size_t table_limit = 64;

    TernarySpace() = default;

    /// Explicit table in row-major (a,b,c) order. Throws InputError when an
    /// entry is out of range or the length is not n^3.
    static TernarySpace from_table(std::size_t n, std::vector<Point> table, std::string label, bool median);

    /// Rule-backed space. The rule is materialized into a table when n is at
    /// most table_limit, unless keep_rule is set.
    static TernarySpace from_rule(std::size_t n, Rule rule, std::string label, bool median,
                                  bool keep_rule = false);

    [[nodiscard]] std::size_t size() const { return core_ ? core_->n : 0; }
    [[nodiscard]] const std::string& label() const { return core_->label; }
    [[nodiscard]] bool flagged_median() const { return core_->median; }
    [[nodiscard]] bool has_table() const { return !core_->table.empty(); }
    [[nodiscard]] const std::vector<Point>& table() const { return core_->table; }

    /// Unchecked evaluation.
    [[nodiscard]] Point mu(Point a, Point b, Point c) const
    {
        const auto n = core_->n;
        if (!core_->table.empty())
            return core_->table[(static_cast<std::size_t>(a) * n + b) * n + c];
        return core_->rule(a, b, c);
    }

    /// Evaluation through the rule even when a table exists (used to test that
    /// both storages agree). Falls back to the table for table-only spaces.
    [[nodiscard]] Point mu_rule(Point a, Point b, Point c) const;
    [[nodiscard]] bool has_rule() const { return static_cast<bool>(core_->rule); }

    /// Range-checked evaluation; throws InputError.
    [[nodiscard]] Point mu_checked(Point a, Point b, Point c) const;
    void check_point(Point p) const;

    /// Generator description (JSON text) when the space came from a generator.
    [[nodiscard]] const std::string& origin() const { return core_->origin; }
    void set_origin(std::string origin_json);
    void set_label(std::string label);

    [[nodiscard]] const IntervalTable& intervals() const { return *cache_; }

private:
    struct Core {
        std::size_t n = 0;
        std::vector<Point> table;
        Rule rule;
        std::string label;
        bool median = false;
        std::string origin;
    };

    std::shared_ptr<Core> core_;
    std::shared_ptr<IntervalTable> cache_;

    friend class IntervalTable;
};

/// Memoized intervals. Fills are safe under concurrent readers: each entry is
/// computed once and never changes.
class IntervalTable {
public:
    explicit IntervalTable(const TernarySpace& space);
    ~IntervalTable();
    IntervalTable(const IntervalTable&) = delete;
    IntervalTable& operator=(const IntervalTable&) = delete;

    /// Sorted members of [a,b]; no range check.
    [[nodiscard]] const std::vector<Point>& members(Point a, Point b) const;
    [[nodiscard]] std::size_t card(Point a, Point b) const { return members(a, b).size(); }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Uncached enumeration of {mu(a,x,b)}.
std::vector<Point> enumerate_interval(const TernarySpace& space, Point a, Point b);

/// [a,b] with range checks, served from the cache.
Interval interval(const TernarySpace& space, Point a, Point b);

/// mu(x1;b) = x1, mu(x1..x_{k+1};b) = mu(mu(x1..x_k;b), x_{k+1}, b).
Point iterated_median(const TernarySpace& space, const std::vector<Point>& xs, Point b);

inline constexpr std::size_t default_permutation_cap = 6;

/// max over permutations s of d(mu(s.xs;b), mu(xs;b)). BudgetError when
/// |xs| > cap.
Ticks permutation_defect(const TernarySpace& space, const MetricMatrix& d, const std::vector<Point>& xs, Point b,
                         std::size_t cap = default_permutation_cap);

/// d(mu(x1..xk; mu(x1..xn; b)), mu(x1..xk; b)) for 1 <= k <= |xs|.
Ticks absorption_defect(const TernarySpace& space, const MetricMatrix& d, std::size_t k, const std::vector<Point>& xs,
                        Point b);

}  // namespace cma
