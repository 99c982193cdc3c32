#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "cma/metric.hpp"
#include "cma/space.hpp"

namespace cma {

/// dist(x, [a,b]) for every pair (a,b) and point x, in metric ticks.
class IntervalDistances {
public:
    static constexpr std::size_t max_points = 400;
    using Members = std::function<const std::vector<Point>&(Point, Point)>;

    IntervalDistances(std::size_t n, const MetricMatrix& d, const Members& members);

    [[nodiscard]] const std::int32_t* row(Point a, Point b) const { return &table_[(a * n_ + b) * n_]; }
    [[nodiscard]] Ticks operator()(Point a, Point b, Point x) const { return row(a, b)[x]; }

private:
    std::size_t n_;
    std::vector<std::int32_t> table_;
};

IntervalDistances interval_distances(const TernarySpace& space, const MetricMatrix& d);

}  // namespace cma
