#include "cma/interval_distance.hpp"

#include <algorithm>
#include <limits>

namespace cma {

IntervalDistances::IntervalDistances(std::size_t n, const MetricMatrix& d, const Members& members)
    : n_(n)
{
    if (n > max_points)
        throw BudgetError("interval distance tables are limited to " + std::to_string(max_points) + " points");
    if (d.size() != n)
        throw InputError("metric size does not match");
    if (d.diameter() > std::numeric_limits<std::int32_t>::max())
        throw BudgetError("metric values too large for interval distance tables");
    table_.assign(n * n * n, std::numeric_limits<std::int32_t>::max());
    for (Point a = 0; a < n; ++a)
        for (Point b = a; b < n; ++b) {
            const auto& ab = members(a, b);
            std::int32_t* out = &table_[(a * n_ + b) * n_];
            for (Point m : ab) {
                const Ticks* dm = &d.raw()[static_cast<std::size_t>(m) * n];
                for (Point x = 0; x < n; ++x)
                    out[x] = std::min(out[x], static_cast<std::int32_t>(dm[x]));
            }
            if (a == b)
                continue;
            std::int32_t* rev = &table_[(b * n_ + a) * n_];
            const auto& ba = members(b, a);
            if (ba == ab) {
                std::copy(out, out + n, rev);
            } else {
                for (Point m : ba) {
                    const Ticks* dm = &d.raw()[static_cast<std::size_t>(m) * n];
                    for (Point x = 0; x < n; ++x)
                        rev[x] = std::min(rev[x], static_cast<std::int32_t>(dm[x]));
                }
            }
        }
}

IntervalDistances interval_distances(const TernarySpace& space, const MetricMatrix& d)
{
    const auto& table = space.intervals();
    return IntervalDistances(space.size(), d,
                             [&](Point a, Point b) -> const std::vector<Point>& { return table.members(a, b); });
}

}  // namespace cma
