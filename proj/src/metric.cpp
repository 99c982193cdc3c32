#include "cma/metric.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>

#include "cma/parallel.hpp"
#include "cma/space.hpp"

namespace cma {

MetricMatrix::MetricMatrix(std::size_t n, Ticks scale) : n_(n), scale_(scale), ticks_(n * n, 0)
{
    if (scale <= 0)
        throw InputError("metric scale must be positive");
}

void MetricMatrix::set(Point a, Point b, Ticks t)
{
    ticks_[static_cast<std::size_t>(a) * n_ + b] = t;
}

MetricMatrix MetricMatrix::from_rationals(std::size_t n, const std::vector<Rational>& entries)
{
    if (entries.size() != n * n)
        throw InputError("metric needs " + std::to_string(n * n) + " entries, got " + std::to_string(entries.size()));
    Ticks scale = 1;
    for (const auto& r : entries) {
        scale = std::lcm(scale, r.den);
        if (scale > (Ticks{1} << 40))
            throw InputError("metric denominators too large");
    }
    MetricMatrix m(n, scale);
    for (std::size_t i = 0; i < entries.size(); ++i)
        m.ticks_[i] = entries[i].num * (scale / entries[i].den);
    return m;
}

std::vector<Ticks> MetricMatrix::realized() const
{
    std::vector<Ticks> v = ticks_;
    if (v.empty())
        v.push_back(0);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

Ticks MetricMatrix::diameter() const
{
    Ticks best = 0;
    for (auto t : ticks_)
        best = std::max(best, t);
    return best;
}

MetricCheck validate(const MetricMatrix& d, bool uniformly_discrete)
{
    const auto n = static_cast<Point>(d.size());
    auto fail = [](std::string what, std::vector<Point> w) { return MetricCheck{false, std::move(what), std::move(w)}; };
    for (Point a = 0; a < n; ++a)
        if (d(a, a) != 0)
            return fail("diagonal", {a});
    for (Point a = 0; a < n; ++a)
        for (Point b = 0; b < n; ++b) {
            if (d(a, b) < 0)
                return fail("negative", {a, b});
            if (d(a, b) != d(b, a))
                return fail("symmetry", {a, b});
            if (uniformly_discrete && a != b && d(a, b) == 0)
                return fail("positivity", {a, b});
        }
    for (Point a = 0; a < n; ++a)
        for (Point b = 0; b < n; ++b)
            for (Point c = 0; c < n; ++c)
                if (d(a, c) > d(a, b) + d(b, c))
                    return fail("triangle", {a, b, c});
    return {};
}

MetricMatrix induced_metric(const TernarySpace& space, unsigned threads)
{
    const auto n = static_cast<Point>(space.size());
    for (Point a = 0; a < n; ++a)
        for (Point x = 0; x < n; ++x) {
            if (space.mu(a, a, x) != a || space.mu(a, x, a) != a)
                throw AxiomError("(T1) fails at (" + std::to_string(a) + "," + std::to_string(x) + ")");
        }
    for (Point a = 0; a < n; ++a)
        for (Point x = 0; x < n; ++x)
            for (Point b = a + 1; b < n; ++b)
                if (space.mu(a, x, b) != space.mu(b, x, a))
                    throw AxiomError("(T2) fails at (" + std::to_string(a) + "," + std::to_string(x) + "," +
                                     std::to_string(b) + ")");

    std::vector<Ticks> weight(static_cast<std::size_t>(n) * n, 0);
    const auto& table = space.intervals();
    parallel_for(n, threads, [&](std::size_t a) {
        for (Point b = 0; b < n; ++b)
            weight[a * n + b] = static_cast<Ticks>(table.card(static_cast<Point>(a), b)) - 1;
    });

    // Dense Dijkstra: the edge set is complete, so an O(N^2) scan per source
    // beats a heap.
    MetricMatrix out(n);
    std::vector<std::vector<Ticks>> rows(n);
    parallel_for(n, threads, [&](std::size_t src) {
        constexpr Ticks inf = std::numeric_limits<Ticks>::max();
        std::vector<Ticks> dist(n, inf);
        std::vector<char> done(n, 0);
        dist[src] = 0;
        for (Point step = 0; step < n; ++step) {
            Point u = n;
            for (Point v = 0; v < n; ++v)
                if (!done[v] && (u == n || dist[v] < dist[u]))
                    u = v;
            done[u] = 1;
            const Ticks* w = &weight[static_cast<std::size_t>(u) * n];
            for (Point v = 0; v < n; ++v)
                if (!done[v] && dist[u] + w[v] < dist[v])
                    dist[v] = dist[u] + w[v];
        }
        rows[src] = std::move(dist);
    });
    for (Point a = 0; a < n; ++a)
        for (Point b = 0; b < n; ++b)
            out.set(a, b, rows[a][b]);
    return out;
}

MetricMatrix bfs_metric(const std::vector<std::vector<Point>>& adjacency)
{
    const auto n = static_cast<Point>(adjacency.size());
    MetricMatrix out(n);
    std::vector<Ticks> dist(n);
    std::vector<Point> queue(n);
    for (Point src = 0; src < n; ++src) {
        std::fill(dist.begin(), dist.end(), -1);
        dist[src] = 0;
        std::size_t head = 0, tail = 0;
        queue[tail++] = src;
        while (head < tail) {
            const Point u = queue[head++];
            for (Point v : adjacency[u]) {
                if (v >= n)
                    throw InputError("edge endpoint " + std::to_string(v) + " out of range");
                if (dist[v] < 0) {
                    dist[v] = dist[u] + 1;
                    queue[tail++] = v;
                }
            }
        }
        if (tail != n)
            throw InputError("graph is disconnected");
        for (Point v = 0; v < n; ++v)
            out.set(src, v, dist[v]);
    }
    return out;
}

MetricMatrix l1_product(const MetricMatrix& d1, const MetricMatrix& d2)
{
    const auto n1 = d1.size();
    const auto n2 = d2.size();
    const Ticks scale = std::lcm(d1.scale(), d2.scale());
    const Ticks f1 = scale / d1.scale();
    const Ticks f2 = scale / d2.scale();
    MetricMatrix out(n1 * n2, scale);
    for (Point i1 = 0; i1 < n1; ++i1)
        for (Point i2 = 0; i2 < n2; ++i2)
            for (Point j1 = 0; j1 < n1; ++j1)
                for (Point j2 = 0; j2 < n2; ++j2)
                    out.set(static_cast<Point>(i1 * n2 + i2), static_cast<Point>(j1 * n2 + j2),
                            d1(i1, j1) * f1 + d2(i2, j2) * f2);
    return out;
}

MetricMatrix restrict_metric(const MetricMatrix& d, const std::vector<Point>& points)
{
    MetricMatrix out(points.size(), d.scale());
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = 0; j < points.size(); ++j)
            out.set(static_cast<Point>(i), static_cast<Point>(j), d(points[i], points[j]));
    return out;
}

Ticks distance_to_set(const MetricMatrix& d, Point x, const std::vector<Point>& a)
{
    if (a.empty())
        throw InputError("distance to an empty set");
    Ticks best = std::numeric_limits<Ticks>::max();
    for (auto y : a)
        best = std::min(best, d(x, y));
    return best;
}

Ticks hausdorff(const MetricMatrix& d, const std::vector<Point>& a, const std::vector<Point>& b)
{
    if (a.empty() || b.empty())
        throw InputError("Hausdorff distance of an empty set");
    Ticks best = 0;
    for (auto x : a)
        best = std::max(best, distance_to_set(d, x, b));
    for (auto y : b)
        best = std::max(best, distance_to_set(d, y, a));
    return best;
}

std::vector<Point> neighborhood(const MetricMatrix& d, const std::vector<Point>& a, Ticks r)
{
    if (a.empty())
        throw InputError("neighbourhood of an empty set");
    std::vector<Point> out;
    const auto n = static_cast<Point>(d.size());
    for (Point x = 0; x < n; ++x)
        for (auto y : a)
            if (d(x, y) <= r) {
                out.push_back(x);
                break;
            }
    return out;
}

QIFit quasi_isometry_fit(const MetricMatrix& d1, const MetricMatrix& d2)
{
    if (d1.size() != d2.size())
        throw InputError("quasi-isometry fit: metrics have sizes " + std::to_string(d1.size()) + " and " +
                         std::to_string(d2.size()));
    const auto n = static_cast<Point>(d1.size());
    QIFit fit;
    const Ticks s1 = d1.scale(), s2 = d2.scale();
    const Ticks common = std::lcm(s1, s2);
    bool have_ratio = false;
    for (Point x = 0; x < n; ++x)
        for (Point y = x + 1; y < n; ++y) {
            const Ticks t1 = d1(x, y), t2 = d2(x, y);
            // Values as fractions: t1/s1 and t2/s2.
            if (t1 == 0 || t2 == 0) {
                if (t1 != t2 && fit.finite) {
                    fit.finite = false;
                    fit.L_witness = {x, y};
                }
            } else if (fit.finite) {
                Rational r1(t1 * s2, t2 * s1);
                Rational r = std::max(r1, Rational(t2 * s1, t1 * s2));
                if (!have_ratio || r > fit.L) {
                    fit.L = r;
                    fit.L_witness = {x, y};
                    have_ratio = true;
                }
            }
            const Ticks gap = std::abs(t1 * (common / s1) - t2 * (common / s2));
            const Rational g(gap, common);
            if (g > fit.C_affine) {
                fit.C_affine = g;
                fit.C_witness = {x, y};
            }
        }
    return fit;
}

GromovResult gromov_delta(const MetricMatrix& d, const ScanOptions& opt)
{
    const auto scan = max_scan<4>(
        d.size(), opt,
        [&](const Tuple<4>& t) {
            const Point a = t[0], b = t[1], c = t[2], p = t[3];
            // Twice the Gromov products, kept integral.
            const Ticks ab = d(a, p) + d(b, p) - d(a, b);
            const Ticks bc = d(b, p) + d(c, p) - d(b, c);
            const Ticks ac = d(a, p) + d(c, p) - d(a, c);
            return std::min(ab, bc) - ac;
        },
        "gromov delta");
    GromovResult out;
    out.delta = Rational(std::max<Ticks>(scan.value, 0), 2 * d.scale());
    out.witness = scan.witness;
    out.mode = scan.mode;
    out.evaluated = scan.evaluated;
    return out;
}

}  // namespace cma
