#include "cma/rank.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "cma/interval_distance.hpp"
#include "cma/parallel.hpp"

namespace cma {

namespace {

constexpr std::size_t max_unit_graph_points = 4096;

// In a median algebra x,y are adjacent exactly when [x,y] = {x,y}.
bool unit_pair(const TernarySpace& space, Point x, Point y)
{
    const auto n = static_cast<Point>(space.size());
    for (Point z = 0; z < n; ++z) {
        const Point m = space.mu(x, z, y);
        if (m != x && m != y)
            return false;
    }
    return true;
}

// Largest clique of an undirected graph given as adjacency rows, by plain
// branch and bound; only used on vertex neighbourhoods.
void grow_clique(const std::vector<std::vector<char>>& rel, std::vector<std::size_t>& current,
                 std::vector<std::size_t> candidates, std::vector<std::size_t>& best)
{
    if (current.size() > best.size())
        best = current;
    if (current.size() + candidates.size() <= best.size())
        return;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const std::size_t v = candidates[i];
        std::vector<std::size_t> next;
        for (std::size_t j = i + 1; j < candidates.size(); ++j)
            if (rel[v][candidates[j]])
                next.push_back(candidates[j]);
        current.push_back(v);
        grow_clique(rel, current, std::move(next), best);
        current.pop_back();
        if (current.size() + (candidates.size() - i - 1) <= best.size())
            return;
    }
}

}  // namespace

bool is_cube_embedding(const TernarySpace& space, int n, const std::vector<Point>& f)
{
    const std::size_t size = std::size_t{1} << n;
    if (f.size() != size)
        return false;
    std::vector<Point> sorted = f;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        return false;
    for (std::size_t a = 0; a < size; ++a)
        for (std::size_t b = a + 1; b < size; ++b)
            for (std::size_t c = b + 1; c < size; ++c) {
                const std::size_t m = (a & b) | (b & c) | (a & c);
                if (space.mu(f[a], f[b], f[c]) != f[m])
                    return false;
            }
    return true;
}

namespace {

// Embeddings are determined by f(0), f(1) and the images e_i of the unit
// vectors: f(S) is the iterated median of {e_i : i in S} based at f(1).
bool embeds(const TernarySpace& space, int n)
{
    const auto N = static_cast<Point>(space.size());
    if (n == 0)
        return N >= 1;
    if (n == 1)
        return N >= 2;
    const std::size_t size = std::size_t{1} << n;
    std::vector<Point> e(n);
    std::vector<Point> f(size);
    for (Point o = 0; o < N; ++o)
        for (Point t = 0; t < N; ++t) {
            if (o == t)
                continue;
            const auto& box = space.intervals().members(o, t);
            std::vector<Point> inner;
            for (Point x : box)
                if (x != o && x != t)
                    inner.push_back(x);
            if (inner.size() + 2 < size)
                continue;
            // Choose e_1 < ... < e_n from inner with mu(o, e_i, e_j) = o.
            bool found = false;
            auto rec = [&](auto&& self, int level, std::size_t from) -> void {
                if (found)
                    return;
                if (level == n) {
                    f[0] = o;
                    for (std::size_t mask = 1; mask < size; ++mask) {
                        Point acc = 0;
                        bool first = true;
                        for (int i = 0; i < n; ++i)
                            if (mask & (std::size_t{1} << i)) {
                                acc = first ? e[i] : space.mu(acc, e[i], t);
                                first = false;
                            }
                        f[mask] = acc;
                    }
                    if (f[size - 1] == t && is_cube_embedding(space, n, f))
                        found = true;
                    return;
                }
                for (std::size_t k = from; k < inner.size(); ++k) {
                    const Point x = inner[k];
                    bool ok = true;
                    for (int j = 0; j < level && ok; ++j)
                        ok = space.mu(o, e[j], x) == o;
                    if (!ok)
                        continue;
                    e[level] = x;
                    self(self, level + 1, k + 1);
                    if (found)
                        return;
                }
            };
            rec(rec, 0, 0);
            if (found)
                return true;
        }
    return false;
}

}  // namespace

int brute_force_cube_rank(const TernarySpace& space)
{
    int n = 0;
    while ((std::size_t{1} << (n + 1)) <= space.size() && embeds(space, n + 1))
        ++n;
    return n;
}

CubeRank exact_cube_rank(const TernarySpace& space)
{
    if (!space.flagged_median())
        throw UnsupportedError("exact cube rank needs a median algebra; use the coarse rank tests instead");
    const auto N = static_cast<Point>(space.size());
    if (N > max_unit_graph_points)
        throw BudgetError("exact cube rank is limited to " + std::to_string(max_unit_graph_points) + " points");
    CubeRank out;
    if (N == 1)
        return out;

    std::vector<std::vector<Point>> adj(N);
    for (Point x = 0; x < N; ++x)
        for (Point y = x + 1; y < N; ++y)
            if (unit_pair(space, x, y)) {
                adj[x].push_back(y);
                adj[y].push_back(x);
            }
    const std::size_t words = (N + 63) / 64;
    std::vector<std::uint64_t> bits(static_cast<std::size_t>(N) * words, 0);
    for (Point x = 0; x < N; ++x)
        for (Point y : adj[x])
            bits[x * words + y / 64] |= std::uint64_t{1} << (y % 64);

    for (Point v = 0; v < N; ++v) {
        const auto& nb = adj[v];
        if (nb.empty())
            continue;
        // u ~ w when they have a common neighbour other than v.
        std::vector<std::vector<char>> rel(nb.size(), std::vector<char>(nb.size(), 0));
        for (std::size_t i = 0; i < nb.size(); ++i)
            for (std::size_t j = i + 1; j < nb.size(); ++j) {
                const std::uint64_t* a = &bits[nb[i] * words];
                const std::uint64_t* b = &bits[nb[j] * words];
                bool square = false;
                for (std::size_t w = 0; w < words && !square; ++w) {
                    std::uint64_t common = a[w] & b[w];
                    if (w == v / 64)
                        common &= ~(std::uint64_t{1} << (v % 64));
                    square = common != 0;
                }
                rel[i][j] = rel[j][i] = square;
            }
        std::vector<std::size_t> all(nb.size()), current, best;
        for (std::size_t i = 0; i < nb.size(); ++i)
            all[i] = i;
        grow_clique(rel, current, all, best);
        if (static_cast<int>(best.size()) > out.rank) {
            out.rank = static_cast<int>(best.size());
            out.witness = {v};
            for (auto i : best)
                out.witness.push_back(nb[i]);
        }
    }

    if (N <= brute_force_cube_limit) {
        out.brute_force = brute_force_cube_rank(space);
        if (*out.brute_force != out.rank)
            throw std::logic_error("cube rank: local rule gives " + std::to_string(out.rank) +
                                   " but exhaustive search gives " + std::to_string(*out.brute_force));
    }
    return out;
}

GrowthProfile growth_profile(const TernarySpace& space, const MetricMatrix& d)
{
    if (d.size() != space.size())
        throw InputError("metric size does not match the space");
    const auto N = static_cast<Point>(space.size());
    const auto grid = d.realized();
    GrowthProfile g;
    g.scale = d.scale();
    std::vector<Ticks> positive(grid.begin() + (grid.front() == 0 ? 1 : 0), grid.end());
    if (positive.size() < 3)
        throw RangeError("growth profile needs at least 3 distinct positive distances, found " +
                         std::to_string(positive.size()));
    g.radius = positive;
    g.max_card.assign(positive.size(), 0);
    g.witness.assign(positive.size(), {0, 0});
    const auto& table = space.intervals();
    for (Point a = 0; a < N; ++a)
        for (Point b = 0; b < N; ++b) {
            if (d(a, b) == 0)
                continue;
            const auto k = static_cast<std::size_t>(
                std::lower_bound(positive.begin(), positive.end(), d(a, b)) - positive.begin());
            const auto c = table.card(a, b);
            if (c > g.max_card[k]) {
                g.max_card[k] = c;
                g.witness[k] = {a, b};
            }
        }

    const double r_max = static_cast<double>(positive.back());
    while (g.window_start < positive.size() && static_cast<double>(positive[g.window_start]) < r_max / 2)
        ++g.window_start;
    if (positive.size() - g.window_start < 2)
        g.window_start = positive.size() - 2;

    std::vector<double> r, lc;
    for (std::size_t i = g.window_start; i < positive.size(); ++i) {
        r.push_back(static_cast<double>(positive[i]) / static_cast<double>(d.scale()));
        lc.push_back(std::log(static_cast<double>(g.max_card[i])));
    }

    {
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            mx += std::log(r[i]);
            my += lc[i];
        }
        mx /= static_cast<double>(r.size());
        my /= static_cast<double>(r.size());
        double sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            sxy += (std::log(r[i]) - mx) * (lc[i] - my);
            sxx += (std::log(r[i]) - mx) * (std::log(r[i]) - mx);
        }
        g.loglog_slope = sxx > 0 ? sxy / sxx : 0;
    }

    // A box with s sides of length r/s has ((r + s)/s)^s points; fit s.
    auto sse = [&](double s) {
        double e = 0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            const double model = s * std::log((r[i] + s) / s);
            e += (model - lc[i]) * (model - lc[i]);
        }
        return e;
    };
    double best_s = 0.01, best_e = sse(0.01);
    for (int k = 2; k <= 1600; ++k) {
        const double s = 0.01 * k;
        const double e = sse(s);
        if (e < best_e) {
            best_e = e;
            best_s = s;
        }
    }
    double lo = std::max(0.001, best_s - 0.01), hi = best_s + 0.01;
    for (int it = 0; it < 60; ++it) {
        const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
        if (sse(m1) <= sse(m2))
            hi = m2;
        else
            lo = m1;
    }
    g.slope = (lo + hi) / 2;
    g.residual = std::sqrt(sse(g.slope) / static_cast<double>(r.size()));
    g.rank = static_cast<int>(std::lround(g.slope));
    return g;
}

Constant slim_interval_delta(const TernarySpace& space, const MetricMatrix& d, const ScanOptions& opt)
{
    const auto dist = interval_distances(space, d);
    const auto& table = space.intervals();
    const std::size_t N = space.size();
    ScanOptions w = opt;
    w.budget = std::max<std::uint64_t>(opt.budget / std::max<std::size_t>(N / 2, 1), 1);
    auto r = max_scan<3>(
        N, w,
        [&](const Tuple<3>& t) -> Ticks {
            const Point a = t[0], b = t[1], c = t[2];
            const std::int32_t* ab = dist.row(a, b);
            const std::int32_t* bc = dist.row(b, c);
            Ticks worst = 0;
            for (Point y : table.members(a, c))
                worst = std::max<Ticks>(worst, std::min(ab[y], bc[y]));
            return worst;
        },
        "slim intervals");
    return Constant{r.value, std::vector<Point>(r.witness.begin(), r.witness.end()), r.mode, r.evaluated};
}

RankReport rank_report(const TernarySpace& space, const MetricMatrix& d, int max_n, const ScanOptions& opt,
                       const std::vector<Ticks>& thresholds)
{
    RankReport rep;
    rep.scale = d.scale();
    if (space.flagged_median())
        rep.cube_rank = exact_cube_rank(space);
    try {
        rep.growth = growth_profile(space, d);
    } catch (const RangeError& e) {
        rep.growth_error = e.what();
    }
    for (int n = 1; n <= max_n; ++n) {
        rep.thin_cubes.push_back(thin_cubes_envelope(space, d, n, opt, thresholds));
        rep.multi_median.push_back(multi_median_table(space, d, n, opt, thresholds));
    }
    rep.slim_delta = slim_interval_delta(space, d, opt);
    rep.gromov = gromov_delta(d, opt);
    return rep;
}

}  // namespace cma
