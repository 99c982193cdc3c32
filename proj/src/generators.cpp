#include "cma/generators.hpp"

#include <algorithm>
#include <mutex>
#include <set>

#include "cma/random.hpp"
#include "json.hpp"

namespace cma {

using nlohmann::json;

std::vector<std::vector<Point>> GraphSpec::adjacency() const
{
    std::vector<std::vector<Point>> adj(vertex_count);
    std::set<std::pair<Point, Point>> seen;
    for (auto [u, v] : edges) {
        if (u >= vertex_count || v >= vertex_count)
            throw InputError("edge (" + std::to_string(u) + "," + std::to_string(v) + ") out of range");
        if (u == v)
            throw InputError("loop at vertex " + std::to_string(u));
        if (!seen.insert({std::min(u, v), std::max(u, v)}).second)
            throw InputError("repeated edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    for (auto& row : adj)
        std::sort(row.begin(), row.end());
    return adj;
}

bool GraphSpec::connected() const
{
    if (vertex_count == 0)
        return false;
    const auto adj = adjacency();
    std::vector<char> seen(vertex_count, 0);
    std::vector<Point> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
        const Point u = stack.back();
        stack.pop_back();
        for (Point v : adj[u])
            if (!seen[v]) {
                seen[v] = 1;
                ++count;
                stack.push_back(v);
            }
    }
    return count == vertex_count;
}

GraphSpec path_graph(std::size_t n)
{
    GraphSpec g{n, {}};
    for (Point i = 1; i < n; ++i)
        g.edges.emplace_back(i - 1, i);
    return g;
}

GraphSpec cycle_graph(std::size_t n)
{
    if (n < 3)
        throw InputError("cycle needs at least 3 vertices");
    GraphSpec g = path_graph(n);
    g.edges.emplace_back(static_cast<Point>(n - 1), 0);
    return g;
}

GraphSpec star_graph(std::size_t leaves)
{
    GraphSpec g{leaves + 1, {}};
    for (Point i = 1; i <= leaves; ++i)
        g.edges.emplace_back(0, i);
    return g;
}

GraphSpec hypercube_graph(int n)
{
    if (n < 1 || n > 16)
        throw InputError("hypercube dimension must lie in [1,16]");
    const Point size = Point{1} << n;
    GraphSpec g{size, {}};
    for (Point x = 0; x < size; ++x)
        for (int i = 0; i < n; ++i) {
            const Point y = x ^ (Point{1} << i);
            if (x < y)
                g.edges.emplace_back(x, y);
        }
    return g;
}

namespace {

std::uint64_t grid_size(const std::vector<int>& dims, std::uint64_t budget)
{
    if (dims.empty())
        throw InputError("grid needs at least one dimension");
    std::uint64_t size = 1;
    for (int d : dims) {
        if (d < 1)
            throw InputError("grid side lengths must be at least 1");
        size *= static_cast<std::uint64_t>(d) + 1;
        if (size > budget)
            throw BudgetError("grid has more than " + std::to_string(budget) + " points");
    }
    return size;
}

json dims_json(const std::vector<int>& dims)
{
    return json(dims);
}

}  // namespace

std::vector<int> grid_coords(const std::vector<int>& dims, Point p)
{
    std::vector<int> c(dims.size());
    for (std::size_t i = dims.size(); i-- > 0;) {
        const auto radix = static_cast<Point>(dims[i] + 1);
        c[i] = static_cast<int>(p % radix);
        p /= radix;
    }
    return c;
}

Point grid_index(const std::vector<int>& dims, const std::vector<int>& coords)
{
    Point p = 0;
    for (std::size_t i = 0; i < dims.size(); ++i)
        p = p * static_cast<Point>(dims[i] + 1) + static_cast<Point>(coords[i]);
    return p;
}

GraphSpec grid_graph(const std::vector<int>& dims)
{
    const auto size = grid_size(dims, default_size_budget);
    GraphSpec g{size, {}};
    for (Point p = 0; p < size; ++p) {
        auto c = grid_coords(dims, p);
        for (std::size_t i = 0; i < dims.size(); ++i)
            if (c[i] < dims[i]) {
                ++c[i];
                g.edges.emplace_back(p, grid_index(dims, c));
                --c[i];
            }
    }
    return g;
}

MetricMatrix grid_l1_metric(const std::vector<int>& dims)
{
    const auto size = static_cast<Point>(grid_size(dims, default_size_budget));
    std::vector<std::vector<int>> coords(size);
    for (Point p = 0; p < size; ++p)
        coords[p] = grid_coords(dims, p);
    MetricMatrix d(size);
    for (Point a = 0; a < size; ++a)
        for (Point b = 0; b < size; ++b) {
            Ticks t = 0;
            for (std::size_t i = 0; i < dims.size(); ++i)
                t += std::abs(coords[a][i] - coords[b][i]);
            d.set(a, b, t);
        }
    return d;
}

GraphSpec random_tree_graph(std::size_t n, std::uint64_t seed)
{
    if (n < 1)
        throw InputError("tree needs at least one vertex");
    GraphSpec g{n, {}};
    for (Point i = 1; i < n; ++i)
        g.edges.emplace_back(static_cast<Point>(counter_uniform(seed, i, i)), i);
    return g;
}

TernarySpace gen_hypercube(int n)
{
    if (n < 1 || n > 16)
        throw InputError("hypercube dimension must lie in [1,16]");
    auto s = TernarySpace::from_rule(
        std::size_t{1} << n, [](Point a, Point b, Point c) { return (a & b) | (b & c) | (a & c); },
        "I^" + std::to_string(n), true);
    s.set_origin(json{{"generator", "hypercube"}, {"params", {{"n", n}}}}.dump());
    return s;
}

TernarySpace gen_grid(const std::vector<int>& dims, std::uint64_t budget)
{
    const auto size = static_cast<std::size_t>(grid_size(dims, budget));
    const std::size_t k = dims.size();
    // Flattened coordinates and strides, so the rule never divides.
    std::vector<int> coords(size * k);
    for (Point p = 0; p < size; ++p) {
        const auto c = grid_coords(dims, p);
        std::copy(c.begin(), c.end(), coords.begin() + static_cast<std::ptrdiff_t>(p * k));
    }
    std::vector<Point> stride(k, 1);
    for (std::size_t i = k - 1; i-- > 0;)
        stride[i] = stride[i + 1] * static_cast<Point>(dims[i + 1] + 1);
    auto rule = [coords = std::move(coords), stride, k](Point a, Point b, Point c) {
        Point out = 0;
        for (std::size_t i = 0; i < k; ++i) {
            const int x = coords[a * k + i], y = coords[b * k + i], z = coords[c * k + i];
            const int m = std::max(std::min(x, y), std::min(std::max(x, y), z));
            out += static_cast<Point>(m) * stride[i];
        }
        return out;
    };
    std::string label = "grid[";
    for (std::size_t i = 0; i < k; ++i)
        label += (i ? "," : "") + std::to_string(dims[i]);
    label += "]";
    auto s = TernarySpace::from_rule(size, std::move(rule), label, true);
    s.set_origin(json{{"generator", "grid"}, {"params", {{"dims", dims_json(dims)}}}}.dump());
    return s;
}

namespace {

// Lazily computed geodesic vertex sets, one per unordered pair, for graphs
// small enough to hold them all.
struct GeodesicCache {
    static constexpr std::size_t memo_limit = 1024;

    std::size_t n = 0;
    MetricMatrix dist;
    std::vector<std::vector<Point>> sets;
    std::unique_ptr<std::once_flag[]> flags;

    explicit GeodesicCache(const GraphSpec& g) : n(g.vertex_count), dist(bfs_metric(g.adjacency()))
    {
        if (n <= memo_limit) {
            sets.resize(n * (n + 1) / 2);
            flags = std::make_unique<std::once_flag[]>(n * (n + 1) / 2);
        }
    }

    [[nodiscard]] std::vector<Point> compute(Point a, Point b) const
    {
        std::vector<Point> out;
        const Ticks dab = dist(a, b);
        for (Point v = 0; v < n; ++v)
            if (dist(a, v) + dist(v, b) == dab)
                out.push_back(v);
        return out;
    }

    Point median(Point a, Point x, Point b)
    {
        if (a > b)
            std::swap(a, b);
        if (a == b)
            return a;
        auto pick = [&](const std::vector<Point>& geo) {
            Point best = geo.front();
            for (Point v : geo)
                if (dist(v, x) < dist(best, x))
                    best = v;
            return best;
        };
        if (sets.empty())
            return pick(compute(a, b));
        const std::size_t key = static_cast<std::size_t>(b) * (b + 1) / 2 + a;
        std::call_once(flags[key], [&] { sets[key] = compute(a, b); });
        return pick(sets[key]);
    }
};

}  // namespace

TernarySpace gen_graph_median(const GraphSpec& g)
{
    if (g.vertex_count == 0)
        throw InputError("graph has no vertices");
    if (!g.connected())
        throw InputError("graph is disconnected");
    auto cache = std::make_shared<GeodesicCache>(g);
    // Connected with n - 1 edges: a tree, hence a median graph. Other median
    // graphs are not recognised and stay unflagged.
    const bool tree = g.edges.size() + 1 == g.vertex_count;
    auto s = TernarySpace::from_rule(
        g.vertex_count, [cache](Point a, Point x, Point b) { return cache->median(a, x, b); },
        "graph(" + std::to_string(g.vertex_count) + ")", tree);
    json edges = json::array();
    for (auto [u, v] : g.edges)
        edges.push_back({u, v});
    s.set_origin(json{{"generator", "graph_median"}, {"params", {{"n", g.vertex_count}, {"edges", edges}}}}.dump());
    return s;
}

TernarySpace gen_tree_random(std::size_t n, std::uint64_t seed)
{
    auto s = gen_graph_median(random_tree_graph(n, seed));
    s.set_label("tree(" + std::to_string(n) + ",seed=" + std::to_string(seed) + ")");
    s.set_origin(json{{"generator", "tree_random"}, {"params", {{"n", n}, {"seed", seed}}}}.dump());
    return s;
}

TernarySpace gen_product(const TernarySpace& s1, const TernarySpace& s2, std::uint64_t budget)
{
    const std::size_t n1 = s1.size(), n2 = s2.size();
    if (n1 == 0 || n2 == 0)
        throw InputError("product of an empty space");
    if (n1 * n2 > budget)
        throw BudgetError("product has more than " + std::to_string(budget) + " points");
    auto rule = [s1, s2, n2](Point a, Point b, Point c) {
        const Point m1 = s1.mu(a / n2, b / n2, c / n2);
        const Point m2 = s2.mu(a % n2, b % n2, c % n2);
        return static_cast<Point>(m1 * n2 + m2);
    };
    auto s = TernarySpace::from_rule(n1 * n2, rule, s1.label() + "x" + s2.label(),
                                     s1.flagged_median() && s2.flagged_median());
    if (!s1.origin().empty() && !s2.origin().empty())
        s.set_origin(json{{"generator", "product"},
                          {"params", {{"left", json::parse(s1.origin())}, {"right", json::parse(s2.origin())}}}}
                         .dump());
    return s;
}

SpikedLine gen_spiked_line(int m)
{
    if (m < 1)
        throw InputError("spiked line needs m >= 1");
    if (m > 1000)
        throw BudgetError("spiked line size exceeds the budget");
    SpikedLine out;
    out.m = m;
    const auto line = static_cast<Point>(2 * m + 1);
    GraphSpec g{line, {}};
    for (Point i = 1; i < line; ++i)
        g.edges.emplace_back(i - 1, i);
    out.tip_in_tree.assign(line, 0);
    for (int k = -m; k <= m; ++k) {
        const Point base = static_cast<Point>(k + m);
        if (k == 0) {
            out.tip_in_tree[base] = base;
            continue;
        }
        Point prev = base;
        for (int j = 1; j <= std::abs(k); ++j) {
            const auto v = static_cast<Point>(g.vertex_count++);
            g.edges.emplace_back(prev, v);
            prev = v;
        }
        out.tip_in_tree[base] = prev;
    }
    out.tree_graph = g;
    out.tree = gen_graph_median(g);
    out.tree.set_label("spiked-tree(m=" + std::to_string(m) + ")");
    out.tree.set_origin(json{{"generator", "spiked_tree"}, {"params", {{"m", m}}}}.dump());

    // X: the integers, then the tips of the non-trivial spikes.
    for (Point i = 0; i < line; ++i)
        out.inclusion.push_back(i);
    out.tip_in_sub.assign(line, 0);
    for (int k = -m; k <= m; ++k) {
        const Point base = static_cast<Point>(k + m);
        if (k == 0) {
            out.tip_in_sub[base] = base;
            continue;
        }
        out.tip_in_sub[base] = static_cast<Point>(out.inclusion.size());
        out.inclusion.push_back(out.tip_in_tree[base]);
    }
    std::vector<Point> back(g.vertex_count, static_cast<Point>(-1));
    for (Point i = 0; i < out.inclusion.size(); ++i)
        back[out.inclusion[i]] = i;
    const TernarySpace tree = out.tree;
    const std::vector<Point> inc = out.inclusion;
    auto rule = [tree, inc, back](Point a, Point b, Point c) {
        const Point v = back[tree.mu(inc[a], inc[b], inc[c])];
        if (v == static_cast<Point>(-1))
            throw StructureError("spiked line: subset is not closed under the median");
        return v;
    };
    out.sub = TernarySpace::from_rule(out.inclusion.size(), rule, "spiked-line(m=" + std::to_string(m) + ")", true);
    out.sub.set_origin(json{{"generator", "spiked_line"}, {"params", {{"m", m}}}}.dump());
    return out;
}

std::vector<Point> perturbation_map(const MetricMatrix& d, const PerturbationSpec& spec)
{
    if (spec.radius < 0)
        throw InputError("perturbation radius must be non-negative");
    const auto n = static_cast<Point>(d.size());
    const Ticks r = d.units(spec.radius);
    std::vector<Point> g(n);
    std::vector<Point> ball;
    for (Point x = 0; x < n; ++x) {
        ball.clear();
        for (Point y = 0; y < n; ++y)
            if (d(x, y) <= r)
                ball.push_back(y);
        g[x] = ball[counter_uniform(spec.seed, x, ball.size())];
    }
    return g;
}

TernarySpace perturb(const TernarySpace& space, const MetricMatrix& d, const PerturbationSpec& spec)
{
    const auto n = static_cast<Point>(space.size());
    if (d.size() != n)
        throw InputError("metric size does not match the space");
    // Precondition scan, skipped on spaces too large for an N^3 pass.
    if (n <= 256) {
        for (Point a = 0; a < n; ++a)
            for (Point b = 0; b < n; ++b) {
                if (space.mu(a, a, b) != a)
                    throw AxiomError("perturb: (M1) fails at (" + std::to_string(a) + "," + std::to_string(b) + ")");
                for (Point c = 0; c < n; ++c) {
                    const Point m = space.mu(a, b, c);
                    if (m != space.mu(b, a, c) || m != space.mu(a, c, b))
                        throw AxiomError("perturb: (M2) fails at (" + std::to_string(a) + "," + std::to_string(b) +
                                         "," + std::to_string(c) + ")");
                }
            }
    }
    auto g = perturbation_map(d, spec);
    auto rule = [space, g = std::move(g)](Point a, Point b, Point c) {
        if (a == b || a == c)
            return a;
        if (b == c)
            return b;
        return g[space.mu(a, b, c)];
    };
    auto s = TernarySpace::from_rule(n, rule,
                                     space.label() + "~r" + std::to_string(spec.radius) + "s" +
                                         std::to_string(spec.seed),
                                     false);
    if (!space.origin().empty())
        s.set_origin(json{{"generator", "perturb"},
                          {"params",
                           {{"base", json::parse(space.origin())},
                            {"radius", spec.radius},
                            {"seed", spec.seed},
                            {"model", "ball-uniform displacement on pairwise distinct triples"}}}}
                         .dump());
    return s;
}

}  // namespace cma
