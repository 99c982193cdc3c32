#include <algorithm>
#include <cmath>

#include "cma/generators.hpp"
#include "cma/rank.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cma;

namespace {

ScanOptions threads(unsigned t)
{
    ScanOptions o;
    o.threads = t;
    return o;
}

std::vector<Point> corners(const std::vector<int>& dims)
{
    // Bit i of the cube vertex selects the far end of coordinate i.
    const std::size_t n = dims.size();
    std::vector<Point> out;
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        std::vector<int> c(n, 0);
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1)
                c[i] = dims[i];
        out.push_back(grid_index(dims, c));
    }
    return out;
}

}  // namespace

TEST_SUITE("rank")
{
    TEST_CASE("thin cube tables match tuple enumeration")
    {
        const auto tree = gen_tree_random(8, 11);
        const auto p22 = perturb(gen_grid({2, 2}), grid_l1_metric({2, 2}), {1, 7});
        const std::vector<std::pair<TernarySpace, MetricMatrix>> cases = {
            {tree, induced_metric(tree)},
            {gen_grid({2, 2}), grid_l1_metric({2, 2})},
            {p22, grid_l1_metric({2, 2})},
        };
        for (const auto& [s, d] : cases)
            for (int n : {1, 2}) {
                const auto t = thin_cubes_envelope(s, d, n);
                CHECK(t.mode == ScanMode::exhaustive);
                CHECK(t.table.non_decreasing());
                for (Ticks r : d.realized())
                    CHECK(t.at(r) == oracle::thin_cubes(s, d, n, r));
                // Witnesses reproduce their values.
                for (std::size_t i = 0; i < t.table.args.size(); ++i) {
                    const auto& w = t.witness[i];
                    REQUIRE(w.size() == static_cast<std::size_t>(n + 3));
                    const Point p = w[n + 1], q = w[n + 2];
                    Ticks xi = 0, m = -1;
                    for (int a = 0; a <= n; ++a) {
                        for (int b = 0; b <= n; ++b)
                            if (a != b)
                                xi = std::max(xi, d(p, s.mu(w[a], w[b], p)));
                        const Ticks v = d(p, s.mu(w[a], p, q));
                        m = m < 0 ? v : std::min(m, v);
                    }
                    CHECK(xi <= t.table.args[i]);
                    CHECK(m == t.table.values[i]);
                }
            }
    }

    TEST_CASE("multi-median tables match tuple enumeration")
    {
        const auto tree = gen_tree_random(7, 2);
        const auto p22 = perturb(gen_grid({2, 2}), grid_l1_metric({2, 2}), {1, 3});
        const std::vector<std::pair<TernarySpace, MetricMatrix>> cases = {
            {tree, induced_metric(tree)},
            {gen_grid({2, 2}), grid_l1_metric({2, 2})},
            {p22, grid_l1_metric({2, 2})},
        };
        for (const auto& [s, d] : cases)
            for (int n : {1, 2}) {
                const auto t = multi_median_table(s, d, n);
                CHECK(t.table.non_decreasing());
                for (Ticks r : d.realized()) {
                    CHECK(t.at(r) == oracle::multi_median(s, d, n, r));
                    CHECK(multi_median_envelope(s, d, n, r).value == t.at(r));
                }
            }
        CHECK_THROWS_AS((void)multi_median_envelope(tree, induced_metric(tree), 1, -1), InputError);
    }

    TEST_CASE("known envelope values on grids")
    {
        const auto s = gen_grid({4, 4});
        const auto d = grid_l1_metric({4, 4});
        CHECK(thin_cubes_envelope(s, d, 1, {}, {0}).at(0) == 4);
        CHECK(multi_median_table(s, d, 1, {}, {0}).at(0) == 4);
        CHECK(thin_cubes_envelope(s, d, 2, {}, {0}).at(0) == 0);
        CHECK(multi_median_table(s, d, 2, {}, {0}).at(0) == 0);
        // A tree has no thin squares: every n = 2 value is 0 at threshold 0.
        const auto tree = gen_tree_random(20, 1);
        CHECK(thin_cubes_envelope(tree, induced_metric(tree), 2, {}, {0}).at(0) == 0);
        const auto table = thin_cubes_envelope(s, d, 1, {}, {0});
        CHECK(table.at(-1) == -1);
    }

    TEST_CASE("envelopes do not depend on the thread count")
    {
        const auto s = perturb(gen_grid({3, 3}), grid_l1_metric({3, 3}), {1, 5});
        const auto d = grid_l1_metric({3, 3});
        for (int n : {1, 2}) {
            const auto a = thin_cubes_envelope(s, d, n, threads(1));
            const auto b = thin_cubes_envelope(s, d, n, threads(8));
            CHECK(a.table.values == b.table.values);
            CHECK(a.witness == b.witness);
            CHECK(a.work == b.work);
            const auto c = multi_median_table(s, d, n, threads(1));
            const auto e = multi_median_table(s, d, n, threads(8));
            CHECK(c.table.values == e.table.values);
            CHECK(c.witness == e.witness);
        }
    }

    TEST_CASE("budget cut-off samples base points and never overshoots")
    {
        const auto s = gen_grid({3, 3});
        const auto d = grid_l1_metric({3, 3});
        const auto full = thin_cubes_envelope(s, d, 2);
        ScanOptions tight;
        tight.budget = full.work / 4;
        const auto part = thin_cubes_envelope(s, d, 2, tight);
        CHECK(part.mode == ScanMode::sampled);
        CHECK(part.bases_done < part.bases_total);
        CHECK(part.bases_total == 16);
        for (Ticks r : d.realized())
            CHECK(part.at(r) <= full.at(r));
        ScanOptions forced;
        forced.force_sampling = true;
        forced.samples = full.work / 2;
        const auto f = multi_median_table(s, d, 1, forced);
        CHECK(f.mode == ScanMode::sampled);
        const auto exact = multi_median_table(s, d, 1);
        for (Ticks r : d.realized())
            CHECK(f.at(r) <= exact.at(r));
        ScanOptions none = tight;
        none.allow_sampling = false;
        CHECK_THROWS_AS((void)thin_cubes_envelope(s, d, 2, none), BudgetError);
    }

    TEST_CASE("exact cube rank")
    {
        const auto tree = gen_tree_random(9, 4);
        const auto rt = exact_cube_rank(tree);
        CHECK(rt.rank == 1);
        CHECK(rt.brute_force == 1);
        CHECK(oracle::cube_embeds(tree, 1));
        CHECK_FALSE(oracle::cube_embeds(tree, 2));

        const auto g22 = gen_grid({2, 2});
        CHECK(exact_cube_rank(g22).rank == 2);
        CHECK(oracle::cube_embeds(g22, 2));
        CHECK(exact_cube_rank(gen_grid({4, 4})).rank == 2);
        CHECK(exact_cube_rank(gen_grid({2, 1, 1})).rank == 3);

        const auto q4 = exact_cube_rank(gen_hypercube(4));
        CHECK(q4.rank == 4);
        CHECK(q4.brute_force == 4);
        CHECK(brute_force_cube_rank(gen_hypercube(3)) == 3);
        CHECK(exact_cube_rank(TernarySpace::from_table(1, {0}, "point", true)).rank == 0);

        const auto star = gen_graph_median(star_graph(5));
        CHECK(exact_cube_rank(star).rank == 1);
        CHECK(exact_cube_rank(gen_product(star, gen_tree_random(4, 1))).rank == 2);

        const auto bent = perturb(gen_grid({2, 2}), grid_l1_metric({2, 2}), {1, 1});
        CHECK_THROWS_AS((void)exact_cube_rank(bent), UnsupportedError);
    }

    TEST_CASE("cube embedding check")
    {
        const auto s = gen_grid({2, 2});
        CHECK(is_cube_embedding(s, 2, corners({2, 2})));
        CHECK(oracle::cube_defect(s, grid_l1_metric({2, 2}), corners({2, 2})) == 0);
        CHECK(is_cube_embedding(s, 1, {0, 8}));
        CHECK(is_cube_embedding(s, 2, {0, 1, 3, 4}));
        CHECK_FALSE(is_cube_embedding(s, 2, {0, 1, 2, 4}));
        CHECK_FALSE(is_cube_embedding(s, 1, {0, 0}));
    }

    TEST_CASE("growth profile")
    {
        const auto line = gen_grid({8});
        const auto g1 = growth_profile(line, grid_l1_metric({8}));
        CHECK(g1.rank == 1);
        CHECK(g1.slope == doctest::Approx(1.0).epsilon(0.01));
        const auto sq = gen_grid({8, 8});
        const auto d = grid_l1_metric({8, 8});
        const auto g2 = growth_profile(sq, d);
        CHECK(g2.rank == 2);
        // max card over pairs at each distance, by direct enumeration.
        for (std::size_t i = 0; i < g2.radius.size(); ++i) {
            std::size_t best = 0;
            for (Point a = 0; a < sq.size(); ++a)
                for (Point b = 0; b < sq.size(); ++b)
                    if (d(a, b) == g2.radius[i])
                        best = std::max(best, oracle::members(sq, a, b).size());
            CHECK(g2.max_card[i] == best);
            const auto [wa, wb] = g2.witness[i];
            CHECK(d(wa, wb) == g2.radius[i]);
        }
        CHECK(growth_profile(gen_grid({4, 4, 4}), grid_l1_metric({4, 4, 4})).rank == 3);
        CHECK_THROWS_AS((void)growth_profile(gen_hypercube(1), grid_l1_metric({1})), RangeError);
    }

    TEST_CASE("slim interval delta")
    {
        const auto tree = gen_tree_random(12, 8);
        const auto dt = induced_metric(tree);
        CHECK(slim_interval_delta(tree, dt).value == 0);
        CHECK(oracle::slim_delta(tree, dt) == 0);
        CHECK(slim_interval_delta(gen_hypercube(1), grid_l1_metric({1})).value == 0);
        Ticks prev = -1;
        for (int m : {1, 2, 3}) {
            const auto s = gen_grid({m, m});
            const auto d = grid_l1_metric({m, m});
            const auto v = slim_interval_delta(s, d);
            CHECK(v.value == oracle::slim_delta(s, d));
            CHECK(v.value > prev);
            prev = v.value;
        }
        const auto p = perturb(gen_grid({3, 3}), grid_l1_metric({3, 3}), {1, 9});
        CHECK(slim_interval_delta(p, grid_l1_metric({3, 3})).value == oracle::slim_delta(p, grid_l1_metric({3, 3})));
    }

    TEST_CASE("decomposition of exact cubes has no defect")
    {
        const auto s = gen_grid({4, 4});
        const auto d = grid_l1_metric({4, 4});
        const auto cube = make_cube(s, d, 2, corners({4, 4}));
        CHECK(cube.L == 0);
        CHECK(cube.separation == 4);
        const std::vector<Point> sub = {grid_index({4, 4}, {2, 0}), grid_index({4, 4}, {0, 3})};
        const auto dec = cube_decomposition(s, d, cube, sub);
        CHECK(dec.full.phi_defect == 0);
        CHECK(dec.full.psi_phi == 0);
        CHECK(dec.full.phi_psi == 0);
        CHECK(dec.full.interval_size == 25);
        CHECK(dec.full.product_size == 25);
        REQUIRE(dec.sub.has_value());
        CHECK(dec.sub->interval_size == 12);
        CHECK(dec.sub->top == grid_index({4, 4}, {2, 3}));
        CHECK(dec.sub->within_bounds());

        CHECK_THROWS_AS((void)make_cube(s, d, 2, {0, 1, 2}), RangeError);
        CHECK_THROWS_AS((void)cube_decomposition(s, d, cube, std::vector<Point>{24, 0}), RangeError);
    }

    TEST_CASE("decomposition of a perturbed cube stays within its bounds")
    {
        const auto d = grid_l1_metric({4, 4});
        for (std::uint64_t seed : {1, 2, 3}) {
            const auto s = perturb(gen_grid({4, 4}), d, {1, seed});
            const auto cube = make_cube(s, d, 2, corners({4, 4}));
            const auto a = cube_decomposition(s, d, cube, std::nullopt, threads(1));
            const auto b = cube_decomposition(s, d, cube, std::nullopt, threads(8));
            CHECK(a.full.within_bounds());
            CHECK(a.full.phi_defect == b.full.phi_defect);
            CHECK(a.full.psi_phi_witness == b.full.psi_phi_witness);
            CHECK(cube.L == oracle::cube_defect(s, d, cube.vertex_map));
        }
    }

    TEST_CASE("cube search")
    {
        const auto s = gen_grid({8, 8});
        const auto d = grid_l1_metric({8, 8});
        const auto r = cube_search(s, d, 2, 4);
        CHECK(r.found);
        REQUIRE(r.best.has_value());
        CHECK(r.best->L == 0);
        CHECK(r.best->separation >= 4);
        CHECK(oracle::cube_defect(s, d, r.best->vertex_map) == 0);

        const auto tree = gen_tree_random(12, 6);
        const auto none = cube_search(tree, induced_metric(tree), 2, 2);
        CHECK_FALSE(none.found);
        CHECK(none.mode == ScanMode::exhaustive);
        // Any two distinct points form an exact I^1.
        const auto edge = cube_search(tree, induced_metric(tree), 1, 1);
        CHECK(edge.found);
        CHECK(edge.best->L == 0);
        CHECK_THROWS_AS((void)cube_search(s, d, 0, 1), InputError);
    }

    TEST_CASE("rank report bundles every measurement")
    {
        const auto s = gen_grid({3, 3});
        const auto d = grid_l1_metric({3, 3});
        const auto r = rank_report(s, d, 2);
        REQUIRE(r.cube_rank.has_value());
        CHECK(r.cube_rank->rank == 2);
        CHECK(r.thin_cubes.size() == 2);
        CHECK(r.multi_median.size() == 2);
        CHECK(r.growth.has_value());
        const auto bent = perturb(s, d, {1, 2});
        const auto q = rank_report(bent, d, 1);
        CHECK_FALSE(q.cube_rank.has_value());
    }
}
