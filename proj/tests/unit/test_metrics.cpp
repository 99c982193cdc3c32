#include "cma/axioms.hpp"
#include "cma/generators.hpp"
#include "cma/metric.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cma;

TEST_SUITE("metrics")
{
    TEST_CASE("induced metric equals the shortest chain of interval weights")
    {
        for (const auto& s : {gen_hypercube(3), gen_grid({2, 3}), gen_tree_random(18, 2),
                              gen_graph_median(cycle_graph(5)),
                              perturb(gen_grid({3, 3}), grid_l1_metric({3, 3}), {1, 3})}) {
            const auto d = induced_metric(s);
            CHECK(oracle::same(d, oracle::induced(s)));
            CHECK(validate(d, true).ok);
            CHECK(induced_metric(s, 8) == d);
            for (Point a = 0; a < s.size(); ++a) {
                CHECK(d(a, a) == 0);
                for (Point b = 0; b < s.size(); ++b)
                    CHECK(d(a, b) <= static_cast<Ticks>(s.intervals().card(a, b)) - 1);
            }
        }
        const auto cube = induced_metric(gen_hypercube(3));
        CHECK(cube(0, 7) == 3);
    }

    TEST_CASE("induced metric is the edge-path metric on median graphs")
    {
        for (const auto& g : {random_tree_graph(40, 1), grid_graph({4, 3}), hypercube_graph(4), star_graph(5)})
            CHECK(oracle::same(induced_metric(gen_graph_median(g)), oracle::bfs(g)));
        CHECK(oracle::same(induced_metric(gen_grid({5, 4})), oracle::bfs(grid_graph({5, 4}))));
        CHECK(induced_metric(gen_grid({8, 8})) == grid_l1_metric({8, 8}));
    }

    TEST_CASE("induced metric reports the failed axiom")
    {
        auto table = gen_hypercube(2).table();
        table[(0 * 4 + 0) * 4 + 1] = 1;  // mu(0,0,1) = 1
        const auto t1 = TernarySpace::from_table(4, table, "no T1", false);
        try {
            (void)induced_metric(t1);
            FAIL("expected AxiomError");
        } catch (const AxiomError& e) {
            CHECK(std::string(e.what()).find("T1") != std::string::npos);
        }
        table = gen_hypercube(2).table();
        table[(0 * 4 + 1) * 4 + 3] = 0;  // mu(0,1,3) != mu(3,1,0)
        const auto t2 = TernarySpace::from_table(4, table, "no T2", false);
        try {
            (void)induced_metric(t2);
            FAIL("expected AxiomError");
        } catch (const AxiomError& e) {
            CHECK(std::string(e.what()).find("T2") != std::string::npos);
        }
    }

    TEST_CASE("metric validation names the failure")
    {
        MetricMatrix m(3);
        m.set(0, 1, 1);
        m.set(1, 0, 1);
        m.set(1, 2, 1);
        m.set(2, 1, 1);
        m.set(0, 2, 5);
        m.set(2, 0, 5);
        CHECK(validate(m).failure == "triangle");
        m.set(2, 0, 2);
        CHECK(validate(m).failure == "symmetry");
        m.set(0, 2, 0);
        m.set(2, 0, 0);
        CHECK(validate(m).ok);
        CHECK(validate(m, true).failure == "positivity");
        m.set(1, 1, 1);
        CHECK(validate(m).failure == "diagonal");
    }

    TEST_CASE("rational metrics use a common scale")
    {
        const auto m = MetricMatrix::from_rationals(2, {Rational(0), Rational(3, 2), Rational(3, 2), Rational(0)});
        CHECK(m.scale() == 2);
        CHECK(m(0, 1) == 3);
        CHECK(m.value(0, 1) == Rational(3, 2));
        CHECK(m.realized() == std::vector<Ticks>{0, 3});
    }

    TEST_CASE("bfs metric")
    {
        const auto g = path_graph(5);
        CHECK(oracle::same(bfs_metric(g.adjacency()), oracle::bfs(g)));
        CHECK_THROWS_AS(bfs_metric(GraphSpec{3, {{0, 1}}}.adjacency()), InputError);
    }

    TEST_CASE("hausdorff and neighbourhoods")
    {
        const auto d = bfs_metric(path_graph(5).adjacency());
        CHECK(hausdorff(d, {0}, {4}) == 4);
        CHECK(hausdorff(d, {0, 1, 2}, {0, 1, 2}) == 0);
        CHECK(hausdorff(d, {0, 4}, {1}) == 3);
        CHECK(neighborhood(d, {2}, 0) == std::vector<Point>{2});
        CHECK(neighborhood(d, {0, 4}, 1) == std::vector<Point>{0, 1, 3, 4});
        CHECK(distance_to_set(d, 2, {0, 4}) == 2);
        CHECK_THROWS_AS(hausdorff(d, {}, {1}), InputError);
        CHECK_THROWS_AS(neighborhood(d, {}, 1), InputError);
    }

    TEST_CASE("product and restriction")
    {
        const auto p = bfs_metric(path_graph(3).adjacency());
        const auto prod = l1_product(p, p);
        CHECK(prod == grid_l1_metric({2, 2}));
        const auto r = restrict_metric(prod, {8, 0});
        CHECK(r(0, 1) == 4);
    }

    TEST_CASE("quasi-isometry fit")
    {
        const auto d = induced_metric(gen_grid({4, 4}));
        const auto same = quasi_isometry_fit(d, d);
        CHECK(same.L == Rational(1));
        CHECK(same.C == Rational(0));
        CHECK(same.C_affine == Rational(0));
        CHECK(same.finite);
        const auto grid = quasi_isometry_fit(induced_metric(gen_grid({8, 8})), grid_l1_metric({8, 8}));
        CHECK(grid.L == Rational(1));
        CHECK(grid.C == Rational(0));

        // Doubling one distance: L = 2, affine slack = that distance.
        MetricMatrix a(3), b(3);
        for (Point x = 0; x < 3; ++x)
            for (Point y = 0; y < 3; ++y)
                if (x != y) {
                    a.set(x, y, 2);
                    b.set(x, y, (x + y == 1) ? 4 : 2);
                }
        const auto fit = quasi_isometry_fit(a, b);
        CHECK(fit.L == Rational(2));
        CHECK(fit.L_witness == std::pair<Point, Point>{0, 1});
        CHECK(fit.C_affine == Rational(2));
        CHECK_THROWS_AS(quasi_isometry_fit(a, MetricMatrix(2)), InputError);

        const auto p = perturb(gen_grid({4, 4}), grid_l1_metric({4, 4}), {1, 0});
        const auto qi = quasi_isometry_fit(grid_l1_metric({4, 4}), induced_metric(p));
        CHECK(qi.finite);
        // independent check of both one-sided bounds
        const auto d1 = grid_l1_metric({4, 4});
        const auto d2 = induced_metric(p);
        for (Point x = 0; x < 25; ++x)
            for (Point y = 0; y < 25; ++y) {
                CHECK(Rational(d1(x, y)) <= Rational(qi.L.num * d2(x, y), qi.L.den));
                CHECK(Rational(d2(x, y)) <= Rational(qi.L.num * d1(x, y), qi.L.den));
            }
    }

    TEST_CASE("gromov delta against the four-point scan")
    {
        for (const auto& g : {random_tree_graph(25, 3), grid_graph({2, 2}), grid_graph({3, 2}), cycle_graph(6)}) {
            const auto d = bfs_metric(g.adjacency());
            CHECK(gromov_delta(d).delta == Rational(oracle::gromov_doubled(d), 2));
        }
        CHECK(gromov_delta(bfs_metric(random_tree_graph(60, 8).adjacency())).delta == Rational(0));
        CHECK(gromov_delta(MetricMatrix::from_rationals(2, {0, 1, 1, 0})).delta == Rational(0));
        Rational prev(-1);
        for (int m : {2, 4, 6}) {
            const auto g = gromov_delta(grid_l1_metric({m, m}));
            CHECK(g.delta > prev);
            prev = g.delta;
        }
        CHECK(prev >= Rational(2));
    }
}
