#include <algorithm>
#include <numeric>

#include "cma/axioms.hpp"
#include "cma/generators.hpp"
#include "cma/parallel.hpp"
#include "cma/space.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cma;

TEST_SUITE("core")
{
    TEST_CASE("rational arithmetic stays reduced")
    {
        CHECK(Rational(6, -4) == Rational(-3, 2));
        CHECK(Rational(0, 5) == Rational(0));
        CHECK(Rational(7, 2).str() == "7/2");
        CHECK(Rational(4, 2).str() == "2");
        CHECK(Rational(1, 3) < Rational(1, 2));
        CHECK(parse_rational("10/4") == Rational(5, 2));
        CHECK(parse_rational("-3") == Rational(-3));
        CHECK_THROWS_AS(parse_rational("1/0"), InputError);
        CHECK_THROWS_AS(parse_rational("x"), InputError);
        CHECK_THROWS_AS(parse_rational("1/2/3"), InputError);
    }

    TEST_CASE("step function lookup is right-continuous")
    {
        StepFunction f{{0, 2, 5}, {0, 3, 4}};
        CHECK(f.at(-1) == 0);
        CHECK(f.at(0) == 0);
        CHECK(f.at(1) == 0);
        CHECK(f.at(2) == 3);
        CHECK(f.at(4) == 3);
        CHECK(f.at(100) == 4);
        CHECK(f.non_decreasing());
        CHECK_FALSE(StepFunction{{0, 1}, {2, 1}}.non_decreasing());
    }

    TEST_CASE("max witness prefers the smaller tuple on ties")
    {
        MaxWitness<std::vector<Point>> w;
        w.offer(3, {2, 1});
        w.offer(3, {1, 5});
        w.offer(2, {0, 0});
        CHECK(w.value == 3);
        CHECK(w.witness == std::vector<Point>{1, 5});
    }

    TEST_CASE("counter generator is position addressed")
    {
        CounterRng a(42), b(42, 5);
        for (int i = 0; i < 5; ++i)
            a.next();
        CHECK(a.next() == b.next());
        for (std::uint64_t c = 0; c < 1000; ++c)
            CHECK(counter_uniform(7, c, 13) < 13);
    }

    TEST_CASE("parallel_for rethrows the lowest failing item")
    {
        auto run = [](unsigned threads) {
            try {
                parallel_for(50, threads, [](std::size_t i) {
                    if (i == 17 || i == 33)
                        throw std::runtime_error(std::to_string(i));
                });
            } catch (const std::runtime_error& e) {
                return std::string(e.what());
            }
            return std::string();
        };
        CHECK(run(1) == "17");
        CHECK(run(4) == "17");
    }

    TEST_CASE("tuple scans agree across thread counts and sampled values stay below exhaustive")
    {
        auto f = [](const Tuple<3>& t) -> Ticks { return static_cast<Ticks>((t[0] * 7 + t[1] * 3 + t[2]) % 23); };
        ScanOptions one, many;
        many.threads = 8;
        const auto a = max_scan<3>(20, one, f, "test");
        const auto b = max_scan<3>(20, many, f, "test");
        CHECK(a.mode == ScanMode::exhaustive);
        CHECK(a.value == 22);
        CHECK(a.value == b.value);
        CHECK(a.witness == b.witness);
        ScanOptions s1 = one, s8 = many;
        s1.force_sampling = s8.force_sampling = true;
        s1.samples = s8.samples = 500;
        const auto c = max_scan<3>(20, s1, f, "test");
        const auto d = max_scan<3>(20, s8, f, "test");
        CHECK(c.mode == ScanMode::sampled);
        CHECK(c.value == d.value);
        CHECK(c.witness == d.witness);
        CHECK(c.value <= a.value);
        ScanOptions strict;
        strict.budget = 10;
        strict.allow_sampling = false;
        CHECK_THROWS_AS(max_scan<3>(20, strict, f, "test"), BudgetError);
    }

    TEST_CASE("space construction validates its table")
    {
        CHECK_THROWS_AS(TernarySpace::from_table(2, {0, 0, 0}, "short", false), InputError);
        std::vector<Point> bad(8, 0);
        bad[3] = 2;
        CHECK_THROWS_AS(TernarySpace::from_table(2, bad, "range", false), InputError);
        const auto s = gen_hypercube(2);
        CHECK_THROWS_AS((void)s.mu_checked(0, 4, 0), InputError);
        CHECK_THROWS_AS(interval(s, 0, 9), InputError);
    }

    TEST_CASE("intervals match direct enumeration, cold and cached")
    {
        for (const auto& s : {gen_hypercube(3), gen_grid({2, 3}), gen_tree_random(15, 3)}) {
            for (Point a = 0; a < s.size(); ++a)
                for (Point b = 0; b < s.size(); ++b) {
                    const auto cold = enumerate_interval(s, a, b);
                    const auto first = interval(s, a, b).members;
                    const auto again = interval(s, a, b).members;
                    CHECK(cold == oracle::members(s, a, b));
                    CHECK(first == cold);
                    CHECK(again == cold);
                    CHECK(std::binary_search(cold.begin(), cold.end(), a));
                    CHECK(std::binary_search(cold.begin(), cold.end(), b));
                    CHECK(cold == enumerate_interval(s, b, a));
                    // fixed points of the gate map
                    for (Point c : cold)
                        CHECK(s.mu(a, c, b) == c);
                }
        }
    }

    TEST_CASE("interval examples")
    {
        const auto sq = gen_hypercube(2);
        CHECK(interval(sq, 0, 3).members == std::vector<Point>{0, 1, 2, 3});
        for (Point a = 0; a < 4; ++a)
            CHECK(interval(sq, a, a).members == std::vector<Point>{a});
        const auto path = gen_graph_median(path_graph(3));
        CHECK(interval(path, 0, 2).members == std::vector<Point>{0, 1, 2});
    }

    TEST_CASE("interval cache is safe under concurrent fills")
    {
        const auto s = gen_grid({4, 4});
        std::vector<std::size_t> cards(s.size() * s.size());
        parallel_for(cards.size(), 8, [&](std::size_t i) {
            cards[i] = s.intervals().card(static_cast<Point>(i / s.size()), static_cast<Point>(i % s.size()));
        });
        for (std::size_t i = 0; i < cards.size(); ++i)
            CHECK(cards[i] == oracle::members(s, static_cast<Point>(i / s.size()), static_cast<Point>(i % s.size())).size());
    }

    TEST_CASE("table and rule storage agree")
    {
        const std::vector<int> dims{3, 3, 3};
        auto clamp = [dims](Point a, Point b, Point c) {
            const auto x = grid_coords(dims, a), y = grid_coords(dims, b), z = grid_coords(dims, c);
            std::vector<int> m(dims.size());
            for (std::size_t i = 0; i < dims.size(); ++i)
                m[i] = std::max(std::min(x[i], y[i]), std::min(std::max(x[i], y[i]), z[i]));
            return grid_index(dims, m);
        };
        const auto table = TernarySpace::from_rule(64, clamp, "t", true);
        const auto rule = TernarySpace::from_rule(64, clamp, "r", true, true);
        const auto gen = gen_grid(dims);
        REQUIRE(table.has_table());
        REQUIRE_FALSE(rule.has_table());
        for (Point a = 0; a < 64; ++a)
            for (Point b = 0; b < 64; ++b)
                for (Point c = 0; c < 64; ++c) {
                    const Point v = table.mu(a, b, c);
                    if (v != rule.mu(a, b, c) || v != gen.mu(a, b, c))
                        FAIL("storages disagree at " << a << "," << b << "," << c);
                }
        CHECK_FALSE(gen_grid({4, 4, 4}).has_table());
    }

    TEST_CASE("iterated median")
    {
        const auto s = gen_hypercube(3);
        CHECK_THROWS_AS(iterated_median(s, {}, 0), InputError);
        for (Point x = 0; x < 8; ++x)
            for (Point b = 0; b < 8; ++b)
                CHECK(iterated_median(s, {x}, b) == x);
        for (Point a = 0; a < 8; ++a)
            for (Point b = 0; b < 8; ++b)
                for (Point c = 0; c < 8; ++c)
                    CHECK(iterated_median(s, {a, b}, c) == s.mu(a, b, c));
        CHECK(iterated_median(s, {1, 2, 4}, 7) == 7);
        // left to right: mu(mu(x1,x2,b), x3, b)
        CHECK(iterated_median(s, {1, 2, 4}, 0) == s.mu(s.mu(1, 2, 0), 4, 0));
    }

    TEST_CASE("permutation and absorption defects vanish on median algebras")
    {
        const auto s = gen_hypercube(3);
        const auto d = induced_metric(s);
        for (Point a = 0; a < 8; ++a)
            for (Point b = 0; b < 8; ++b)
                for (Point c = 0; c < 8; ++c)
                    for (Point base = 0; base < 8; ++base) {
                        CHECK(permutation_defect(s, d, {a, b, c}, base) == 0);
                        for (std::size_t k = 1; k <= 3; ++k)
                            CHECK(absorption_defect(s, d, k, {a, b, c}, base) == 0);
                    }
        CHECK(permutation_defect(s, d, {5}, 2) == 0);
        CHECK_THROWS_AS(permutation_defect(s, d, {0, 1, 2, 3, 4, 5, 6}, 0), BudgetError);
        CHECK(permutation_defect(s, d, {0, 1, 2, 3, 4, 5, 6}, 0, 7) == 0);
        CHECK_THROWS_AS(absorption_defect(s, d, 0, {1, 2}, 0), InputError);
        CHECK_THROWS_AS(absorption_defect(s, d, 3, {1, 2}, 0), InputError);
    }

    TEST_CASE("defects on a perturbed grid match a direct computation")
    {
        const auto g = gen_grid({3, 3});
        const auto p = perturb(g, grid_l1_metric({3, 3}), {1, 11});
        const auto d = induced_metric(p);
        Ticks worst_perm = 0, worst_abs = 0;
        for (Point a = 0; a < p.size(); ++a)
            for (Point b = 0; b < p.size(); ++b)
                for (Point c = 0; c < p.size(); ++c) {
                    const Point base = (a + 2 * b + 3 * c) % static_cast<Point>(p.size());
                    std::vector<Point> xs{a, b, c};
                    const Point ref = iterated_median(p, xs, base);
                    Ticks expect = 0;
                    std::sort(xs.begin(), xs.end());
                    do
                        expect = std::max(expect, d(iterated_median(p, xs, base), ref));
                    while (std::next_permutation(xs.begin(), xs.end()));
                    const Ticks got = permutation_defect(p, d, {a, b, c}, base);
                    CHECK(got == expect);
                    worst_perm = std::max(worst_perm, got);
                    const Ticks ab = absorption_defect(p, d, 2, {a, b, c}, base);
                    CHECK(ab == d(p.mu(a, b, iterated_median(p, {a, b, c}, base)), p.mu(a, b, base)));
                    worst_abs = std::max(worst_abs, ab);
                }
        CHECK(worst_perm >= 0);
        CHECK(worst_abs >= 0);
    }
}
