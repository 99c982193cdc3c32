#include <algorithm>

#include "cma/axioms.hpp"
#include "cma/generators.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cma;

namespace {

TernarySpace small_perturbed(std::uint64_t seed)
{
    return perturb(gen_grid({2, 2}), grid_l1_metric({2, 2}), {1, seed});
}

}  // namespace

TEST_SUITE("axioms")
{
    TEST_CASE("identity checks on median and broken tables")
    {
        for (const auto& s : {gen_hypercube(3), gen_grid({3, 3}), gen_tree_random(15, 1)}) {
            CHECK(check_m1_m2(s).pass);
            CHECK(check_4pt(s).pass);
            CHECK(check_median_5pt(s).pass);
        }
        const auto one = TernarySpace::from_table(1, {0}, "point", true);
        CHECK(check_m1_m2(one).pass);
        CHECK(check_median_5pt(one).pass);
        CHECK(check_4pt(one).pass);

        auto table = gen_hypercube(1).table();
        table[(0 * 2 + 0) * 2 + 1] = 1;  // mu(0,0,1) = 1
        const auto bad = TernarySpace::from_table(2, table, "bad", false);
        const auto r = check_m1_m2(bad);
        CHECK_FALSE(r.pass);
        CHECK(r.failure == "M1");
        CHECK(r.witness == std::vector<Point>{0, 0, 1});

        table = gen_hypercube(2).table();
        table[(1 * 4 + 2) * 4 + 3] = 0;  // only one ordering changed
        const auto asym = TernarySpace::from_table(4, table, "asym", false);
        const auto r2 = check_m1_m2(asym);
        CHECK_FALSE(r2.pass);
        CHECK(r2.failure == "M2");
    }

    TEST_CASE("perturbed grid keeps M1 and M2 and breaks the five-point identity")
    {
        const auto p = perturb(gen_grid({4, 4}), grid_l1_metric({4, 4}), {1, 2});
        CHECK(check_m1_m2(p).pass);
        const auto five = check_median_5pt(p);
        CHECK_FALSE(five.pass);
        const auto& w = five.witness;
        REQUIRE(w.size() == 5);
        CHECK(p.mu(w[0], w[1], p.mu(w[2], w[3], w[4])) !=
              p.mu(p.mu(w[0], w[1], w[2]), p.mu(w[0], w[1], w[3]), w[4]));
    }

    TEST_CASE("four-point pass implies five-point pass on median generators")
    {
        for (const auto& s : {gen_hypercube(2), gen_grid({2, 2}), gen_graph_median(star_graph(4)),
                              gen_graph_median(cycle_graph(4)), gen_spiked_line(2).sub})
            if (check_4pt(s).pass)
                CHECK(check_median_5pt(s).pass);
    }

    TEST_CASE("K is one exactly on median algebras")
    {
        for (const auto& s : {gen_hypercube(1), gen_hypercube(3), gen_grid({2, 2}), gen_tree_random(12, 4)}) {
            CHECK(m3prime_constant(s).value == 1);
            CHECK(check_median_5pt(s).pass);
        }
        for (std::uint64_t seed : {1, 2, 3}) {
            const auto p = small_perturbed(seed);
            const auto K = m3prime_constant(p);
            CHECK((K.value == 1) == check_median_5pt(p).pass);
            // re-verify the witness
            const auto& w = K.witness;
            const Point lhs = p.mu(w[0], w[1], p.mu(w[2], w[3], w[4]));
            const Point rhs = p.mu(p.mu(w[0], w[1], w[2]), p.mu(w[0], w[1], w[3]), w[4]);
            CHECK(static_cast<Ticks>(oracle::members(p, lhs, rhs).size()) == K.value);
        }
    }

    TEST_CASE("coarse constants match direct scans")
    {
        for (std::uint64_t seed : {1, 5}) {
            const auto p = small_perturbed(seed);
            const auto d = induced_metric(p);
            const std::size_t n = p.size();
            Ticks k0 = 0, k4 = 0, k5 = 0, K = 0;
            std::vector<Ticks> rho_at(d.diameter() + 1, 0);
            for (Point a = 0; a < n; ++a)
                for (Point b = 0; b < n; ++b)
                    for (Point c = 0; c < n; ++c) {
                        const Point m = p.mu(a, b, c);
                        k0 = std::max({k0, d(p.mu(a, a, b), a), d(p.mu(a, c, b), m), d(p.mu(b, a, c), m),
                                       d(p.mu(b, c, a), m), d(p.mu(c, a, b), m), d(p.mu(c, b, a), m)});
                        for (Point e = 0; e < n; ++e) {
                            k4 = std::max(k4, d(p.mu(p.mu(a, b, c), b, e), p.mu(a, b, p.mu(c, b, e))));
                            rho_at[d(a, e)] = std::max(rho_at[d(a, e)], d(p.mu(a, b, c), p.mu(e, b, c)));
                            for (Point f = 0; f < n; ++f) {
                                const Point l = p.mu(a, b, p.mu(c, e, f));
                                const Point r = p.mu(p.mu(a, b, c), p.mu(a, b, e), f);
                                k5 = std::max(k5, d(l, r));
                                K = std::max(K, static_cast<Ticks>(oracle::members(p, l, r).size()));
                            }
                        }
                    }
            for (std::size_t t = 1; t < rho_at.size(); ++t)
                rho_at[t] = std::max(rho_at[t], rho_at[t - 1]);

            const auto rep = coarse_params(p, d);
            CHECK(rep.kappa0.value == k0);
            CHECK(k0 == 0);
            CHECK(rep.kappa4.value == k4);
            CHECK(rep.kappa5.value == k5);
            CHECK(rep.K.value == K);
            CHECK_FALSE(rep.any_sampled());
            CHECK(rep.rho.non_decreasing());
            CHECK(rep.rho.at(0) == 0);
            for (Ticks t = 0; t <= d.diameter(); ++t)
                CHECK(rep.rho.at(t) == rho_at[t]);
            CHECK(rep.rho_prime(2) == 3 * rep.rho.at(2));

            // witnesses reproduce their values
            const auto& w4 = rep.kappa4.witness;
            CHECK(d(p.mu(p.mu(w4[0], w4[1], w4[2]), w4[1], w4[3]), p.mu(w4[0], w4[1], p.mu(w4[2], w4[1], w4[3]))) ==
                  k4);
            const auto again = coarse_params(p, d);
            CHECK(again.kappa4.witness == rep.kappa4.witness);
            CHECK(again.kappa5.witness == rep.kappa5.witness);
            ScanOptions eight;
            eight.threads = 8;
            const auto par = coarse_params(p, d, eight);
            CHECK(par.kappa5.witness == rep.kappa5.witness);
            CHECK(par.rho.values == rep.rho.values);
        }
        const auto g = gen_grid({3, 3});
        const auto rep = coarse_params(g, induced_metric(g));
        CHECK(rep.kappa0.value == 0);
        CHECK(rep.kappa4.value == 0);
        CHECK(rep.kappa5.value == 0);
        CHECK(rep.K.value == 1);
    }

    TEST_CASE("sampled constants never exceed exhaustive ones")
    {
        const auto p = small_perturbed(3);
        const auto d = induced_metric(p);
        const auto full = kappa5_constant(p, d);
        ScanOptions s;
        s.force_sampling = true;
        s.samples = 5000;
        const auto part = kappa5_constant(p, d, s);
        CHECK(part.mode == ScanMode::sampled);
        CHECK(part.lower_bound());
        CHECK(part.value <= full.value);
        s.threads = 8;
        CHECK(kappa5_constant(p, d, s).witness == part.witness);
    }

    TEST_CASE("affine upper fit lies above the envelope")
    {
        StepFunction f{{0, 1, 2, 4}, {0, 3, 4, 9}};
        const auto fit = affine_upper_fit(f, 1);
        for (std::size_t i = 0; i < f.args.size(); ++i)
            CHECK(Rational(f.values[i]) <= Rational(fit.slope.num * f.args[i] * fit.offset.den + fit.offset.num * fit.slope.den,
                                                    fit.slope.den * fit.offset.den));
    }

    TEST_CASE("quasi-morphism defect")
    {
        const auto g = gen_grid({4, 4});
        const auto line = gen_grid({4});
        std::vector<Point> id(25), proj(25);
        for (Point x = 0; x < 25; ++x) {
            id[x] = x;
            proj[x] = static_cast<Point>(grid_coords({4, 4}, x)[0]);
        }
        CHECK(quasi_morphism_defect(id, g, g, induced_metric(g)).value == 0);
        CHECK(quasi_morphism_defect(proj, g, line, induced_metric(line)).value == 0);
        CHECK_THROWS_AS(quasi_morphism_defect({0, 1}, g, g, induced_metric(g)), RangeError);
        std::vector<Point> out = id;
        out[3] = 99;
        CHECK_THROWS_AS(quasi_morphism_defect(out, g, g, induced_metric(g)), RangeError);
    }

    TEST_CASE("bounded valency profile")
    {
        const auto cube = bounded_valency_profile(gen_hypercube(3));
        CHECK(cube.at(1) == 1);
        CHECK(cube.at(2) == 4);
        CHECK(cube.non_decreasing());
        const auto path = bounded_valency_profile(gen_graph_median(path_graph(9)));
        for (Ticks R = 1; R <= 5; ++R)
            CHECK(path.at(R) == 2 * R - 1);
    }

    TEST_CASE("unit complex and quasi-geodesic check")
    {
        const auto g = grid_graph({3, 2});
        const auto s = gen_graph_median(g);
        const auto p1 = rips_complex_graph(s, 1);
        CHECK(p1.edges.size() == g.edges.size());
        const auto rep = quasi_geodesic_check(s, 1);
        CHECK(rep.connected);
        CHECK(rep.exact);
        CHECK(rep.fit.L == Rational(1));
        CHECK_THROWS_AS(rips_complex_graph(s, 0), InputError);

        const auto one = quasi_geodesic_check(TernarySpace::from_table(1, {0}, "pt", true), 3);
        CHECK(one.connected);
        CHECK(one.fit.L == Rational(1));
        CHECK(one.fit.C == Rational(0));

        const auto sl = gen_spiked_line(4);
        CHECK(quasi_geodesic_check(sl.sub, 1).connected);
    }
}
