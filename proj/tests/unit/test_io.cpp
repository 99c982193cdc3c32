#include <sstream>

#include "cma/generators.hpp"
#include "cma/interval_structure.hpp"
#include "cma/io.hpp"
#include "doctest.h"

using namespace cma;

namespace {

bool same_operation(const TernarySpace& a, const TernarySpace& b)
{
    if (a.size() != b.size())
        return false;
    for (Point x = 0; x < a.size(); ++x)
        for (Point y = 0; y < a.size(); ++y)
            for (Point z = 0; z < a.size(); ++z)
                if (a.mu(x, y, z) != b.mu(x, y, z))
                    return false;
    return true;
}

}  // namespace

TEST_SUITE("io")
{
    TEST_CASE("generator form round trips")
    {
        const std::vector<std::pair<std::string, std::string>> gens = {
            {"hypercube", R"({"n":3})"},
            {"grid", R"({"dims":[2,3]})"},
            {"path", R"({"n":5})"},
            {"star", R"({"leaves":4})"},
            {"graph_median", R"({"n":4,"edges":[[0,1],[1,2],[1,3]]})"},
            {"tree_random", R"({"n":9,"seed":4})"},
            {"product", R"({"left":{"generator":"path","params":{"n":3}},"right":{"generator":"star","params":{"leaves":2}}})"},
            {"spiked_tree", R"({"m":2})"},
            {"spiked_line", R"({"m":2})"},
            {"perturb", R"({"base":{"generator":"grid","params":{"dims":[2,2]}},"radius":1,"seed":3})"},
        };
        for (const auto& [name, params] : gens) {
            CAPTURE(name);
            const auto s = build_generator(name, params);
            const auto text = space_to_json(s);
            CHECK(text.find("\"generator\"") != std::string::npos);
            CHECK(same_operation(parse_space(text), s));
            const auto table = space_to_json(s, true);
            CHECK(table.find("\"mu\"") != std::string::npos);
            const auto back = parse_space(table);
            CHECK(same_operation(back, s));
            CHECK(back.flagged_median() == s.flagged_median());
        }
        CHECK(same_operation(build_generator("grid", R"({"dims":[2,2]})"), gen_grid({2, 2})));
        CHECK(same_operation(build_generator("tree_random", R"({"n":9,"seed":4})"), gen_tree_random(9, 4)));
    }

    TEST_CASE("malformed space files")
    {
        CHECK_THROWS_AS((void)parse_space("not json"), InputError);
        CHECK_THROWS_AS((void)parse_space("[1,2]"), InputError);
        CHECK_THROWS_AS((void)parse_space(R"({"n":2,"mu":[0,0,0]})"), InputError);
        CHECK_THROWS_AS((void)parse_space(R"({"n":1,"mu":[1]})"), InputError);
        CHECK_THROWS_AS((void)parse_space(R"({"n":0,"mu":[]})"), InputError);
        CHECK_THROWS_AS((void)parse_space(R"({"generator":"moebius","params":{}})"), InputError);
        CHECK_THROWS_AS((void)parse_space(R"({"generator":"grid","params":{"dims":"3"}})"), InputError);
        CHECK_THROWS_AS((void)parse_space(R"({"generator":"hypercube","params":{}})"), InputError);
        CHECK_THROWS_AS((void)read_space_file("/nonexistent/space.json"), InputError);
        const auto one = parse_space(R"({"n":1,"label":"dot","mu":[0]})");
        CHECK(one.size() == 1);
        CHECK(one.label() == "dot");
        CHECK_FALSE(one.flagged_median());
        CHECK(parse_space(R"({"n":1,"mu":[0],"median":true})").flagged_median());
    }

    TEST_CASE("graph files")
    {
        std::istringstream in("# a path\n3\n0 1\n\n1 2\n");
        const auto g = parse_graph(in);
        CHECK(g.vertex_count == 3);
        CHECK(g.edges.size() == 2);
        std::ostringstream out;
        write_graph(out, g);
        std::istringstream again(out.str());
        const auto h = parse_graph(again);
        CHECK(h.vertex_count == g.vertex_count);
        CHECK(h.edges == g.edges);

        for (const char* bad : {"", "x\n", "0\n", "3\n0\n", "3\n0 -1\n", "3\n0 1 2\n"}) {
            CAPTURE(bad);
            std::istringstream b(bad);
            CHECK_THROWS_AS((void)parse_graph(b), InputError);
        }
    }

    TEST_CASE("metric files keep exact fractions")
    {
        std::istringstream in("3\n0 1/2 1\n1/2 0 1/2\n1 1/2 0\n");
        const auto d = parse_metric(in);
        CHECK(d.scale() == 2);
        CHECK(d(0, 2) == 2);
        CHECK(d.value(0, 1) == Rational(1, 2));
        std::ostringstream out;
        write_metric(out, d);
        std::istringstream again(out.str());
        CHECK(parse_metric(again) == d);

        const auto g = grid_l1_metric({2, 2});
        std::ostringstream gout;
        write_metric(gout, g);
        std::istringstream gin(gout.str());
        CHECK(parse_metric(gin) == g);

        for (const char* bad : {"", "2\n0 1\n", "2\n0 1\n1 0 5\n", "2\n0 a\na 0\n", "2\n0 1/0\n1/0 0\n",
                                "2\n0 1\n1 0\n7\n"}) {
            CAPTURE(bad);
            std::istringstream b(bad);
            CHECK_THROWS_AS((void)parse_metric(b), InputError);
        }
    }

    TEST_CASE("interval structure files")
    {
        const auto is = intervals_from_median(gen_grid({1, 2}));
        const auto text = structure_to_json(is, Rational(0));
        const auto f = parse_structure(text);
        CHECK(f.structure.intervals == is.intervals);
        CHECK_FALSE(f.structure.primed);

        auto primed = is;
        primed.primed = true;
        primed.at(0, 5) = {0, 1, 5};
        const auto g = parse_structure(structure_to_json(primed, Rational(3, 2)));
        CHECK(g.structure.primed);
        CHECK(g.kappa0 == Rational(3, 2));
        CHECK(g.structure.at(0, 5) == std::vector<Point>{0, 1, 5});
        CHECK(g.structure.at(5, 0) == is.at(5, 0));

        const auto unsorted = parse_structure(R"({"n":2,"pairs":[[0,0,[0]],[0,1,[1,0,1]],[1,1,[1]]]})");
        CHECK(unsorted.structure.at(1, 0) == std::vector<Point>{0, 1});

        for (const char* bad : {
                 R"({"n":2,"pairs":[[0,0,[0]],[0,1,[0,1]]]})",
                 R"({"n":2,"pairs":[[0,0,[0]],[1,0,[0,1]],[1,1,[1]]]})",
                 R"({"n":2,"pairs":[[0,0,[0]],[0,1,[0,2]],[1,1,[1]]]})",
                 R"({"n":2,"pairs":[[0,0,[0]],[0,0,[0]],[0,1,[0,1]],[1,1,[1]]]})",
                 R"({"n":2,"kappa0":-1,"pairs":[]})",
                 R"({"n":0,"pairs":[]})",
                 R"({"n":2,"pairs":{}})",
             }) {
            CAPTURE(bad);
            CHECK_THROWS_AS((void)parse_structure(bad), InputError);
        }
    }
}
