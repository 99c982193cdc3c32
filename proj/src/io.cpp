#include "cma/io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace cma {

using nlohmann::json;

namespace {

json parse_json(const std::string& text, const char* what)
{
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(std::string(what) + ": " + e.what());
    }
}

template <class T>
T get(const json& j, const char* key, const char* what)
{
    if (!j.is_object() || !j.contains(key))
        throw InputError(std::string(what) + ": missing \"" + key + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InputError(std::string(what) + ": bad \"" + key + "\": " + e.what());
    }
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const char* what)
{
    if (!j.is_object() || !j.contains(key))
        return fallback;
    return get<T>(j, key, what);
}

Rational rational_from(const json& j, const char* what)
{
    if (j.is_number_integer())
        return Rational(j.get<std::int64_t>());
    if (j.is_string())
        return parse_rational(j.get<std::string>());
    throw InputError(std::string(what) + ": expected an integer or \"p/q\"");
}

GraphSpec graph_from_params(const json& p)
{
    GraphSpec g;
    g.vertex_count = get<std::size_t>(p, "n", "graph_median");
    for (const auto& e : get<std::vector<std::array<Point, 2>>>(p, "edges", "graph_median"))
        g.edges.emplace_back(e[0], e[1]);
    return g;
}

TernarySpace build(const std::string& name, const json& p)
{
    const char* what = "generator";
    if (name == "hypercube")
        return gen_hypercube(get<int>(p, "n", what));
    if (name == "grid")
        return gen_grid(get<std::vector<int>>(p, "dims", what));
    if (name == "path")
        return gen_graph_median(path_graph(get<std::size_t>(p, "n", what)));
    if (name == "star")
        return gen_graph_median(star_graph(get<std::size_t>(p, "leaves", what)));
    if (name == "graph_median")
        return gen_graph_median(graph_from_params(p));
    if (name == "tree_random")
        return gen_tree_random(get<std::size_t>(p, "n", what), get_or<std::uint64_t>(p, "seed", 0, what));
    if (name == "product") {
        const auto l = get<json>(p, "left", what);
        const auto r = get<json>(p, "right", what);
        return gen_product(build(get<std::string>(l, "generator", what), get_or<json>(l, "params", json::object(), what)),
                           build(get<std::string>(r, "generator", what), get_or<json>(r, "params", json::object(), what)));
    }
    if (name == "spiked_tree")
        return gen_spiked_line(get<int>(p, "m", what)).tree;
    if (name == "spiked_line")
        return gen_spiked_line(get<int>(p, "m", what)).sub;
    if (name == "perturb") {
        const auto b = get<json>(p, "base", what);
        const auto base =
            build(get<std::string>(b, "generator", what), get_or<json>(b, "params", json::object(), what));
        PerturbationSpec spec{get<std::int64_t>(p, "radius", what), get_or<std::uint64_t>(p, "seed", 0, what)};
        return perturb(base, induced_metric(base), spec);
    }
    throw InputError("unknown generator \"" + name + "\"");
}

}  // namespace

TernarySpace build_generator(const std::string& name, const std::string& params_json)
{
    return build(name, params_json.empty() ? json::object() : parse_json(params_json, "generator params"));
}

TernarySpace parse_space(const std::string& text)
{
    const json j = parse_json(text, "space file");
    const char* what = "space file";
    if (!j.is_object())
        throw InputError("space file: expected a JSON object");
    if (j.contains("generator")) {
        auto s = build(get<std::string>(j, "generator", what), get_or<json>(j, "params", json::object(), what));
        if (j.contains("label"))
            s.set_label(get<std::string>(j, "label", what));
        return s;
    }
    const auto n = get<std::size_t>(j, "n", what);
    auto mu = get<std::vector<std::int64_t>>(j, "mu", what);
    if (n == 0)
        throw InputError("space file: n must be positive");
    if (mu.size() != n * n * n)
        throw InputError("space file: mu has " + std::to_string(mu.size()) + " entries, expected " +
                         std::to_string(n * n * n));
    std::vector<Point> table(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (mu[i] < 0 || static_cast<std::size_t>(mu[i]) >= n)
            throw InputError("space file: mu entry " + std::to_string(i) + " = " + std::to_string(mu[i]) +
                             " out of range");
        table[i] = static_cast<Point>(mu[i]);
    }
    return TernarySpace::from_table(n, std::move(table), get_or<std::string>(j, "label", "table", what),
                                    get_or<bool>(j, "median", false, what));
}

std::string read_text_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

TernarySpace read_space_file(const std::string& path)
{
    return parse_space(read_text_file(path));
}

std::string space_to_json(const TernarySpace& space, bool table)
{
    json j;
    if (!table && !space.origin().empty()) {
        const json origin = json::parse(space.origin());
        j["generator"] = origin.at("generator");
        j["params"] = origin.at("params");
        j["label"] = space.label();
        return j.dump();
    }
    const std::size_t n = space.size();
    std::vector<Point> mu(n * n * n);
    for (Point a = 0; a < n; ++a)
        for (Point b = 0; b < n; ++b)
            for (Point c = 0; c < n; ++c)
                mu[(a * n + b) * n + c] = space.mu(a, b, c);
    j["n"] = n;
    j["label"] = space.label();
    j["median"] = space.flagged_median();
    j["mu"] = mu;
    return j.dump();
}

namespace {

// Next line that is neither blank nor a comment.
bool next_line(std::istream& in, std::string& line, std::size_t& lineno)
{
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        return true;
    }
    return false;
}

std::vector<std::string> split(const std::string& line)
{
    std::istringstream ss(line);
    std::vector<std::string> out;
    std::string tok;
    while (ss >> tok)
        out.push_back(tok);
    return out;
}

std::int64_t to_int(const std::string& tok, std::size_t lineno)
{
    const Rational r = parse_rational(tok);
    if (r.den != 1)
        throw InputError("line " + std::to_string(lineno) + ": expected an integer, got " + tok);
    return r.num;
}

}  // namespace

GraphSpec parse_graph(std::istream& in)
{
    std::string line;
    std::size_t lineno = 0;
    if (!next_line(in, line, lineno))
        throw InputError("graph file: missing vertex count");
    const auto head = split(line);
    if (head.size() != 1 || to_int(head[0], lineno) < 1)
        throw InputError("graph file line " + std::to_string(lineno) + ": expected a positive vertex count");
    GraphSpec g;
    g.vertex_count = static_cast<std::size_t>(to_int(head[0], lineno));
    while (next_line(in, line, lineno)) {
        const auto tok = split(line);
        if (tok.size() != 2)
            throw InputError("graph file line " + std::to_string(lineno) + ": expected \"u v\"");
        const auto u = to_int(tok[0], lineno), v = to_int(tok[1], lineno);
        if (u < 0 || v < 0)
            throw InputError("graph file line " + std::to_string(lineno) + ": negative vertex");
        g.edges.emplace_back(static_cast<Point>(u), static_cast<Point>(v));
    }
    (void)g.adjacency();  // validates
    return g;
}

void write_graph(std::ostream& out, const GraphSpec& g)
{
    out << g.vertex_count << '\n';
    for (auto [u, v] : g.edges)
        out << u << ' ' << v << '\n';
}

MetricMatrix parse_metric(std::istream& in)
{
    std::string line;
    std::size_t lineno = 0;
    if (!next_line(in, line, lineno))
        throw InputError("metric file: missing size");
    const auto head = split(line);
    if (head.size() != 1 || to_int(head[0], lineno) < 1)
        throw InputError("metric file line " + std::to_string(lineno) + ": expected a positive size");
    const auto n = static_cast<std::size_t>(to_int(head[0], lineno));
    std::vector<Rational> values;
    values.reserve(n * n);
    for (std::size_t row = 0; row < n; ++row) {
        if (!next_line(in, line, lineno))
            throw InputError("metric file: expected " + std::to_string(n) + " rows, got " + std::to_string(row));
        const auto tok = split(line);
        if (tok.size() != n)
            throw InputError("metric file line " + std::to_string(lineno) + ": expected " + std::to_string(n) +
                             " entries, got " + std::to_string(tok.size()));
        for (const auto& t : tok) {
            try {
                values.push_back(parse_rational(t));
            } catch (const InputError& e) {
                throw InputError("metric file line " + std::to_string(lineno) + ": " + e.what());
            }
        }
    }
    if (next_line(in, line, lineno))
        throw InputError("metric file line " + std::to_string(lineno) + ": trailing data");
    return MetricMatrix::from_rationals(n, values);
}

void write_metric(std::ostream& out, const MetricMatrix& d)
{
    const std::size_t n = d.size();
    out << n << '\n';
    for (Point a = 0; a < n; ++a) {
        for (Point b = 0; b < n; ++b) {
            if (b)
                out << ' ';
            out << d.to_rational(d(a, b)).str();
        }
        out << '\n';
    }
}

StructureFile parse_structure(const std::string& text)
{
    const json j = parse_json(text, "interval structure");
    const char* what = "interval structure";
    StructureFile f;
    auto& is = f.structure;
    is.n = get<std::size_t>(j, "n", what);
    if (is.n == 0)
        throw InputError("interval structure: n must be positive");
    is.primed = get_or<bool>(j, "primed", false, what);
    f.kappa0 = j.contains("kappa0") ? rational_from(j.at("kappa0"), what) : Rational(0);
    if (f.kappa0 < Rational(0))
        throw InputError("interval structure: kappa0 must be non-negative");
    is.intervals.assign(is.n * is.n, {});
    std::vector<char> seen(is.n * is.n, 0);
    const auto pairs = get<json>(j, "pairs", what);
    if (!pairs.is_array())
        throw InputError("interval structure: \"pairs\" must be an array");
    for (const auto& p : pairs) {
        if (!p.is_array() || p.size() != 3 || !p[0].is_number_unsigned() || !p[1].is_number_unsigned() ||
            !p[2].is_array())
            throw InputError("interval structure: each pair is [a, b, [members...]]");
        const auto a = p[0].get<std::size_t>(), b = p[1].get<std::size_t>();
        if (a >= is.n || b >= is.n)
            throw InputError("interval structure: pair (" + std::to_string(a) + "," + std::to_string(b) +
                             ") out of range");
        if (!is.primed && a > b)
            throw InputError("interval structure: unprimed files list pairs with a <= b only");
        if (seen[a * is.n + b])
            throw InputError("interval structure: pair (" + std::to_string(a) + "," + std::to_string(b) +
                             ") listed twice");
        seen[a * is.n + b] = 1;
        std::vector<Point> members;
        for (const auto& m : p[2]) {
            if (!m.is_number_unsigned() || m.get<std::size_t>() >= is.n)
                throw InputError("interval structure: member out of range in pair (" + std::to_string(a) + "," +
                                 std::to_string(b) + ")");
            members.push_back(m.get<Point>());
        }
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());
        is.intervals[a * is.n + b] = members;
        if (!is.primed)
            is.intervals[b * is.n + a] = std::move(members);
    }
    for (std::size_t a = 0; a < is.n; ++a)
        for (std::size_t b = 0; b < is.n; ++b) {
            const bool listed = seen[a * is.n + b] || (!is.primed && seen[b * is.n + a]);
            if (!listed)
                throw InputError("interval structure: pair (" + std::to_string(a) + "," + std::to_string(b) +
                                 ") missing");
        }
    return f;
}

std::string structure_to_json(const IntervalStructure& is, const Rational& kappa0)
{
    json pairs = json::array();
    for (Point a = 0; a < is.n; ++a)
        for (Point b = is.primed ? 0 : a; b < is.n; ++b)
            pairs.push_back(json::array({a, b, is.at(a, b)}));
    nlohmann::ordered_json j;
    j["n"] = is.n;
    j["primed"] = is.primed;
    if (kappa0.is_integer())
        j["kappa0"] = kappa0.num;
    else
        j["kappa0"] = kappa0.str();
    j["pairs"] = pairs;
    return j.dump();
}

}  // namespace cma
