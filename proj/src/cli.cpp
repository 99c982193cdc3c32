#include "cma/cli.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "cma/axioms.hpp"
#include "cma/generators.hpp"
#include "cma/interval_structure.hpp"
#include "cma/io.hpp"
#include "cma/metric.hpp"
#include "cma/rank.hpp"
#include "json.hpp"

namespace cma {

using ojson = nlohmann::ordered_json;

std::string sha256_hex(const std::string& bytes)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256 failed");
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i)
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    return hex.str();
}

namespace {

// Command-line state shared by every subcommand.
struct Common {
    std::uint64_t budget = ScanOptions{}.budget;
    std::uint64_t samples = ScanOptions{}.samples;
    std::uint64_t seed = ScanOptions{}.seed;
    unsigned threads = 1;
    bool sample = false;
    std::string format = "json";
    std::string metric = "induced";
    std::string metric_file;
    std::string output;

    [[nodiscard]] ScanOptions scan() const
    {
        ScanOptions o;
        o.budget = budget;
        o.samples = samples;
        o.seed = seed;
        o.threads = threads;
        o.force_sampling = sample;
        return o;
    }
};

struct Context {
    std::vector<std::string> args;
    Common common;
    std::vector<std::pair<std::string, std::string>> inputs;  // path, sha256
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    std::string load(const std::string& path)
    {
        auto text = read_text_file(path);
        inputs.emplace_back(path, sha256_hex(text));
        return text;
    }
};

ojson rational_json(const Rational& r)
{
    if (r.is_integer())
        return r.num;
    return r.str();
}

ojson dist(Ticks t, Ticks scale)
{
    return rational_json(Rational(t, scale));
}

ojson mode_fields(ojson j, ScanMode mode)
{
    j["mode"] = to_string(mode);
    j["lower_bound"] = mode == ScanMode::sampled;
    return j;
}

ojson constant_json(const Constant& c, Ticks scale)
{
    ojson j;
    j["value"] = dist(c.value, scale);
    j["witness"] = c.witness;
    j["evaluated"] = c.evaluated;
    return mode_fields(j, c.mode);
}

ojson count_json(const Constant& c)
{
    ojson j;
    j["value"] = c.value;
    j["witness"] = c.witness;
    j["evaluated"] = c.evaluated;
    return mode_fields(j, c.mode);
}

ojson check_json(const CheckResult& c)
{
    ojson j;
    j["pass"] = c.pass;
    if (!c.pass) {
        j["failure"] = c.failure;
        j["witness"] = c.witness;
    }
    j["evaluated"] = c.evaluated;
    return mode_fields(j, c.mode);
}

ojson step_json(const StepFunction& f, Ticks arg_scale, Ticks value_scale)
{
    ojson rows = ojson::array();
    for (std::size_t i = 0; i < f.args.size(); ++i)
        rows.push_back(ojson::array({dist(f.args[i], arg_scale), dist(f.values[i], value_scale)}));
    return rows;
}

ojson space_json(const TernarySpace& s)
{
    ojson j;
    j["label"] = s.label();
    j["n"] = s.size();
    j["median"] = s.flagged_median();
    // Generated spaces carry their recipe, including the perturbation model.
    if (!s.origin().empty())
        j["origin"] = ojson::parse(s.origin());
    return j;
}

ojson manifest(const Context& ctx)
{
    ojson m;
    m["tool"] = "cma";
    m["version"] = tool_version;
    m["command"] = ctx.args;
    m["seed"] = ctx.common.seed;
    m["budget"] = ctx.common.budget;
    m["samples"] = ctx.common.samples;
    m["threads"] = ctx.common.threads;
    m["forced_sampling"] = ctx.common.sample;
    ojson inputs = ojson::array();
    for (const auto& [path, digest] : ctx.inputs)
        inputs.push_back(ojson{{"path", path}, {"sha256", digest}});
    m["inputs"] = inputs;
    // The clock is the only non-reproducible input. SOURCE_DATE_EPOCH pins it
    // and drops the elapsed time so re-runs compare byte for byte.
    const char* epoch = std::getenv("SOURCE_DATE_EPOCH");
    std::time_t t = std::time(nullptr);
    if (epoch)
        t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    m["timestamp"] = buf;
    if (!epoch)
        m["elapsed_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                                ctx.start)
                              .count();
    return m;
}

void emit(const Context& ctx, std::ostream& out, const std::string& text)
{
    if (ctx.common.output.empty() || ctx.common.output == "-") {
        out << text;
        return;
    }
    std::ofstream f(ctx.common.output, std::ios::binary);
    if (!f)
        throw InputError("cannot write " + ctx.common.output);
    f << text;
}

void emit_report(Context& ctx, std::ostream& out, ojson body)
{
    ojson j;
    j["manifest"] = manifest(ctx);
    for (auto& [k, v] : body.items())
        j[k] = v;
    emit(ctx, out, j.dump(2) + "\n");
}

std::vector<Point> parse_points(const std::string& text)
{
    std::vector<Point> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        const Rational r = parse_rational(tok);
        if (!r.is_integer() || r.num < 0)
            throw InputError("expected a non-negative integer list, got \"" + text + "\"");
        out.push_back(static_cast<Point>(r.num));
    }
    return out;
}

std::vector<int> parse_ints(const std::string& text)
{
    std::vector<int> out;
    for (Point p : parse_points(text))
        out.push_back(static_cast<int>(p));
    return out;
}

MetricMatrix choose_metric(Context& ctx, const TernarySpace& s)
{
    if (!ctx.common.metric_file.empty()) {
        std::istringstream in(ctx.load(ctx.common.metric_file));
        auto d = parse_metric(in);
        if (d.size() != s.size())
            throw InputError("metric file has " + std::to_string(d.size()) + " points, space has " +
                             std::to_string(s.size()));
        const auto check = validate(d);
        if (!check.ok)
            throw InputError("metric file fails the " + check.failure + " check");
        return d;
    }
    if (ctx.common.metric == "induced")
        return induced_metric(s, ctx.common.threads);
    if (ctx.common.metric == "path") {
        const auto g = rips_complex_graph(s, 1);
        if (!g.connected())
            throw AxiomError("the unit complex of the space is disconnected; no path metric");
        return bfs_metric(g.adjacency());
    }
    throw InputError("unknown metric \"" + ctx.common.metric + "\" (expected induced or path)");
}

ojson params_json(const ParamReport& p)
{
    ojson j;
    j["kappa0"] = constant_json(p.kappa0, p.scale);
    ojson rho;
    rho["envelope"] = step_json(p.rho, p.scale, p.scale);
    rho["witness"] = p.rho_witness;
    rho["affine"] = ojson{{"slope", rational_json(p.rho_affine.slope)},
                          {"offset", rational_json(p.rho_affine.offset)},
                          {"residual", rational_json(p.rho_affine.residual)}};
    j["rho"] = mode_fields(rho, p.rho_mode);
    j["kappa4"] = constant_json(p.kappa4, p.scale);
    j["kappa5"] = constant_json(p.kappa5, p.scale);
    j["K"] = count_json(p.K);
    return j;
}

ojson axioms_body(Context& ctx, const TernarySpace& s)
{
    const auto opt = ctx.common.scan();
    ojson j;
    j["space"] = space_json(s);
    ojson checks;
    checks["m1_m2"] = check_json(check_m1_m2(s, opt));
    checks["four_point"] = check_json(check_4pt(s, opt));
    checks["five_point"] = check_json(check_median_5pt(s, opt));
    j["checks"] = checks;
    const auto valency = bounded_valency_profile(s);
    j["bounded_valency"] = step_json(valency, 1, 1);
    const auto d = choose_metric(ctx, s);
    j["metric"] = ojson{{"kind", ctx.common.metric_file.empty() ? ctx.common.metric : "file"},
                        {"scale", d.scale()},
                        {"diameter", dist(d.diameter(), d.scale())}};
    j["params"] = params_json(coarse_params(s, d, opt));
    j["params"]["rho"]["proper"] = "vacuous on a finite space";
    const auto qg = quasi_geodesic_check(s, 1, ctx.common.threads);
    ojson q;
    q["C"] = qg.C;
    q["edges"] = qg.edges;
    q["connected"] = qg.connected;
    if (qg.connected) {
        q["exact"] = qg.exact;
        q["L"] = rational_json(qg.fit.L);
        q["C_affine"] = rational_json(qg.fit.C_affine);
    }
    j["quasi_geodesic"] = q;
    return j;
}

ojson envelope_json(const EnvelopeTable& t)
{
    ojson j;
    j["n"] = t.n;
    ojson rows = ojson::array();
    for (std::size_t i = 0; i < t.table.args.size(); ++i) {
        const Ticks v = t.table.values[i];
        rows.push_back(ojson::array({dist(t.table.args[i], t.scale), v < 0 ? ojson(nullptr) : dist(v, t.scale)}));
    }
    j["table"] = rows;
    j["witness"] = t.witness;
    j["work"] = t.work;
    j["bases"] = ojson::array({t.bases_done, t.bases_total});
    return mode_fields(j, t.mode);
}

ojson rank_body(const TernarySpace& s, const RankReport& r, const std::string& rank_error)
{
    ojson j;
    j["space"] = space_json(s);
    if (!s.flagged_median())
        j["rank_note"] = "growth and envelope ranks are measured at this scale only, not certified";
    if (r.cube_rank) {
        ojson c;
        c["rank"] = r.cube_rank->rank;
        c["witness"] = r.cube_rank->witness;
        if (r.cube_rank->brute_force)
            c["brute_force"] = *r.cube_rank->brute_force;
        j["exact_cube_rank"] = c;
    } else {
        j["exact_cube_rank"] = nullptr;
        j["exact_cube_rank_note"] = rank_error;
    }
    if (r.growth) {
        const auto& g = *r.growth;
        ojson gj;
        ojson rows = ojson::array();
        for (std::size_t i = 0; i < g.radius.size(); ++i)
            rows.push_back(ojson::array({dist(g.radius[i], g.scale), g.max_card[i]}));
        gj["table"] = rows;
        gj["window_start"] = g.window_start;
        gj["slope"] = g.slope;
        gj["residual"] = g.residual;
        gj["loglog_slope"] = g.loglog_slope;
        gj["rank"] = g.rank;
        j["growth"] = gj;
    } else {
        j["growth"] = nullptr;
        j["growth_error"] = r.growth_error;
    }
    ojson thin = ojson::array(), multi = ojson::array();
    for (const auto& t : r.thin_cubes)
        thin.push_back(envelope_json(t));
    for (const auto& t : r.multi_median)
        multi.push_back(envelope_json(t));
    j["thin_cubes"] = thin;
    j["multi_median"] = multi;
    j["slim_interval_delta"] = constant_json(r.slim_delta, r.scale);
    ojson g;
    g["delta"] = rational_json(r.gromov.delta);
    g["witness"] = r.gromov.witness;
    g["evaluated"] = r.gromov.evaluated;
    j["gromov_delta"] = mode_fields(g, r.gromov.mode);
    return j;
}

std::string rank_csv(const RankReport& r)
{
    std::ostringstream out;
    out << "series,n,arg,value,mode\n";
    if (r.growth)
        for (std::size_t i = 0; i < r.growth->radius.size(); ++i)
            out << "growth,," << dist(r.growth->radius[i], r.scale).dump() << ',' << r.growth->max_card[i]
                << ",exhaustive\n";
    auto table = [&](const char* name, const EnvelopeTable& t) {
        for (std::size_t i = 0; i < t.table.args.size(); ++i) {
            out << name << ',' << t.n << ',' << dist(t.table.args[i], t.scale).dump() << ',';
            if (t.table.values[i] >= 0)
                out << dist(t.table.values[i], t.scale).dump();
            out << ',' << to_string(t.mode) << '\n';
        }
    };
    for (const auto& t : r.thin_cubes)
        table("thin_cubes", t);
    for (const auto& t : r.multi_median)
        table("multi_median", t);
    std::string text = out.str();
    // CSV wants bare p/q, not JSON strings.
    text.erase(std::remove(text.begin(), text.end(), '"'), text.end());
    return text;
}

RankReport run_rank(Context& ctx, const TernarySpace& s, const MetricMatrix& d, int max_n,
                    const std::vector<Ticks>& thresholds, std::string& rank_error)
{
    RankReport r;
    const auto opt = ctx.common.scan();
    r.scale = d.scale();
    if (s.flagged_median())
        r.cube_rank = exact_cube_rank(s);
    else
        rank_error = "space is not flagged median; exact cube rank needs a median algebra";
    try {
        r.growth = growth_profile(s, d);
    } catch (const RangeError& e) {
        r.growth_error = e.what();
    }
    for (int n = 1; n <= max_n; ++n) {
        r.thin_cubes.push_back(thin_cubes_envelope(s, d, n, opt, thresholds));
        r.multi_median.push_back(multi_median_table(s, d, n, opt, thresholds));
    }
    r.slim_delta = slim_interval_delta(s, d, opt);
    r.gromov = gromov_delta(d, opt);
    return r;
}

ojson hyperbolicity_body(Context& ctx, const TernarySpace& s, const MetricMatrix& d)
{
    const auto opt = ctx.common.scan();
    ojson j;
    j["space"] = space_json(s);
    j["slim_interval_delta"] = constant_json(slim_interval_delta(s, d, opt), d.scale());
    const auto g = gromov_delta(d, opt);
    ojson gj;
    gj["delta"] = rational_json(g.delta);
    gj["witness"] = g.witness;
    gj["evaluated"] = g.evaluated;
    j["gromov_delta"] = mode_fields(gj, g.mode);
    return j;
}

ojson roundtrip_json(const RoundTrip& r, Ticks scale)
{
    ojson j;
    j["defect"] = dist(r.defect, scale);
    j["bound"] = dist(r.bound, scale);
    j["kappa0"] = dist(r.kappa0, scale);
    j["witness"] = r.witness;
    return mode_fields(j, r.mode);
}

ojson structure_params_json(const StructureParams& p)
{
    ojson j;
    j["base_radius"] = dist(p.base_radius, p.scale);
    j["phi"] = step_json(p.phi, p.scale, p.scale);
    j["psi"] = step_json(p.psi, p.scale, p.scale);
    j["phi_witness"] = p.phi_witness;
    j["psi_witness"] = p.psi_witness;
    j["triples"] = p.triples;
    return mode_fields(j, p.mode);
}

ojson side_json(const DecompositionSide& s, Ticks scale)
{
    ojson j;
    j["origin"] = s.origin;
    j["top"] = s.top;
    j["corners"] = s.corners;
    j["interval_size"] = s.interval_size;
    j["product_size"] = s.product_size;
    j["phi_defect"] = ojson{{"value", dist(s.phi_defect, scale)}, {"bound", dist(s.phi_bound, scale)},
                            {"witness", s.phi_witness}};
    j["psi_phi"] = ojson{{"value", dist(s.psi_phi, scale)}, {"bound", dist(s.psi_phi_bound, scale)},
                         {"witness", s.psi_phi_witness}};
    j["phi_psi"] = ojson{{"value", dist(s.phi_psi, scale)}, {"bound", dist(s.phi_psi_bound, scale)},
                         {"witness", s.phi_psi_witness}};
    j["within_bounds"] = s.within_bounds();
    return j;
}

ojson cube_json(const CoarseCube& c, Ticks scale)
{
    ojson j;
    j["n"] = c.n;
    j["vertex_map"] = c.vertex_map;
    j["L"] = dist(c.L, scale);
    j["separation"] = dist(c.separation, scale);
    return j;
}

// ---- subcommand wiring ----

void add_common(CLI::App* app, Common& c, bool metric)
{
    app->add_option("--budget", c.budget, "Largest exhaustive scan, in tuples or work units");
    app->add_option("--samples", c.samples, "Tuples drawn when a scan is sampled");
    app->add_option("--seed", c.seed, "Seed for every sampled scan");
    app->add_option("--threads", c.threads, "Worker threads; results do not depend on it")
        ->check(CLI::Range(1u, 1024u));
    app->add_option("--sample", c.samples, "Force sampling with N draws")->each([&c](const std::string&) {
        c.sample = true;
    });
    app->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    app->add_option("-o,--output", c.output, "Write the result to a file");
    if (metric) {
        app->add_option("--metric", c.metric, "induced or path")->check(CLI::IsMember({"induced", "path"}));
        app->add_option("--metric-file", c.metric_file, "Read the metric from a matrix file");
    }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Context ctx;
    ctx.args = args;
    Common& c = ctx.common;

    CLI::App app{"Coarse median algebra toolkit", "cma"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    std::string space_path;
    auto* gen = app.add_subcommand("gen", "Generate a space file");
    std::string gen_name, dims, graph_path, left, right, base;
    int gen_n = 0, gen_m = 0;
    std::int64_t radius = 0;
    bool table = false;
    gen->add_option("generator", gen_name,
                    "hypercube, grid, path, star, tree, graph, spiked-line, spiked-tree, product, perturb")
        ->required();
    gen->add_option("--n", gen_n, "Dimension, vertex count or leaf count");
    gen->add_option("--dims", dims, "Grid side lengths, comma separated");
    gen->add_option("--m", gen_m, "Spiked line half-length");
    gen->add_option("--graph", graph_path, "Graph file for the graph generator");
    gen->add_option("--left", left, "Left factor space file");
    gen->add_option("--right", right, "Right factor space file");
    gen->add_option("--base", base, "Space file to perturb");
    gen->add_option("--radius", radius, "Perturbation radius in induced-metric units");
    gen->add_flag("--table", table, "Write the full operation table instead of the generator form");
    add_common(gen, c, false);

    auto* axioms = app.add_subcommand("axioms", "Axiom checks and coarse constants");
    axioms->add_option("space", space_path, "Space file")->required();
    add_common(axioms, c, true);

    auto* metric = app.add_subcommand("metric", "Write the metric matrix of a space");
    metric->add_option("space", space_path, "Space file")->required();
    bool induced_flag = false, path_flag = false;
    metric->add_flag("--induced", induced_flag, "Induced metric (default)");
    metric->add_flag("--path", path_flag, "Edge-path metric of the unit complex");
    add_common(metric, c, true);

    auto* roundtrip = app.add_subcommand("roundtrip", "Median and interval-structure round trips");
    std::string structure_path;
    roundtrip->add_option("space", space_path, "Space file");
    roundtrip->add_option("--structure", structure_path, "Interval-structure file (needs --metric-file)");
    add_common(roundtrip, c, true);

    auto* rank = app.add_subcommand("rank", "Rank estimates by four routes");
    rank->add_option("space", space_path, "Space file")->required();
    int max_n = 3;
    std::string thresholds_text;
    rank->add_option("--max-n", max_n, "Largest n for the envelope tables")->check(CLI::Range(1, 6));
    rank->add_option("--thresholds", thresholds_text, "Envelope arguments in metric ticks, comma separated");
    add_common(rank, c, true);

    auto* hyper = app.add_subcommand("hyperbolicity", "Slim-interval and Gromov constants");
    hyper->add_option("space", space_path, "Space file")->required();
    add_common(hyper, c, true);

    auto* decompose = app.add_subcommand("decompose", "Coarse cube search and product decomposition");
    decompose->add_option("space", space_path, "Space file")->required();
    std::string cube_text, sub_text;
    int search_n = 0;
    std::int64_t separation = 1, target = 0;
    decompose->add_option("--cube", cube_text, "Cube vertex map, 2^n points by bitmask");
    decompose->add_option("--sub", sub_text, "Subcube points x_i, one per direction");
    decompose->add_option("--search", search_n, "Search for an n-cube instead of --cube");
    decompose->add_option("--separation", separation, "Least corner separation for --search");
    decompose->add_option("--target", target, "Largest acceptable defect for --search");
    add_common(decompose, c, true);

    auto* report = app.add_subcommand("report", "Axioms, round trip, hyperbolicity and rank together");
    report->add_option("space", space_path, "Space file")->required();
    report->add_option("--max-n", max_n, "Largest n for the envelope tables")->check(CLI::Range(1, 6));
    add_common(report, c, true);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        err << sub->help();
        return 2;
    }

    try {
        const auto opt = c.scan();
        if (gen->parsed()) {
            TernarySpace s;
            if (gen_name == "hypercube")
                s = gen_hypercube(gen_n);
            else if (gen_name == "grid")
                s = gen_grid(parse_ints(dims));
            else if (gen_name == "path")
                s = build_generator("path", ojson{{"n", gen_n}}.dump());
            else if (gen_name == "star")
                s = build_generator("star", ojson{{"leaves", gen_n}}.dump());
            else if (gen_name == "tree")
                s = gen_tree_random(static_cast<std::size_t>(gen_n), c.seed);
            else if (gen_name == "graph") {
                std::istringstream in(ctx.load(graph_path));
                s = gen_graph_median(parse_graph(in));
            } else if (gen_name == "spiked-line")
                s = gen_spiked_line(gen_m).sub;
            else if (gen_name == "spiked-tree")
                s = gen_spiked_line(gen_m).tree;
            else if (gen_name == "product")
                s = gen_product(parse_space(ctx.load(left)), parse_space(ctx.load(right)));
            else if (gen_name == "perturb") {
                auto b = parse_space(ctx.load(base));
                s = perturb(b, induced_metric(b, c.threads), {radius, c.seed});
            } else
                throw InputError("unknown generator \"" + gen_name + "\"");
            if (gen_n < 0 || gen_m < 0)
                throw InputError("sizes must be non-negative");
            emit(ctx, out, space_to_json(s, table) + "\n");
            return 0;
        }
        if (metric->parsed()) {
            if (induced_flag && path_flag)
                throw InputError("choose one of --induced and --path");
            if (path_flag)
                c.metric = "path";
            const auto s = parse_space(ctx.load(space_path));
            const auto d = choose_metric(ctx, s);
            std::ostringstream text;
            write_metric(text, d);
            emit(ctx, out, text.str());
            return 0;
        }
        if (c.format == "csv" && !rank->parsed())
            throw InputError("--format csv is only available for rank");

        if (axioms->parsed()) {
            const auto s = parse_space(ctx.load(space_path));
            auto body = axioms_body(ctx, s);
            emit_report(ctx, out, body);
            return 0;
        }
        if (roundtrip->parsed()) {
            ojson body;
            if (!structure_path.empty()) {
                if (c.metric_file.empty())
                    throw InputError("--structure needs --metric-file");
                auto f = parse_structure(ctx.load(structure_path));
                std::istringstream in(ctx.load(c.metric_file));
                const auto d = parse_metric(in);
                if (d.size() != f.structure.n)
                    throw InputError("metric and structure sizes differ");
                const Rational k = Rational(f.kappa0.num * d.scale(), f.kappa0.den);
                if (!k.is_integer())
                    throw InputError("kappa0 is not a multiple of the metric resolution");
                f.structure.kappa0 = k.num;
                body["structure"] = ojson{{"n", f.structure.n}, {"primed", f.structure.primed},
                                          {"kappa0", rational_json(f.kappa0)}};
                const auto issue = validate_structure(f.structure, d);
                body["valid"] = issue.ok;
                if (!issue.ok) {
                    body["failure"] = issue.failure;
                    body["witness"] = issue.witness;
                    emit_report(ctx, out, body);
                    err << "interval structure is invalid: " << issue.failure << "\n";
                    return 1;
                }
                body["params"] = structure_params_json(structure_params(f.structure, d, opt));
                body["interval_roundtrip"] =
                    roundtrip_json(roundtrip_interval_defect(f.structure, d, f.structure.kappa0, opt), d.scale());
            } else {
                if (space_path.empty())
                    throw InputError("roundtrip needs a space file or --structure");
                const auto s = parse_space(ctx.load(space_path));
                const auto d = choose_metric(ctx, s);
                body["space"] = space_json(s);
                body["median_roundtrip"] = roundtrip_json(roundtrip_median_defect(s, d, opt), d.scale());
                const auto is = intervals_from_median(s);
                body["params"] = structure_params_json(structure_params(is, d, opt));
                body["interval_roundtrip"] = roundtrip_json(roundtrip_interval_defect(is, d, 0, opt), d.scale());
            }
            emit_report(ctx, out, body);
            return 0;
        }
        if (rank->parsed()) {
            const auto s = parse_space(ctx.load(space_path));
            const auto d = choose_metric(ctx, s);
            std::vector<Ticks> thresholds;
            if (!thresholds_text.empty())
                for (Point p : parse_points(thresholds_text))
                    thresholds.push_back(p);
            std::string rank_error;
            const auto r = run_rank(ctx, s, d, max_n, thresholds, rank_error);
            if (c.format == "csv")
                emit(ctx, out, rank_csv(r));
            else
                emit_report(ctx, out, rank_body(s, r, rank_error));
            return 0;
        }
        if (hyper->parsed()) {
            const auto s = parse_space(ctx.load(space_path));
            const auto d = choose_metric(ctx, s);
            emit_report(ctx, out, hyperbolicity_body(ctx, s, d));
            return 0;
        }
        if (decompose->parsed()) {
            const auto s = parse_space(ctx.load(space_path));
            const auto d = choose_metric(ctx, s);
            ojson body;
            body["space"] = space_json(s);
            CoarseCube cube;
            if (!cube_text.empty()) {
                const auto map = parse_points(cube_text);
                int n = 0;
                while ((std::size_t{1} << n) < map.size())
                    ++n;
                cube = make_cube(s, d, n, map);
            } else if (search_n > 0) {
                const auto found = cube_search(s, d, search_n, separation * d.scale(), target * d.scale(), opt);
                ojson sj;
                sj["found"] = found.found;
                sj["evaluated"] = found.evaluated;
                sj["best"] = found.best ? cube_json(*found.best, d.scale()) : ojson(nullptr);
                body["search"] = mode_fields(sj, found.mode);
                if (!found.best) {
                    emit_report(ctx, out, body);
                    return 0;
                }
                cube = *found.best;
            } else {
                throw InputError("decompose needs --cube or --search");
            }
            std::optional<std::vector<Point>> sub;
            if (!sub_text.empty())
                sub = parse_points(sub_text);
            const auto dec = cube_decomposition(s, d, cube, sub, opt);
            body["cube"] = cube_json(dec.cube, d.scale());
            body["params"] = params_json(dec.params);
            body["full"] = side_json(dec.full, d.scale());
            if (dec.sub)
                body["sub"] = side_json(*dec.sub, d.scale());
            emit_report(ctx, out, body);
            return 0;
        }
        if (report->parsed()) {
            const auto s = parse_space(ctx.load(space_path));
            ojson body = axioms_body(ctx, s);
            const auto d = choose_metric(ctx, s);
            const auto m12 = check_m1_m2(s, opt);
            if (m12.pass && m12.mode == ScanMode::exhaustive) {
                ojson rt;
                rt["median_roundtrip"] = roundtrip_json(roundtrip_median_defect(s, d, opt), d.scale());
                rt["interval_roundtrip"] =
                    roundtrip_json(roundtrip_interval_defect(intervals_from_median(s), d, 0, opt), d.scale());
                body["roundtrip"] = rt;
            } else {
                body["roundtrip"] = nullptr;
            }
            std::string rank_error;
            const auto r = run_rank(ctx, s, d, max_n, {}, rank_error);
            auto rj = rank_body(s, r, rank_error);
            rj.erase("space");
            body["rank"] = rj;
            emit_report(ctx, out, body);
            return 0;
        }
    } catch (const InputError& e) {
        err << "input error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "analysis failed: " << e.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        err << "input error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

}  // namespace cma
