#include "cma/axioms.hpp"

#include <algorithm>
#include <map>

#include "cma/parallel.hpp"

namespace cma {

namespace {

template <std::size_t K>
std::vector<Point> as_vector(const Tuple<K>& t)
{
    return std::vector<Point>(t.begin(), t.end());
}

template <std::size_t K>
Constant to_constant(const ScanResult<K>& r)
{
    return Constant{r.value, as_vector(r.witness), r.mode, r.evaluated};
}

template <std::size_t K>
CheckResult to_check(const ScanResult<K>& r, std::string failure)
{
    CheckResult out;
    out.mode = r.mode;
    out.evaluated = r.evaluated;
    if (r.value > 0) {
        out.pass = false;
        out.failure = std::move(failure);
        out.witness = as_vector(r.witness);
    }
    return out;
}

void require_metric(const TernarySpace& space, const MetricMatrix& d)
{
    if (d.size() != space.size())
        throw InputError("metric has " + std::to_string(d.size()) + " points, space has " +
                         std::to_string(space.size()));
}

}  // namespace

CheckResult check_m1_m2(const TernarySpace& space, const ScanOptions& opt)
{
    auto r = max_scan<3>(
        space.size(), opt,
        [&](const Tuple<3>& t) -> Ticks {
            const Point a = t[0], b = t[1], c = t[2];
            if (a == b && space.mu(a, a, c) != a)
                return 1;
            const Point m = space.mu(a, b, c);
            return (m != space.mu(a, c, b) || m != space.mu(b, a, c) || m != space.mu(b, c, a) ||
                    m != space.mu(c, a, b) || m != space.mu(c, b, a))
                       ? 1
                       : 0;
        },
        "M1/M2 check");
    auto out = to_check(r, "M2");
    if (!out.pass && out.witness[0] == out.witness[1] && space.mu(out.witness[0], out.witness[0], out.witness[2]) !=
                                                           out.witness[0])
        out.failure = "M1";
    return out;
}

CheckResult check_4pt(const TernarySpace& space, const ScanOptions& opt)
{
    auto r = max_scan<4>(
        space.size(), opt,
        [&](const Tuple<4>& t) -> Ticks {
            const Point a = t[0], b = t[1], c = t[2], d = t[3];
            return space.mu(space.mu(a, b, c), b, d) != space.mu(a, b, space.mu(c, b, d)) ? 1 : 0;
        },
        "4-point check");
    return to_check(r, "4-point");
}

CheckResult check_median_5pt(const TernarySpace& space, const ScanOptions& opt)
{
    auto r = max_scan<5>(
        space.size(), opt,
        [&](const Tuple<5>& t) -> Ticks {
            const Point a = t[0], b = t[1], c = t[2], d = t[3], e = t[4];
            return space.mu(a, b, space.mu(c, d, e)) != space.mu(space.mu(a, b, c), space.mu(a, b, d), e) ? 1 : 0;
        },
        "5-point check");
    return to_check(r, "5-point");
}

Constant m3prime_constant(const TernarySpace& space, const ScanOptions& opt)
{
    const auto& table = space.intervals();
    auto r = max_scan<5>(
        space.size(), opt,
        [&](const Tuple<5>& t) -> Ticks {
            const Point a = t[0], b = t[1], c = t[2], d = t[3], e = t[4];
            const Point lhs = space.mu(a, b, space.mu(c, d, e));
            const Point rhs = space.mu(space.mu(a, b, c), space.mu(a, b, d), e);
            return static_cast<Ticks>(table.card(lhs, rhs));
        },
        "(M3)' constant");
    return to_constant(r);
}

bool ParamReport::any_sampled() const
{
    return kappa0.lower_bound() || kappa4.lower_bound() || kappa5.lower_bound() || K.lower_bound() ||
           rho_mode == ScanMode::sampled;
}

Constant kappa0_constant(const TernarySpace& space, const MetricMatrix& d, const ScanOptions& opt)
{
    require_metric(space, d);
    auto r = max_scan<3>(
        space.size(), opt,
        [&](const Tuple<3>& t) -> Ticks {
            const Point a = t[0], b = t[1], c = t[2];
            const Point m = space.mu(a, b, c);
            Ticks v = d(space.mu(a, a, b), a);
            for (Point p : {space.mu(a, c, b), space.mu(b, a, c), space.mu(b, c, a), space.mu(c, a, b),
                            space.mu(c, b, a)})
                v = std::max(v, d(p, m));
            return v;
        },
        "kappa0");
    return to_constant(r);
}

ParamReport rho_envelope(const TernarySpace& space, const MetricMatrix& d, const ScanOptions& opt)
{
    require_metric(space, d);
    const auto grid = d.realized();
    std::map<Ticks, std::size_t> slot;
    for (std::size_t i = 0; i < grid.size(); ++i)
        slot[grid[i]] = i;
    std::vector<std::size_t> bucket_of(d.raw().size());
    for (std::size_t i = 0; i < bucket_of.size(); ++i)
        bucket_of[i] = slot[d.raw()[i]];
    const std::size_t n = space.size();

    auto scan = bucket_max_scan<4>(
        n, opt, grid.size(),
        [&](const Tuple<4>& t, auto&& emit) {
            const Point a = t[0], a2 = t[1], b = t[2], c = t[3];
            emit(bucket_of[a * n + a2], d(space.mu(a, b, c), space.mu(a2, b, c)));
        },
        "rho envelope");

    ParamReport rep;
    rep.scale = d.scale();
    rep.rho_mode = scan.mode;
    Ticks running = 0;
    std::vector<Point> running_witness;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& bucket = scan.buckets[i];
        if (bucket.has && (running_witness.empty() || bucket.value > running)) {
            running = std::max(running, bucket.value);
            running_witness = as_vector(bucket.witness);
        }
        rep.rho.args.push_back(grid[i]);
        rep.rho.values.push_back(running);
        rep.rho_witness.push_back(running_witness);
    }
    rep.rho_affine = affine_upper_fit(rep.rho, d.scale());
    return rep;
}

AffineBound affine_upper_fit(const StepFunction& f, Ticks scale)
{
    AffineBound best;
    if (f.args.empty())
        return best;
    std::vector<Rational> slopes{Rational(0)};
    for (std::size_t i = 0; i < f.args.size(); ++i)
        for (std::size_t j = i + 1; j < f.args.size(); ++j)
            if (f.args[j] != f.args[i] && f.values[j] >= f.values[i])
                slopes.emplace_back(f.values[j] - f.values[i], f.args[j] - f.args[i]);
    std::sort(slopes.begin(), slopes.end());
    slopes.erase(std::unique(slopes.begin(), slopes.end()), slopes.end());
    bool have = false;
    for (const auto& k : slopes) {
        // Offset in ticks as an exact fraction: max(v - k t).
        Rational offset;
        bool first = true;
        for (std::size_t i = 0; i < f.args.size(); ++i) {
            Rational v(f.values[i] * k.den - k.num * f.args[i], k.den);
            if (first || v > offset)
                offset = v;
            first = false;
        }
        Rational residual(0);
        for (std::size_t i = 0; i < f.args.size(); ++i) {
            Rational gap(k.num * f.args[i] * offset.den + offset.num * k.den - f.values[i] * k.den * offset.den,
                         k.den * offset.den);
            residual = std::max(residual, gap);
        }
        if (!have || residual < best.residual) {
            best.slope = k;
            best.offset = offset;
            best.residual = residual;
            have = true;
        }
    }
    best.offset = Rational(best.offset.num, best.offset.den * scale);
    best.residual = Rational(best.residual.num, best.residual.den * scale);
    return best;
}

Constant kappa4_constant(const TernarySpace& space, const MetricMatrix& d, const ScanOptions& opt)
{
    require_metric(space, d);
    auto r = max_scan<4>(
        space.size(), opt,
        [&](const Tuple<4>& t) -> Ticks {
            const Point a = t[0], b = t[1], c = t[2], x = t[3];
            return d(space.mu(space.mu(a, b, c), b, x), space.mu(a, b, space.mu(c, b, x)));
        },
        "kappa4");
    return to_constant(r);
}

Constant kappa5_constant(const TernarySpace& space, const MetricMatrix& d, const ScanOptions& opt)
{
    require_metric(space, d);
    auto r = max_scan<5>(
        space.size(), opt,
        [&](const Tuple<5>& t) -> Ticks {
            const Point a = t[0], b = t[1], c = t[2], x = t[3], e = t[4];
            return d(space.mu(a, b, space.mu(c, x, e)), space.mu(space.mu(a, b, c), space.mu(a, b, x), e));
        },
        "kappa5");
    return to_constant(r);
}

ParamReport coarse_params(const TernarySpace& space, const MetricMatrix& d, const ScanOptions& opt)
{
    ParamReport rep = rho_envelope(space, d, opt);
    rep.kappa0 = kappa0_constant(space, d, opt);
    rep.kappa4 = kappa4_constant(space, d, opt);
    rep.kappa5 = kappa5_constant(space, d, opt);
    rep.K = m3prime_constant(space, opt);
    return rep;
}

Constant quasi_morphism_defect(const std::vector<Point>& f, const TernarySpace& from, const TernarySpace& to,
                               const MetricMatrix& d_to, const ScanOptions& opt)
{
    if (f.size() != from.size())
        throw RangeError("map covers " + std::to_string(f.size()) + " points, domain has " +
                         std::to_string(from.size()));
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f[i] >= to.size())
            throw RangeError("map sends " + std::to_string(i) + " to " + std::to_string(f[i]) +
                             ", outside the target");
    require_metric(to, d_to);
    auto r = max_scan<3>(
        from.size(), opt,
        [&](const Tuple<3>& t) -> Ticks {
            return d_to(to.mu(f[t[0]], f[t[1]], f[t[2]]), f[from.mu(t[0], t[1], t[2])]);
        },
        "quasi-morphism defect");
    return to_constant(r);
}

StepFunction bounded_valency_profile(const TernarySpace& space)
{
    const auto n = static_cast<Point>(space.size());
    const auto& table = space.intervals();
    // counts[x][R] = #{y : card[x,y] == R}
    std::vector<std::vector<std::size_t>> counts(n, std::vector<std::size_t>(n + 1, 0));
    std::vector<char> realized(n + 1, 0);
    for (Point x = 0; x < n; ++x)
        for (Point y = 0; y < n; ++y) {
            const auto c = table.card(x, y);
            ++counts[x][c];
            realized[c] = 1;
        }
    StepFunction phi;
    std::vector<std::size_t> cumulative(n, 0);
    for (std::size_t R = 1; R <= n; ++R) {
        std::size_t best = 0;
        for (Point x = 0; x < n; ++x) {
            cumulative[x] += counts[x][R];
            best = std::max(best, cumulative[x]);
        }
        if (realized[R]) {
            phi.args.push_back(static_cast<Ticks>(R));
            phi.values.push_back(static_cast<Ticks>(best));
        }
    }
    return phi;
}

GraphSpec rips_complex_graph(const TernarySpace& space, std::int64_t C)
{
    if (C < 1)
        throw InputError("complex parameter C must be at least 1");
    const auto n = static_cast<Point>(space.size());
    const auto& table = space.intervals();
    GraphSpec g{n, {}};
    for (Point x = 0; x < n; ++x)
        for (Point y = x + 1; y < n; ++y)
            if (static_cast<std::int64_t>(table.card(x, y)) <= C + 1)
                g.edges.emplace_back(x, y);
    return g;
}

QuasiGeodesicReport quasi_geodesic_check(const TernarySpace& space, std::int64_t C, unsigned threads)
{
    QuasiGeodesicReport rep;
    rep.C = C;
    const auto g = rips_complex_graph(space, C);
    rep.edges = g.edges.size();
    rep.connected = g.connected();
    if (!rep.connected)
        return rep;
    const auto dp = bfs_metric(g.adjacency());
    const auto dm = induced_metric(space, threads);
    rep.fit = quasi_isometry_fit(dp, dm);
    rep.exact = dp == dm;
    return rep;
}

}  // namespace cma
