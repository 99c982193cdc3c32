#include "cma/interval_structure.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <map>

#include "cma/axioms.hpp"
#include "cma/interval_distance.hpp"
#include "cma/parallel.hpp"

namespace cma {

namespace {

constexpr std::size_t max_structure_points = 1024;

void require_sizes(const IntervalStructure& is, const MetricMatrix& d)
{
    if (is.n == 0)
        throw InputError("interval structure is empty");
    if (is.intervals.size() != is.n * is.n)
        throw InputError("interval structure needs " + std::to_string(is.n * is.n) + " intervals");
    if (d.size() != is.n)
        throw InputError("metric has " + std::to_string(d.size()) + " points, structure has " +
                         std::to_string(is.n));
}

// Closed k-neighbourhoods of every interval as bitsets.
class NeighborhoodBits {
public:
    NeighborhoodBits(const IntervalStructure& is, const MetricMatrix& d, Ticks k)
        : n_(is.n), words_((is.n + 63) / 64), bits_(is.n * is.n * words_, 0)
    {
        if (n_ > max_structure_points)
            throw BudgetError("interval structures are limited to " + std::to_string(max_structure_points) +
                              " points");
        for (Point a = 0; a < n_; ++a)
            for (Point b = 0; b < n_; ++b) {
                std::uint64_t* row = &bits_[(a * n_ + b) * words_];
                for (Point y : is.at(a, b))
                    for (Point x = 0; x < n_; ++x)
                        if (d(x, y) <= k)
                            row[x / 64] |= std::uint64_t{1} << (x % 64);
            }
    }

    [[nodiscard]] const std::uint64_t* row(Point a, Point b) const { return &bits_[(a * n_ + b) * words_]; }

    /// Smallest point in all three neighbourhoods, or n if none.
    [[nodiscard]] Point first_common(Point a, Point b, Point c) const
    {
        const auto* x = row(a, b);
        const auto* y = row(b, c);
        const auto* z = row(c, a);
        for (std::size_t w = 0; w < words_; ++w) {
            const std::uint64_t m = x[w] & y[w] & z[w];
            if (m)
                return static_cast<Point>(w * 64 + static_cast<std::size_t>(std::countr_zero(m)));
        }
        return static_cast<Point>(n_);
    }

private:
    std::size_t n_;
    std::size_t words_;
    std::vector<std::uint64_t> bits_;
};

std::string triple_text(Point a, Point b, Point c)
{
    return "(" + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) + ")";
}

// Options for a triple scan whose per-triple cost is about `weight` units.
ScanOptions weighted(const ScanOptions& opt, std::uint64_t weight)
{
    ScanOptions w = opt;
    weight = std::max<std::uint64_t>(weight, 1);
    w.budget = opt.budget / weight;
    w.samples = std::max<std::uint64_t>(opt.samples / weight, 1000);
    return w;
}

}  // namespace

StructureIssue validate_structure(const IntervalStructure& is, const MetricMatrix& d)
{
    require_sizes(is, d);
    const auto n = static_cast<Point>(is.n);
    auto fail = [](std::string what, std::vector<Point> w) { return StructureIssue{false, std::move(what), std::move(w)}; };
    for (Point a = 0; a < n; ++a)
        for (Point b = 0; b < n; ++b) {
            const auto& I = is.at(a, b);
            if (I.empty())
                return fail("empty interval", {a, b});
            if (!std::is_sorted(I.begin(), I.end()) || std::adjacent_find(I.begin(), I.end()) != I.end())
                return fail("members not sorted and distinct", {a, b});
            if (I.back() >= n)
                return fail("member out of range", {a, b});
        }
    for (Point a = 0; a < n; ++a)
        for (Point b = 0; b < n; ++b) {
            if (!is.primed) {
                if (a == b && is.at(a, a) != std::vector<Point>{a})
                    return fail("(I1) [a,a] != {a}", {a});
                if (is.at(a, b) != is.at(b, a))
                    return fail("(I1) [a,b] != [b,a]", {a, b});
            } else {
                if (a == b && hausdorff(d, is.at(a, a), {a}) > is.kappa0)
                    return fail("(I1)' [a,a] too far from a", {a});
                if (hausdorff(d, is.at(a, b), is.at(b, a)) > is.kappa0)
                    return fail("(I1)' [a,b] too far from [b,a]", {a, b});
            }
        }
    const NeighborhoodBits nb(is, d, is.primed ? is.kappa0 : 0);
    for (Point a = 0; a < n; ++a)
        for (Point b = 0; b < n; ++b)
            for (Point c = 0; c < n; ++c)
                if (nb.first_common(a, b, c) == n)
                    return fail(is.primed ? "(I3)' empty intersection" : "(I3) empty intersection", {a, b, c});
    return {};
}

IntervalStructure intervals_from_median(const TernarySpace& space)
{
    const auto check = check_m1_m2(space, ScanOptions{.budget = std::numeric_limits<std::uint64_t>::max(),
                                                      .allow_sampling = false});
    if (!check.pass)
        throw AxiomError("(" + check.failure + ") fails at (" + std::to_string(check.witness[0]) + "," +
                         std::to_string(check.witness[1]) + "," + std::to_string(check.witness[2]) + ")");
    IntervalStructure is;
    is.n = space.size();
    is.intervals.resize(is.n * is.n);
    const auto& table = space.intervals();
    for (Point a = 0; a < is.n; ++a)
        for (Point b = 0; b < is.n; ++b)
            is.at(a, b) = table.members(a, b);
    return is;
}

StructureParams structure_params(const IntervalStructure& is, const MetricMatrix& d, const ScanOptions& opt)
{
    require_sizes(is, d);
    const std::size_t n = is.n;
    const IntervalDistances dist(n, d, [&](Point a, Point b) -> const std::vector<Point>& { return is.at(a, b); });
    const auto grid = d.realized();
    std::map<Ticks, std::size_t> slot;
    for (std::size_t i = 0; i < grid.size(); ++i)
        slot[grid[i]] = i;
    const Ticks base = is.primed ? is.kappa0 : 0;
    const std::size_t G = grid.size();
    // Neighbourhoods only change at realized distances, so radius `base`
    // behaves like the largest grid point below it.
    const std::size_t base_slot =
        static_cast<std::size_t>(std::upper_bound(grid.begin(), grid.end(), base) - grid.begin()) - 1;

    // Buckets [0,G) hold phi candidates at c's distance from [a,b]; [G,2G)
    // hold the diameter of the triple intersection at each threshold. Every
    // dist(x,[a,b]) equals some d(x,y), so it lies on the grid.
    auto scan = bucket_max_scan<3>(
        n, weighted(opt, n * n), 2 * G,
        [&](const Tuple<3>& t, auto&& emit) {
            const Point a = t[0], b = t[1], c = t[2];
            const std::int32_t* ab = dist.row(a, b);
            const std::int32_t* bc = dist.row(b, c);
            const std::int32_t* ca = dist.row(c, a);
            Ticks spread = 0;
            for (Point x : is.at(a, c))
                spread = std::max<Ticks>(spread, ab[x]);
            emit(slot.at(ab[c]), spread);

            thread_local std::vector<std::pair<Ticks, Point>> level;
            level.clear();
            for (Point x = 0; x < n; ++x)
                level.emplace_back(static_cast<Ticks>(std::max({ab[x], bc[x], ca[x]})), x);
            std::sort(level.begin(), level.end());
            if (level.front().first > base)
                throw StructureError("triple intersection empty at radius " + d.to_rational(base).str() + " for " +
                                     triple_text(a, b, c));
            Ticks diam = 0;
            for (std::size_t i = 0; i < level.size(); ++i) {
                const Point x = level[i].second;
                for (std::size_t j = 0; j < i; ++j)
                    diam = std::max(diam, d(x, level[j].second));
                if (i + 1 == level.size() || level[i + 1].first != level[i].first)
                    emit(G + std::max(slot.at(level[i].first), base_slot), diam);
            }
        },
        "structure parameters");

    StructureParams out;
    out.scale = d.scale();
    out.base_radius = base;
    out.mode = scan.mode;
    out.triples = scan.evaluated;
    Ticks run_phi = 0, run_psi = 0;
    std::vector<Point> w_phi, w_psi;
    for (std::size_t i = 0; i < G; ++i) {
        const auto& p = scan.buckets[i];
        if (p.has && (w_phi.empty() || p.value > run_phi)) {
            run_phi = std::max(run_phi, p.value);
            w_phi.assign(p.witness.begin(), p.witness.end());
        }
        out.phi.args.push_back(grid[i]);
        out.phi.values.push_back(run_phi);
        out.phi_witness.push_back(w_phi);
        if (i < base_slot)
            continue;
        const auto& q = scan.buckets[G + i];
        if (q.has && (w_psi.empty() || q.value > run_psi)) {
            run_psi = std::max(run_psi, q.value);
            w_psi.assign(q.witness.begin(), q.witness.end());
        }
        out.psi.args.push_back(grid[i]);
        out.psi.values.push_back(run_psi);
        out.psi_witness.push_back(w_psi);
    }
    return out;
}

StructureIssue verify_structure_params(const IntervalStructure& is, const MetricMatrix& d,
                                       const StructureParams& params, const ScanOptions& opt)
{
    require_sizes(is, d);
    const auto n = is.n;
    const auto grid = d.realized();
    auto bad = max_scan<3>(
        n, weighted(opt, n * n * grid.size()),
        [&](const Tuple<3>& t) -> Ticks {
            const Point a = t[0], b = t[1], c = t[2];
            for (Ticks R : grid) {
                const auto near_ab = neighborhood(d, is.at(a, b), R);
                if (std::binary_search(near_ab.begin(), near_ab.end(), c)) {
                    const auto wide = neighborhood(d, is.at(a, b), params.phi.at(R));
                    for (Point x : is.at(a, c))
                        if (!std::binary_search(wide.begin(), wide.end(), x))
                            return 1;
                }
                if (R < params.base_radius)
                    continue;
                auto common = near_ab;
                for (const auto* other : {&is.at(b, c), &is.at(c, a)}) {
                    const auto nb = neighborhood(d, *other, R);
                    std::vector<Point> keep;
                    std::set_intersection(common.begin(), common.end(), nb.begin(), nb.end(),
                                          std::back_inserter(keep));
                    common.swap(keep);
                }
                for (Point x : common)
                    for (Point y : common)
                        if (d(x, y) > params.psi.at(R))
                            return 2;
            }
            return 0;
        },
        "structure parameter verification");
    if (bad.value == 0)
        return {};
    return StructureIssue{false, bad.value == 1 ? "(I2) violated" : "(I3) diameter violated",
                          std::vector<Point>(bad.witness.begin(), bad.witness.end())};
}

TernarySpace median_from_intervals(const IntervalStructure& is, const MetricMatrix& d, Ticks kappa0)
{
    require_sizes(is, d);
    if (kappa0 < 0)
        throw InputError("kappa0 must be non-negative");
    auto nb = std::make_shared<const NeighborhoodBits>(is, d, kappa0);
    const auto n = static_cast<Point>(is.n);
    auto rule = [nb, n](Point a, Point b, Point c) {
        if (a > b)
            std::swap(a, b);
        if (b > c)
            std::swap(b, c);
        if (a > b)
            std::swap(a, b);
        if (a == b || b == c)
            return b;
        const Point m = nb->first_common(a, b, c);
        if (m == n)
            throw StructureError("triple intersection empty for " + triple_text(a, b, c));
        return m;
    };
    // Surface empty intersections now rather than at some later evaluation.
    for (Point a = 0; a < n; ++a)
        for (Point b = a + 1; b < n; ++b)
            for (Point c = b + 1; c < n; ++c)
                (void)rule(a, b, c);
    return TernarySpace::from_rule(n, rule, "induced median", false);
}

FattenResult fatten(const IntervalStructure& is, const MetricMatrix& d, Ticks kappa0)
{
    require_sizes(is, d);
    if (kappa0 < 0)
        throw InputError("kappa0 must be non-negative");
    const auto n = static_cast<Point>(is.n);
    FattenResult out;
    out.structure.n = n;
    out.structure.intervals.resize(is.intervals.size());
    out.structure.primed = false;
    out.structure.kappa0 = 0;
    bool first = true;
    for (Point a = 0; a < n; ++a)
        for (Point b = 0; b < n; ++b) {
            std::vector<Point> members;
            if (a == b) {
                members = {a};
            } else {
                const auto x = neighborhood(d, is.at(a, b), kappa0);
                const auto y = neighborhood(d, is.at(b, a), kappa0);
                std::set_union(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(members));
                for (Point e : {a, b})
                    if (!std::binary_search(members.begin(), members.end(), e))
                        members.insert(std::upper_bound(members.begin(), members.end(), e), e);
            }
            const Ticks h = hausdorff(d, is.at(a, b), members);
            if (first || h > out.hausdorff) {
                out.hausdorff = h;
                out.witness = {a, b};
                first = false;
            }
            out.structure.at(a, b) = std::move(members);
        }
    return out;
}

RoundTrip roundtrip_median_defect(const TernarySpace& space, const MetricMatrix& d, const ScanOptions& opt)
{
    if (d.size() != space.size())
        throw InputError("metric size does not match the space");
    const auto is = intervals_from_median(space);
    const auto induced = median_from_intervals(is, d, 0);
    auto scan = max_scan<3>(
        space.size(), opt, [&](const Tuple<3>& t) { return d(space.mu(t[0], t[1], t[2]), induced.mu(t[0], t[1], t[2])); },
        "median round trip");
    RoundTrip out;
    out.defect = scan.value;
    out.witness.assign(scan.witness.begin(), scan.witness.end());
    out.mode = scan.mode;
    const auto params = structure_params(is, d, opt);
    out.bound = params.psi.at(0);
    if (params.mode == ScanMode::sampled)
        out.mode = ScanMode::sampled;
    return out;
}

RoundTrip roundtrip_interval_defect(const IntervalStructure& is, const MetricMatrix& d, Ticks kappa0,
                                    const ScanOptions& opt)
{
    require_sizes(is, d);
    const auto induced = median_from_intervals(is, d, kappa0);
    const auto back = intervals_from_median(induced);
    RoundTrip out;
    out.kappa0 = kappa0;
    bool first = true;
    for (Point x = 0; x < is.n; ++x)
        for (Point y = 0; y < is.n; ++y) {
            const Ticks h = hausdorff(d, is.at(x, y), back.at(x, y));
            if (first || h > out.defect) {
                out.defect = h;
                out.witness = {x, y};
                first = false;
            }
        }
    IntervalStructure probe = is;
    probe.primed = is.primed || kappa0 > 0;
    probe.kappa0 = std::max(is.kappa0, kappa0);
    const auto params = structure_params(probe, d, opt);
    out.bound = std::max(2 * kappa0, params.psi.at(3 * kappa0));
    out.mode = params.mode;
    return out;
}

}  // namespace cma
