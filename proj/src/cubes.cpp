#include <algorithm>
#include <limits>

#include "cma/parallel.hpp"
#include "cma/rank.hpp"

namespace cma {

namespace {

constexpr int max_cube_dimension = 10;
constexpr int max_search_dimension = 6;

std::size_t majority(std::size_t a, std::size_t b, std::size_t c) { return (a & b) | (b & c) | (a & c); }

void check_cube_map(std::size_t N, int n, const std::vector<Point>& f)
{
    if (n < 1 || n > max_cube_dimension)
        throw RangeError("cube dimension must be in 1.." + std::to_string(max_cube_dimension));
    if (f.size() != (std::size_t{1} << n))
        throw RangeError("cube map needs 2^" + std::to_string(n) + " vertices, got " + std::to_string(f.size()));
    for (Point p : f)
        if (p >= N)
            throw RangeError("cube vertex " + std::to_string(p) + " out of range");
}

Ticks cube_defect(const TernarySpace& space, const MetricMatrix& d, const std::vector<Point>& f)
{
    const std::size_t size = f.size();
    Ticks worst = 0;
    for (std::size_t a = 0; a < size; ++a)
        for (std::size_t b = 0; b < size; ++b)
            for (std::size_t c = 0; c < size; ++c)
                worst = std::max(worst, d(space.mu(f[a], f[b], f[c]), f[majority(a, b, c)]));
    return worst;
}

using Witness = MaxWitness<std::vector<Point>>;

// Measurements for the interval [o, top] against prod [o, c_i].
DecompositionSide measure_side(const TernarySpace& space, const MetricMatrix& d, Point o, Point top,
                               const std::vector<Point>& corners, Ticks L, const ParamReport& params,
                               unsigned threads)
{
    const std::size_t n = corners.size();
    const auto& table = space.intervals();
    DecompositionSide s;
    s.origin = o;
    s.top = top;
    s.corners = corners;
    const std::vector<Point> A = table.members(o, top);
    std::vector<std::vector<Point>> F(n);
    std::uint64_t product = 1;
    for (std::size_t i = 0; i < n; ++i) {
        F[i] = table.members(o, corners[i]);
        product = product > max_product_size ? product : product * F[i].size();
    }
    if (product > max_product_size)
        throw BudgetError("cube decomposition: product of factor intervals exceeds " +
                          std::to_string(max_product_size) + " points");
    s.interval_size = A.size();
    s.product_size = static_cast<std::size_t>(product);

    auto phi = [&](Point x) {
        std::vector<Point> v(n);
        for (std::size_t i = 0; i < n; ++i)
            v[i] = space.mu(o, x, corners[i]);
        return v;
    };
    auto psi = [&](const std::vector<Point>& v) {
        return space.mu(iterated_median(space, v, top), o, top);
    };
    std::vector<std::vector<Point>> phiA(A.size());
    for (std::size_t i = 0; i < A.size(); ++i)
        phiA[i] = phi(A[i]);

    // Phi as a quasi-morphism from the gate median on A to the product median.
    {
        std::vector<Witness> part(A.size());
        parallel_for(A.size(), threads, [&](std::size_t ix) {
            for (std::size_t iy = 0; iy < A.size(); ++iy)
                for (std::size_t iz = 0; iz < A.size(); ++iz) {
                    const Point m = space.mu(o, space.mu(A[ix], A[iy], A[iz]), top);
                    Ticks total = 0;
                    for (std::size_t i = 0; i < n; ++i) {
                        const Point lhs =
                            space.mu(o, space.mu(phiA[ix][i], phiA[iy][i], phiA[iz][i]), corners[i]);
                        total += d(lhs, space.mu(o, m, corners[i]));
                    }
                    part[ix].offer(total, {A[ix], A[iy], A[iz]});
                }
        });
        Witness w;
        for (auto& p : part)
            w.merge(p);
        s.phi_defect = w.value;
        s.phi_witness = w.witness;
    }
    {
        Witness w;
        for (std::size_t ix = 0; ix < A.size(); ++ix)
            w.offer(d(psi(phiA[ix]), A[ix]), {A[ix]});
        s.psi_phi = w.value;
        s.psi_phi_witness = w.witness;
    }
    {
        const std::size_t chunk = 4096;
        const std::size_t chunks = (s.product_size + chunk - 1) / chunk;
        std::vector<Witness> part(chunks);
        parallel_for(chunks, threads, [&](std::size_t ci) {
            std::vector<Point> v(n);
            const std::size_t end = std::min(s.product_size, (ci + 1) * chunk);
            for (std::size_t idx = ci * chunk; idx < end; ++idx) {
                std::size_t rest = idx;
                for (std::size_t i = n; i-- > 0;) {
                    v[i] = F[i][rest % F[i].size()];
                    rest /= F[i].size();
                }
                const auto back = phi(psi(v));
                Ticks total = 0;
                for (std::size_t i = 0; i < n; ++i)
                    total += d(back[i], v[i]);
                part[ci].offer(total, v);
            }
        });
        Witness w;
        for (auto& p : part)
            w.merge(p);
        s.phi_psi = w.value;
        s.phi_psi_witness = w.witness;
    }

    // Bound formulas, each a chain of single-argument moves (rho), four-point
    // swaps (kappa4) and five-point swaps (kappa5) evaluated from measured
    // parameters. Where a chain step compares two explicit points the step is
    // measured directly instead of bounded.
    const auto rho = [&](Ticks t) { return params.rho.at(t); };
    const Ticks k4 = params.kappa4.value;
    const Ticks k5 = params.kappa5.value;
    const auto nn = static_cast<Ticks>(n);
    s.phi_bound = nn * (rho(rho(2 * k4) + k5) + rho(k4) + rho(k5) + k4 + 2 * k5);

    const Point M = iterated_median(space, corners, top);
    const Ticks H = d(M, top);
    Ticks CA = 0;
    for (std::size_t ix = 0; ix < A.size(); ++ix)
        CA = std::max(CA, d(iterated_median(space, phiA[ix], top), space.mu(o, A[ix], M)));
    s.psi_phi_bound = rho(CA) + rho(rho(H)) + 2 * k4;

    // Coordinate pieces of the Phi o Psi chain, measured over the product.
    Ticks Cn = 0, Cp = 0;
    {
        const std::size_t chunk = 4096;
        const std::size_t chunks = (s.product_size + chunk - 1) / chunk;
        std::vector<std::pair<Ticks, Ticks>> part(chunks, {0, 0});
        parallel_for(chunks, threads, [&](std::size_t ci) {
            std::vector<Point> v(n), proj(n), single(n);
            const std::size_t end = std::min(s.product_size, (ci + 1) * chunk);
            for (std::size_t idx = ci * chunk; idx < end; ++idx) {
                std::size_t rest = idx;
                for (std::size_t i = n; i-- > 0;) {
                    v[i] = F[i][rest % F[i].size()];
                    rest /= F[i].size();
                }
                const Point Mv = iterated_median(space, v, top);
                for (std::size_t i = 0; i < n; ++i) {
                    for (std::size_t j = 0; j < n; ++j) {
                        proj[j] = space.mu(o, corners[i], v[j]);
                        single[j] = j == i ? v[i] : o;
                    }
                    const Point pm = iterated_median(space, proj, top);
                    part[ci].first = std::max(part[ci].first, d(space.mu(o, Mv, corners[i]), pm));
                    part[ci].second = std::max(part[ci].second, d(pm, iterated_median(space, single, top)));
                }
            }
        });
        for (auto& p : part) {
            Cn = std::max(Cn, p.first);
            Cp = std::max(Cp, p.second);
        }
    }
    s.phi_psi_bound = nn * (3 * rho(L) + (nn + 1) * k4 + Cn + Cp);
    return s;
}

// The cube facts used by the chains: c_i ~ mu(o, top, c_i) and o ~ mu(o, c_i, c_j).
Ticks corner_defect(const TernarySpace& space, const MetricMatrix& d, Point o, Point top,
                    const std::vector<Point>& corners)
{
    Ticks L = 0;
    for (std::size_t i = 0; i < corners.size(); ++i) {
        L = std::max(L, d(space.mu(o, top, corners[i]), corners[i]));
        L = std::max(L, d(space.mu(o, corners[i], top), corners[i]));
        for (std::size_t j = 0; j < corners.size(); ++j)
            if (i != j)
                L = std::max(L, d(space.mu(o, corners[i], corners[j]), o));
    }
    return L;
}

}  // namespace

CoarseCube make_cube(const TernarySpace& space, const MetricMatrix& d, int n, std::vector<Point> vertex_map)
{
    if (d.size() != space.size())
        throw InputError("metric size does not match the space");
    check_cube_map(space.size(), n, vertex_map);
    CoarseCube c;
    c.n = n;
    c.vertex_map = std::move(vertex_map);
    c.L = cube_defect(space, d, c.vertex_map);
    c.separation = std::numeric_limits<Ticks>::max();
    for (int i = 0; i < n; ++i)
        c.separation = std::min(c.separation, d(c.vertex_map[0], c.vertex_map[std::size_t{1} << i]));
    return c;
}

Decomposition cube_decomposition(const TernarySpace& space, const MetricMatrix& d, const CoarseCube& cube,
                                 const std::optional<std::vector<Point>>& subcube, const ScanOptions& opt)
{
    return cube_decomposition(space, d, cube, subcube, coarse_params(space, d, opt), opt.threads);
}

Decomposition cube_decomposition(const TernarySpace& space, const MetricMatrix& d, const CoarseCube& cube,
                                 const std::optional<std::vector<Point>>& subcube, const ParamReport& params,
                                 unsigned threads)
{
    if (d.size() != space.size())
        throw InputError("metric size does not match the space");
    check_cube_map(space.size(), cube.n, cube.vertex_map);
    Decomposition out;
    out.cube = make_cube(space, d, cube.n, cube.vertex_map);
    out.params = params;
    const std::size_t n = static_cast<std::size_t>(cube.n);
    const Point o = cube.vertex_map.front();
    const Point top = cube.vertex_map.back();
    std::vector<Point> e(n);
    for (std::size_t i = 0; i < n; ++i)
        e[i] = cube.vertex_map[std::size_t{1} << i];
    out.full = measure_side(space, d, o, top, e, corner_defect(space, d, o, top, e), params, threads);

    if (subcube) {
        if (subcube->size() != n)
            throw RangeError("subcube needs one point per cube direction");
        for (std::size_t i = 0; i < n; ++i) {
            const Point x = (*subcube)[i];
            if (x >= space.size())
                throw RangeError("subcube point " + std::to_string(x) + " out of range");
            const auto& box = space.intervals().members(o, e[i]);
            if (!std::binary_search(box.begin(), box.end(), x))
                throw RangeError("subcube point " + std::to_string(x) + " is not in the interval from the origin to corner " +
                                 std::to_string(i));
        }
        const Point x = space.mu(iterated_median(space, *subcube, top), o, top);
        out.sub = measure_side(space, d, o, x, *subcube, corner_defect(space, d, o, x, *subcube), params, threads);
    }
    return out;
}

namespace {

struct SearchBest {
    bool has = false;
    Ticks defect = 0;
    Ticks separation = 0;
    std::vector<Point> map;

    // smaller defect, then larger separation, then lexicographically first map
    [[nodiscard]] bool better_than(Ticks def, Ticks sep, const std::vector<Point>& m) const
    {
        if (!has)
            return true;
        if (def != defect)
            return def < defect;
        if (sep != separation)
            return sep > separation;
        return m < map;
    }
};

class ExhaustiveSearch {
public:
    ExhaustiveSearch(const TernarySpace& space, const MetricMatrix& d, int n, Ticks C, Ticks L_target)
        : space_(space), d_(d), size_(std::size_t{1} << n), C_(C), L_target_(L_target), f_(size_, 0),
          triples_(size_)
    {
        for (std::size_t a = 0; a < size_; ++a)
            for (std::size_t b = 0; b < size_; ++b)
                for (std::size_t c = 0; c < size_; ++c) {
                    const std::size_t m = majority(a, b, c);
                    triples_[std::max({a, b, c, m})].push_back({a, b, c, m});
                }
    }

    void run(Point first)
    {
        f_[0] = first;
        step(1, 0, std::numeric_limits<Ticks>::max());
    }

    SearchBest best;
    std::uint64_t evaluated = 0;

private:
    void step(std::size_t mask, Ticks defect, Ticks sep)
    {
        ++evaluated;
        if (mask == size_) {
            if (best.better_than(defect, sep, f_)) {
                best = {true, defect, sep, f_};
            }
            return;
        }
        const auto N = static_cast<Point>(space_.size());
        const bool unit = (mask & (mask - 1)) == 0;
        for (Point x = 0; x < N; ++x) {
            f_[mask] = x;
            Ticks s = sep;
            if (unit) {
                s = std::min(s, d_(f_[0], x));
                if (s < C_)
                    continue;
            }
            Ticks def = defect;
            const Ticks cap = best.has ? std::min(L_target_, best.defect) : L_target_;
            bool pruned = false;
            for (const auto& t : triples_[mask]) {
                def = std::max(def, d_(space_.mu(f_[t[0]], f_[t[1]], f_[t[2]]), f_[t[3]]));
                if (def > cap) {
                    pruned = true;
                    break;
                }
            }
            if (pruned)
                continue;
            // Defect only grows and separation only shrinks below this node.
            if (best.has && def == best.defect && s <= best.separation)
                continue;
            step(mask + 1, def, s);
        }
    }

    const TernarySpace& space_;
    const MetricMatrix& d_;
    std::size_t size_;
    Ticks C_;
    Ticks L_target_;
    std::vector<Point> f_;
    std::vector<std::vector<std::array<std::size_t, 4>>> triples_;
};

struct ClimbScore {
    Ticks shortfall;
    Ticks defect;
    Ticks neg_sep;
    auto operator<=>(const ClimbScore&) const = default;
};

}  // namespace

CubeSearchResult cube_search(const TernarySpace& space, const MetricMatrix& d, int n, Ticks separation,
                             Ticks L_target, const ScanOptions& opt)
{
    if (d.size() != space.size())
        throw InputError("metric size does not match the space");
    if (n < 1 || n > max_search_dimension)
        throw InputError("cube search dimension must be in 1.." + std::to_string(max_search_dimension));
    const std::size_t N = space.size();
    const std::size_t size = std::size_t{1} << n;
    CubeSearchResult out;

    const std::uint64_t total = saturating_pow(N, static_cast<unsigned>(size));
    if (total <= opt.budget && !opt.force_sampling) {
        std::vector<SearchBest> bests(N);
        std::vector<std::uint64_t> counts(N, 0);
        parallel_for(N, opt.threads, [&](std::size_t first) {
            ExhaustiveSearch s(space, d, n, separation, L_target);
            s.run(static_cast<Point>(first));
            bests[first] = std::move(s.best);
            counts[first] = s.evaluated;
        });
        SearchBest best;
        for (std::size_t i = 0; i < N; ++i) {
            out.evaluated += counts[i];
            if (bests[i].has && best.better_than(bests[i].defect, bests[i].separation, bests[i].map))
                best = bests[i];
        }
        out.mode = ScanMode::exhaustive;
        if (best.has) {
            out.best = make_cube(space, d, n, best.map);
            out.found = true;
        }
        return out;
    }
    if (!opt.allow_sampling && !opt.force_sampling)
        throw BudgetError("cube search: exhaustive run needs " + std::to_string(total) + " maps, budget is " +
                          std::to_string(opt.budget));

    // Seeded hill climbing, one independent stream per restart.
    constexpr std::size_t restarts = 16;
    const std::uint64_t per_eval = static_cast<std::uint64_t>(size) * size * size;
    const std::uint64_t steps = std::max<std::uint64_t>(100, opt.samples / (restarts * per_eval));
    auto score = [&](const std::vector<Point>& f, Ticks& def, Ticks& sep) {
        def = cube_defect(space, d, f);
        sep = std::numeric_limits<Ticks>::max();
        for (int i = 0; i < n; ++i)
            sep = std::min(sep, d(f[0], f[std::size_t{1} << i]));
        return ClimbScore{std::max<Ticks>(0, separation - sep), def, -sep};
    };
    struct Climb {
        ClimbScore score;
        std::vector<Point> map;
    };
    std::vector<Climb> climbs(restarts);
    parallel_for(restarts, opt.threads, [&](std::size_t r) {
        CounterRng rng(mix64(opt.seed ^ (0x9e3779b97f4a7c15ULL * (r + 1))));
        std::vector<Point> f(size);
        for (auto& x : f)
            x = static_cast<Point>(rng.below(N));
        Ticks def = 0, sep = 0;
        ClimbScore cur = score(f, def, sep);
        for (std::uint64_t s = 0; s < steps; ++s) {
            const std::size_t slot = rng.below(size);
            const auto x = static_cast<Point>(rng.below(N));
            const Point old = f[slot];
            if (old == x)
                continue;
            f[slot] = x;
            const ClimbScore next = score(f, def, sep);
            if (next <= cur)
                cur = next;
            else
                f[slot] = old;
        }
        climbs[r] = {cur, f};
    });
    std::size_t pick = 0;
    for (std::size_t r = 1; r < restarts; ++r)
        if (climbs[r].score < climbs[pick].score ||
            (climbs[r].score == climbs[pick].score && climbs[r].map < climbs[pick].map))
            pick = r;
    out.mode = ScanMode::sampled;
    out.evaluated = restarts * (steps + 1);
    out.best = make_cube(space, d, n, climbs[pick].map);
    out.found = out.best->L <= L_target && out.best->separation >= separation;
    return out;
}

}  // namespace cma
