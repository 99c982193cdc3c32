#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cma/axioms.hpp"
#include "cma/metric.hpp"
#include "cma/space.hpp"
#include "cma/types.hpp"

namespace cma {

// ---- exact cube rank (median algebras) ----

struct CubeRank {
    int rank = 0;                      // local rule on the unit graph
    std::vector<Point> witness;        // a vertex followed by its square-spanning neighbours
    std::optional<int> brute_force;    // injective homomorphism search, small spaces only
};

inline constexpr std::size_t brute_force_cube_limit = 40;

/// Largest n such that I^n embeds as a median subalgebra. Requires a space
/// flagged median (UnsupportedError otherwise). Uses the local rule: the
/// largest set of unit-graph neighbours of one vertex that pairwise span a
/// square. Spaces with at most brute_force_cube_limit points are cross-checked
/// by exhaustive search and a disagreement throws std::logic_error.
CubeRank exact_cube_rank(const TernarySpace& space);

/// Exhaustive search for the largest injective median homomorphism I^n -> X.
int brute_force_cube_rank(const TernarySpace& space);

/// Median homomorphism check for a map from the n-cube (index = bitmask).
bool is_cube_embedding(const TernarySpace& space, int n, const std::vector<Point>& vertex_map);

// ---- interval growth ----

struct GrowthProfile {
    Ticks scale = 1;
    std::vector<Ticks> radius;          // realized r > 0
    std::vector<std::size_t> max_card;  // max card [a,b] over d(a,b) = r
    std::vector<std::pair<Point, Point>> witness;
    std::size_t window_start = 0;       // first index of the fitted upper half
    double slope = 0;                   // exponent s of card ~ ((r + s) / s)^s
    double residual = 0;                // RMS error of the fit in log card
    double loglog_slope = 0;            // plain least-squares slope of log card on log r
    int rank = 0;                       // nearest integer to slope
};

/// Throws RangeError when fewer than 3 distinct positive distances occur.
GrowthProfile growth_profile(const TernarySpace& space, const MetricMatrix& d);

// ---- thin cubes and multi-median ----

/// threshold -> max value, for tuples of n+1 points. A value of -1 means no
/// tuple meets the threshold.
struct EnvelopeTable {
    int n = 1;
    Ticks scale = 1;
    StepFunction table;
    std::vector<std::vector<Point>> witness;  // x_1..x_{n+1}, p, q per threshold
    ScanMode mode = ScanMode::exhaustive;
    std::uint64_t work = 0;
    std::size_t bases_done = 0;
    std::size_t bases_total = 0;

    [[nodiscard]] Ticks at(Ticks threshold) const;
};

/// Over tuples (x_1..x_{n+1}, p, q): xi = max_{i!=j} d(p, mu(x_i,x_j,p)) and
/// m = min_i d(p, mu(x_i,p,q)). Entry at threshold t is max m over xi <= t.
/// Thresholds default to every realized distance. The budget counts work
/// units; when it runs out the table covers a seeded subset of base points p
/// and is flagged sampled.
EnvelopeTable thin_cubes_envelope(const TernarySpace& space, const MetricMatrix& d, int n,
                                  const ScanOptions& opt = {}, std::vector<Ticks> thresholds = {});

/// Entry at lambda: the smallest S with
/// cap_{i!=j} N_lambda([x_i,x_j]) inside cup_i N_S([x_i,q]) for every tuple.
EnvelopeTable multi_median_table(const TernarySpace& space, const MetricMatrix& d, int n,
                                 const ScanOptions& opt = {}, std::vector<Ticks> thresholds = {});

struct MultiMedianValue {
    Ticks value = 0;
    std::vector<Point> witness;
    ScanMode mode = ScanMode::exhaustive;
};

MultiMedianValue multi_median_envelope(const TernarySpace& space, const MetricMatrix& d, int n, Ticks lambda,
                                       const ScanOptions& opt = {});

// ---- hyperbolicity ----

/// Smallest delta with [a,c] inside N_delta([a,b]) u N_delta([b,c]) for all triples.
Constant slim_interval_delta(const TernarySpace& space, const MetricMatrix& d, const ScanOptions& opt = {});

// ---- coarse cubes ----

struct CoarseCube {
    int n = 0;
    std::vector<Point> vertex_map;  // index = bitmask of the n-cube vertex
    Ticks L = 0;                    // quasi-morphism defect from (I^n, l1)
    Ticks separation = 0;           // min_i d(c(0), c(e_i))
};

/// Measures L and the separation of a vertex map; RangeError on bad input.
CoarseCube make_cube(const TernarySpace& space, const MetricMatrix& d, int n, std::vector<Point> vertex_map);

struct DecompositionSide {
    Ticks phi_defect = 0;        // quasi-morphism defect of Phi into the product
    Ticks psi_phi = 0;           // max d(Psi(Phi(x)), x) on the interval
    Ticks phi_psi = 0;           // max l1 distance of Phi(Psi(v)) from v on the product
    Ticks phi_bound = 0;
    Ticks psi_phi_bound = 0;
    Ticks phi_psi_bound = 0;
    std::vector<Point> phi_witness;
    std::vector<Point> psi_phi_witness;
    std::vector<Point> phi_psi_witness;
    std::size_t interval_size = 0;
    std::size_t product_size = 0;
    Point origin = 0;
    Point top = 0;
    std::vector<Point> corners;

    [[nodiscard]] bool within_bounds() const
    {
        return phi_defect <= phi_bound && psi_phi <= psi_phi_bound && phi_psi <= phi_psi_bound;
    }
};

struct Decomposition {
    CoarseCube cube;
    DecompositionSide full;
    std::optional<DecompositionSide> sub;  // subcube spanned by the given x_i in [0, e_i]
    ParamReport params;
};

inline constexpr std::uint64_t max_product_size = 2'000'000;

/// Phi(x) = (mu(0,x,e_i))_i on [0,1] and Psi(v) = mu(mu(v_1..v_n;1),0,1) on
/// prod [0,e_i], with the gate medians on both sides. subcube, when given,
/// names x_i in [0,e_i] and adds the same measurements for [0,x], x = Psi(x_i).
Decomposition cube_decomposition(const TernarySpace& space, const MetricMatrix& d, const CoarseCube& cube,
                                 const std::optional<std::vector<Point>>& subcube = std::nullopt,
                                 const ScanOptions& opt = {});

/// Same, reusing already measured parameters.
Decomposition cube_decomposition(const TernarySpace& space, const MetricMatrix& d, const CoarseCube& cube,
                                 const std::optional<std::vector<Point>>& subcube, const ParamReport& params,
                                 unsigned threads = 1);

struct CubeSearchResult {
    bool found = false;                 // best cube has L <= target and separation >= C
    std::optional<CoarseCube> best;
    ScanMode mode = ScanMode::exhaustive;  // sampled = seeded hill climbing
    std::uint64_t evaluated = 0;
};

/// Looks for a cube map with defect <= L_target and separation >= C. Exhaustive
/// when N^(2^n) fits the budget (branch and bound), hill climbing otherwise.
/// Only exhaustive mode certifies absence.
CubeSearchResult cube_search(const TernarySpace& space, const MetricMatrix& d, int n, Ticks separation,
                             Ticks L_target = 0, const ScanOptions& opt = {});

// ---- combined report ----

struct RankReport {
    std::optional<CubeRank> cube_rank;
    std::optional<GrowthProfile> growth;
    std::string growth_error;
    std::vector<EnvelopeTable> thin_cubes;    // n = 1..max_n
    std::vector<EnvelopeTable> multi_median;  // n = 1..max_n
    Constant slim_delta;
    GromovResult gromov;
    Ticks scale = 1;
};

RankReport rank_report(const TernarySpace& space, const MetricMatrix& d, int max_n, const ScanOptions& opt = {},
                       const std::vector<Ticks>& thresholds = {});

}  // namespace cma
