#pragma once

#include <string>
#include <vector>

#include "cma/metric.hpp"
#include "cma/space.hpp"
#include "cma/types.hpp"

namespace cma {

/// A map (a,b) -> [a,b] of non-empty point sets. Unprimed structures claim
/// [a,a] = {a}, [a,b] = [b,a] and non-empty triple intersections exactly;
/// primed ones claim the same up to kappa0 (in metric ticks).
struct IntervalStructure {
    std::size_t n = 0;
    std::vector<std::vector<Point>> intervals;  // index a * n + b, members sorted
    bool primed = false;
    Ticks kappa0 = 0;

    [[nodiscard]] const std::vector<Point>& at(Point a, Point b) const { return intervals[a * n + b]; }
    std::vector<Point>& at(Point a, Point b) { return intervals[a * n + b]; }
};

struct StructureIssue {
    bool ok = true;
    std::string failure;
    std::vector<Point> witness;
};

/// Checks membership ranges, non-emptiness, (I1) or (I1)' and the triple
/// intersections at radius 0 (unprimed) or kappa0 (primed).
StructureIssue validate_structure(const IntervalStructure& is, const MetricMatrix& d);

/// Intervals of the operation; requires (M1),(M2).
IntervalStructure intervals_from_median(const TernarySpace& space);

struct StructureParams {
    Ticks scale = 1;
    StepFunction phi;   // (I2) envelope
    StepFunction psi;   // (I3) diameter bound, grid starting at the base radius
    std::vector<std::vector<Point>> phi_witness;  // (a, b, c) per grid point
    std::vector<std::vector<Point>> psi_witness;
    Ticks base_radius = 0;  // 0 unprimed, kappa0 primed
    ScanMode mode = ScanMode::exhaustive;
    std::uint64_t triples = 0;
};

/// Exact envelopes over the realized distances of d. Throws StructureError
/// naming the first triple whose intersection is empty at the base radius.
StructureParams structure_params(const IntervalStructure& is, const MetricMatrix& d, const ScanOptions& opt = {});

/// Re-checks (I2) and (I3) with the given envelopes by direct set computation.
StructureIssue verify_structure_params(const IntervalStructure& is, const MetricMatrix& d,
                                       const StructureParams& params, const ScanOptions& opt = {});

/// mu(a,b,c) = smallest point of N_k([a,b]) n N_k([b,c]) n N_k([c,a]) with
/// (a,b,c) sorted ascending first; mu(a,a,b) = a whenever two arguments agree.
TernarySpace median_from_intervals(const IntervalStructure& is, const MetricMatrix& d, Ticks kappa0);

struct FattenResult {
    IntervalStructure structure;
    Ticks hausdorff = 0;  // max over pairs of d_H([a,b], [a,b]')
    std::vector<Point> witness;
};

/// [a,b]' = N_k([a,b]) u N_k([b,a]) u {a,b} for a != b and [a,a]' = {a}.
FattenResult fatten(const IntervalStructure& is, const MetricMatrix& d, Ticks kappa0);

struct RoundTrip {
    Ticks defect = 0;
    std::vector<Point> witness;
    Ticks bound = 0;    // max{2 kappa0, psi(3 kappa0)}
    Ticks kappa0 = 0;
    ScanMode mode = ScanMode::exhaustive;
};

/// median -> intervals -> median: max over triples of d(mu, mu').
RoundTrip roundtrip_median_defect(const TernarySpace& space, const MetricMatrix& d, const ScanOptions& opt = {});

/// intervals -> median -> intervals: max over pairs of d_H([x,y], [x,y]').
RoundTrip roundtrip_interval_defect(const IntervalStructure& is, const MetricMatrix& d, Ticks kappa0,
                                    const ScanOptions& opt = {});

}  // namespace cma
