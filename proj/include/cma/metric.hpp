#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cma/types.hpp"

namespace cma {

class TernarySpace;

/// Exact symmetric distance table. Entry (a,b) is ticks(a,b)/scale; integer
/// metrics have scale 1.
class MetricMatrix {
public:
    MetricMatrix() = default;
    explicit MetricMatrix(std::size_t n, Ticks scale = 1);

    /// Builds from rationals, choosing the least common denominator as scale.
    static MetricMatrix from_rationals(std::size_t n, const std::vector<Rational>& entries);

    [[nodiscard]] std::size_t size() const { return n_; }
    [[nodiscard]] Ticks scale() const { return scale_; }
    [[nodiscard]] Ticks operator()(Point a, Point b) const { return ticks_[static_cast<std::size_t>(a) * n_ + b]; }
    void set(Point a, Point b, Ticks t);
    [[nodiscard]] Rational value(Point a, Point b) const { return Rational((*this)(a, b), scale_); }
    [[nodiscard]] Rational to_rational(Ticks t) const { return Rational(t, scale_); }
    /// Ticks for an integer number of metric units.
    [[nodiscard]] Ticks units(std::int64_t r) const { return r * scale_; }
    [[nodiscard]] const std::vector<Ticks>& raw() const { return ticks_; }

    /// Sorted distinct values that occur as d(a,b), including 0.
    [[nodiscard]] std::vector<Ticks> realized() const;
    [[nodiscard]] Ticks diameter() const;

    friend bool operator==(const MetricMatrix& x, const MetricMatrix& y) = default;

private:
    std::size_t n_ = 0;
    Ticks scale_ = 1;
    std::vector<Ticks> ticks_;
};

struct MetricCheck {
    bool ok = true;
    std::string failure;          // "diagonal", "symmetry", "negative", "triangle", "positivity"
    std::vector<Point> witness;
};

/// Zero diagonal, symmetry, non-negativity and the triangle inequality (N^3).
/// With uniformly_discrete, off-diagonal entries must also be positive.
MetricCheck validate(const MetricMatrix& d, bool uniformly_discrete = false);

/// Shortest paths over the complete graph with weight card[x,y] - 1.
/// Throws AxiomError naming (T1) or (T2) when the operator violates them.
MetricMatrix induced_metric(const TernarySpace& space, unsigned threads = 1);

/// Edge-path metric of a connected graph given by adjacency lists.
MetricMatrix bfs_metric(const std::vector<std::vector<Point>>& adjacency);

/// l1 metric on a product, with index i1 * n2 + i2.
MetricMatrix l1_product(const MetricMatrix& d1, const MetricMatrix& d2);

/// Restriction of d to the listed points, in list order.
MetricMatrix restrict_metric(const MetricMatrix& d, const std::vector<Point>& points);

/// Hausdorff distance between non-empty point sets.
Ticks hausdorff(const MetricMatrix& d, const std::vector<Point>& a, const std::vector<Point>& b);

/// Closed neighbourhood {x : d(x, A) <= r}, sorted.
std::vector<Point> neighborhood(const MetricMatrix& d, const std::vector<Point>& a, Ticks r);

/// min over y in A of d(x, y).
Ticks distance_to_set(const MetricMatrix& d, Point x, const std::vector<Point>& a);

struct QIFit {
    // Pure multiplicative fit: C = 0.
    Rational L{1};
    Rational C{0};
    std::pair<Point, Point> L_witness{0, 0};
    // Affine fit with L' = 1: C' is the largest |d1 - d2|.
    Rational L_affine{1};
    Rational C_affine{0};
    std::pair<Point, Point> C_witness{0, 0};
    /// False when some pair is at distance 0 in one metric only; L then
    /// covers the remaining pairs and L_witness names the offending pair.
    bool finite = true;
};

QIFit quasi_isometry_fit(const MetricMatrix& d1, const MetricMatrix& d2);

struct GromovResult {
    Rational delta{0};
    std::array<Point, 4> witness{};  // (a, b, c, p)
    ScanMode mode = ScanMode::exhaustive;
    std::uint64_t evaluated = 0;
};

/// max over (a,b,c,p) of min{(a|b)_p, (b|c)_p} - (a|c)_p, floored at 0.
GromovResult gromov_delta(const MetricMatrix& d, const ScanOptions& opt = {});

}  // namespace cma
