#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cma/metric.hpp"
#include "cma/space.hpp"

namespace cma {

/// Simple undirected graph on {0..vertex_count-1}.
struct GraphSpec {
    std::size_t vertex_count = 0;
    std::vector<std::pair<Point, Point>> edges;

    /// Sorted adjacency lists. Throws InputError on loops, repeated edges or
    /// out-of-range endpoints.
    [[nodiscard]] std::vector<std::vector<Point>> adjacency() const;
    [[nodiscard]] bool connected() const;
};

GraphSpec path_graph(std::size_t n);
GraphSpec cycle_graph(std::size_t n);
GraphSpec star_graph(std::size_t leaves);
GraphSpec hypercube_graph(int n);
GraphSpec grid_graph(const std::vector<int>& dims);
/// Random recursive tree: vertex i > 0 attaches to a seeded uniform earlier vertex.
GraphSpec random_tree_graph(std::size_t n, std::uint64_t seed);

inline constexpr std::uint64_t default_size_budget = 1'000'000;

/// {0,1}^n with bitwise majority; point index is the bitmask.
TernarySpace gen_hypercube(int n);

/// Box prod [0, dims[i]] with coordinatewise clamp median. Mixed-radix index,
/// first coordinate most significant.
TernarySpace gen_grid(const std::vector<int>& dims, std::uint64_t budget = default_size_budget);

std::vector<int> grid_coords(const std::vector<int>& dims, Point p);
Point grid_index(const std::vector<int>& dims, const std::vector<int>& coords);
MetricMatrix grid_l1_metric(const std::vector<int>& dims);

/// nu(a,x,b): smallest-index vertex among those on geodesics from a to b that
/// minimise the edge distance to x. Throws InputError when disconnected.
TernarySpace gen_graph_median(const GraphSpec& g);

TernarySpace gen_tree_random(std::size_t n, std::uint64_t seed);

/// Coordinatewise operation on the product; index i1 * |s2| + i2.
TernarySpace gen_product(const TernarySpace& s1, const TernarySpace& s2, std::uint64_t budget = default_size_budget);

/// Line -m..m with a spike of length |k| hanging off each integer k.
struct SpikedLine {
    int m = 0;
    GraphSpec tree_graph;
    TernarySpace tree;                // T, graph median
    TernarySpace sub;                 // X = integers and spike tips
    std::vector<Point> inclusion;     // X index -> T index
    /// T index of integer k is k + m. In X, integer k is k + m as well and the
    /// tip of the spike at k != 0 is tip_in_sub[k + m].
    std::vector<Point> tip_in_sub;
    std::vector<Point> tip_in_tree;

    [[nodiscard]] Point integer(int k) const { return static_cast<Point>(k + m); }
};

SpikedLine gen_spiked_line(int m);

/// Displacement model: g(x) is a seeded uniform point of the closed ball of
/// radius `radius` metric units around x.
struct PerturbationSpec {
    std::int64_t radius = 0;
    std::uint64_t seed = 0;
};

/// mu'(a,b,c) = g(mu(a,b,c)) on pairwise distinct triples; (M1) values on the
/// rest. Requires (M1),(M2) of the input; the result is flagged non-median.
TernarySpace perturb(const TernarySpace& space, const MetricMatrix& d, const PerturbationSpec& spec);

/// The displacement map used by perturb.
std::vector<Point> perturbation_map(const MetricMatrix& d, const PerturbationSpec& spec);

}  // namespace cma
