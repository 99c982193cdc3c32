#pragma once

#include <iosfwd>
#include <string>

#include "cma/generators.hpp"
#include "cma/interval_structure.hpp"
#include "cma/metric.hpp"
#include "cma/space.hpp"

namespace cma {

/// Rebuilds a space from {"generator": name, "params": {...}}. Known names:
/// hypercube, grid, path, star, graph_median, tree_random, product,
/// spiked_tree, spiked_line, perturb.
TernarySpace build_generator(const std::string& name, const std::string& params_json);

/// Space files: {"n", "label", "mu"} with mu the row-major N^3 table, or the
/// generator form above. InputError on anything malformed.
TernarySpace parse_space(const std::string& text);
TernarySpace read_space_file(const std::string& path);

/// Generator form when the space knows its origin and `table` is false,
/// otherwise the full table.
std::string space_to_json(const TernarySpace& space, bool table = false);

/// First line N, then one "u v" edge per line (0-based). Blank lines and lines
/// starting with '#' are skipped.
GraphSpec parse_graph(std::istream& in);
void write_graph(std::ostream& out, const GraphSpec& g);

/// First line N, then N rows of N entries, each an integer or "p/q".
MetricMatrix parse_metric(std::istream& in);
void write_metric(std::ostream& out, const MetricMatrix& d);

/// {"n", "primed", "kappa0", "pairs": [[a, b, [members...]], ...]}. Unprimed
/// files list pairs with a <= b only; the reverse pair is filled in. kappa0
/// is an integer or "p/q" in metric units.
struct StructureFile {
    IntervalStructure structure;
    Rational kappa0{0};
};

StructureFile parse_structure(const std::string& text);
std::string structure_to_json(const IntervalStructure& is, const Rational& kappa0);

std::string read_text_file(const std::string& path);

}  // namespace cma
