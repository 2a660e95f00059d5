#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wscfi/structure.hpp"

namespace wscfi {

// DIMACS: "p edge n m", one "n v c" line per vertex (color = class index), then "e u v"
// lines with u < v sorted; ids are 1-based. Throws NonGraphInput.
std::string export_dimacs(const ColoredGraph& g);
ColoredGraph import_dimacs(const std::string& text);

// dreadnaut input with 0-based labels: each vertex line lists its larger neighbours, the
// partition line lists color classes in class order. Throws NonGraphInput.
std::string export_dreadnaut(const ColoredGraph& g);

// Named base graphs: cycle, complete, path, prism (n = vertices of one cycle), star.
ColoredGraph base_family(const std::string& name, int n);

// G(n, p) with vertices spread over `colors` classes; independent of the standard
// library's distributions.
ColoredGraph random_colored_graph(int n, double p, int colors, std::uint64_t seed);

std::string sha256_hex(const std::string& bytes);

// Runs one command line (without the program name). Exit codes: 0 success/equivalent,
// 1 distinguished/non-isomorphic/check failed, 2 usage or input error, 3 budget exceeded.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wscfi
