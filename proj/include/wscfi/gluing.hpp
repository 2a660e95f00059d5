#pragma once

#include <optional>
#include <vector>

#include "wscfi/cfi.hpp"
#include "wscfi/multipede.hpp"

namespace wscfi {

// Universe: the 2|W| feet, then the gadget vertices of the CFI graph in its own order.
struct Gluing {
    RelStructure structure;                      // relation "R"
    BipartiteBase base;
    std::vector<int> x;                          // x[i] carries the i-th base edge of the CFI graph
    ColoredGraph cfi_base;
    std::vector<std::optional<Origin>> cfi_origin;  // per gluing vertex
    std::vector<Vertex> from_cfi;                // CFI vertex -> gluing vertex
};

// c must be single-pair; foot (x[i], j) is identified with edge vertex j of the i-th base edge.
Gluing glue(const Multipede& m, const std::vector<int>& x, const CfiGraph& c);

// Graph on the vertices occurring in triples (u,v,v); vertex order kept, colors restricted.
ColoredGraph extract_cfi(const RelStructure& s);

struct FixedSegments {
    std::vector<int> directly, closure, gadget;  // sorted
    std::vector<int> all() const;                // sorted union
};

FixedSegments classify_fixed_segments(const Gluing& g, const std::vector<Vertex>& pins);

nlohmann::ordered_json gluing_to_json(const Gluing& g);

}  // namespace wscfi
