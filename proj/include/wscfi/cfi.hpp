#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "wscfi/structure.hpp"

namespace wscfi {

enum class CfiVariant { TwoPair, Relational, SinglePair };

const char* variant_name(CfiVariant v);
CfiVariant parse_variant(const std::string& s);

struct Origin {
    enum class Kind { Gadget, DirectedEdge, UndirectedEdge };
    Kind kind = Kind::Gadget;
    Vertex u = -1;  // gadget: base vertex; edges: (u,v), u<v when undirected
    Vertex v = -1;
    int bits = 0;   // gadget: b over u's sorted neighbor list; edge vertex: index j of the pair
    bool operator==(const Origin&) const = default;
};

// Indexed by the base's sorted edge list (graph_edges order).
using Twist = std::vector<std::uint8_t>;

struct CfiGraph {
    RelStructure graph;
    ColoredGraph base;
    CfiVariant variant = CfiVariant::TwoPair;
    std::vector<Origin> origin;
    Twist twist;
    bool gadgets_last = false;
};

RelStructure build_gadget(int d, CfiVariant variant);
CfiGraph build_cfi(const ColoredGraph& base, const Twist& f, CfiVariant variant, bool gadgets_last = false);
int parity(const Twist& f);

// Twist with one 1 on the first edge when p is odd.
Twist parity_twist(const ColoredGraph& base, int p);
Twist parse_twist(const std::string& spec, const ColoredGraph& base);
std::string twist_bits(const Twist& f);
int edge_index(const ColoredGraph& base, Vertex u, Vertex v);  // -1 if absent

// Vertex lookups; -1 if absent.
Vertex edge_vertex(const CfiGraph& c, Vertex u, Vertex v, int j);
Vertex gadget_vertex(const CfiGraph& c, Vertex u, int bits);

// Returns CFI(G,g') and an isomorphism from c to it.
std::pair<CfiGraph, Permutation> path_twist_iso(const CfiGraph& c, const std::vector<Vertex>& path);

struct RecoveredBase {
    ColoredGraph base;
    std::vector<std::pair<Vertex, Vertex>> individualized;  // orig of the individualization, in order
    std::vector<Origin> origin;                             // per input vertex; edge bits are unknown (-1)
};

RecoveredBase recover_base(const ColoredGraph& g);

// One vertex per edge-vertex-pair, sorted. Throws CycleRemains.
std::vector<Vertex> edge_pair_order(const CfiGraph& c, const std::vector<Vertex>& seed);
std::vector<Vertex> edge_pair_order(const std::vector<std::vector<Vertex>>& adj, const std::vector<Origin>& origin,
                                    const ColoredGraph& base, const std::vector<Vertex>& seed);

nlohmann::ordered_json cfi_to_json(const CfiGraph& c);
CfiGraph cfi_from_json(const nlohmann::json& j);

}  // namespace wscfi
