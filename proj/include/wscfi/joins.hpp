#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wscfi/cfi.hpp"
#include "wscfi/structure.hpp"

namespace wscfi {

struct Part {
    int index = 0;
    std::vector<Vertex> vertices;  // contiguous block of the join
    int source = 0;                // position in the input list
};

struct JoinedGraph {
    ColoredGraph graph;
    std::vector<Part> parts;
    std::vector<Vertex> join_vertices;  // u_1..u_c, last in the universe
};

// Parts are laid out in input order, then the c join vertices.
// Colors: class i of every part merged (i < c), then one singleton per join vertex.
JoinedGraph color_class_join(const std::vector<ColoredGraph>& gs);

// k copies each of CFI(base,0), CFI(base,g), CFI(base,1).
JoinedGraph cfi_omega(const ColoredGraph& base, int g, int k);

// Part index per vertex of the join, -1 for join vertices.
std::vector<int> part_labels(const JoinedGraph& j);

// Lifts part labels to a CFI graph over j.graph: gadget vertices follow their base vertex,
// edge vertices belong to a part iff both endpoints do.
std::vector<int> cfi_part_labels(const CfiGraph& c, const std::vector<int>& base_labels);

// Join vertices and all vertices of parts containing a pin, sorted.
std::vector<Vertex> pebbled_part_vertices(const std::vector<int>& labels, const std::vector<Vertex>& pins);

// Orderings of the pebbled-part vertices in lexicographic order. With limit > 0 and more than
// limit orderings, a deterministic seeded sample of limit orderings is produced instead (still sorted).
class PebbledPartIndividualizations {
public:
    PebbledPartIndividualizations(const std::vector<int>& labels, const std::vector<Vertex>& pins,
                                  std::uint64_t limit = 0, std::uint64_t seed = 0);
    std::optional<std::vector<Vertex>> next();
    bool exhaustive() const { return sample_.empty() && !sampled_; }
    const std::vector<Vertex>& vertices() const { return set_; }

private:
    std::vector<Vertex> set_;
    std::vector<Vertex> cur_;
    bool started_ = false, done_ = false, sampled_ = false;
    std::vector<std::vector<Vertex>> sample_;
    std::size_t pos_ = 0;
};

nlohmann::ordered_json joined_to_json(const JoinedGraph& j);
JoinedGraph joined_from_json(const nlohmann::json& j);

}  // namespace wscfi
