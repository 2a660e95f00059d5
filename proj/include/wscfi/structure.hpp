#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace wscfi {

using Vertex = int;
using Tuple = std::vector<Vertex>;
// perm[v] is the image of v
using Permutation = std::vector<Vertex>;

enum class ErrorKind {
    SizeLimitExceeded,
    DuplicateVertex,
    InvalidStructure,
    ArityBoundExceeded,
    DisconnectedBase,
    NotAPath,
    NotCfiShaped,
    CycleRemains,
    ClassCountMismatch,
    DisconnectedPart,
    BoundExceeded,
    SizeMismatch,
    WrongVariant,
    BudgetExceeded,
    KTooSmall,
    NonMonotoneStep,
    ArityMismatch,
    RejectedUnwitnessed,
    NotProgressing,
    IoError,
    NonGraphInput,
    StepFailure,
    Usage,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg);
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

struct Relation {
    int arity = 0;
    std::vector<Tuple> tuples;  // sorted, unique

    bool contains(const Tuple& t) const;
    void normalize();
    bool operator==(const Relation&) const = default;
};

struct RelStructure {
    int n = 0;
    std::map<std::string, Relation> relations;
    std::vector<std::vector<Vertex>> colors;  // class index = color
    std::vector<Vertex> indiv;

    // sorts tuples and class members; class order is kept
    void normalize();
    // throws InvalidStructure
    void validate() const;
    std::vector<int> color_of() const;
    bool operator==(const RelStructure&) const = default;
};

// ColoredGraph: a RelStructure whose only relation is a symmetric irreflexive "E".
using ColoredGraph = RelStructure;

// One color class unless classes are given.
ColoredGraph make_graph(int n, const std::vector<std::pair<Vertex, Vertex>>& edges,
                        std::vector<std::vector<Vertex>> colors = {});
bool is_colored_graph(const RelStructure& s);
std::vector<std::pair<Vertex, Vertex>> graph_edges(const ColoredGraph& g);  // u < v, sorted
std::vector<std::vector<Vertex>> adjacency(const ColoredGraph& g);
bool is_connected(const ColoredGraph& g);

Permutation identity_perm(int n);
bool is_permutation(const Permutation& p, int n);
Permutation compose(const Permutation& outer, const Permutation& inner);  // outer ∘ inner
Permutation inverse(const Permutation& p);

// Relabels vertex v to p[v].
RelStructure relabel(const RelStructure& s, const Permutation& p);
RelStructure individualize(const RelStructure& s, const std::vector<Vertex>& vs);
// Substructure on vs, vertex vs[i] becomes i; empty classes are dropped.
RelStructure induced(const RelStructure& s, const std::vector<Vertex>& vs);
// Drops empty color classes, keeping order.
RelStructure compact_colors(RelStructure s);

bool is_isomorphism(const RelStructure& s, const RelStructure& t, const Permutation& p);
bool is_automorphism(const RelStructure& s, const Permutation& p);

nlohmann::ordered_json to_json(const RelStructure& s);
RelStructure structure_from_json(const nlohmann::json& j);
std::string dump_structure(const RelStructure& s);
RelStructure read_structure(const std::string& path);
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace wscfi
