#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "wscfi/search.hpp"
#include "wscfi/structure.hpp"

namespace wscfi {

using TupleSet = std::set<Tuple>;
using VertexMap = std::vector<std::pair<Vertex, Vertex>>;  // graph of a putative automorphism

// Callbacks see the reduct: declared relations only, the individualization only if mentioned.
struct WscProgram {
    int arity = 1;
    int choice_arity = 1;
    std::optional<std::vector<std::string>> relations;  // nullopt: all
    bool mentions_order = false;
    bool mentions_colors = true;
    // returns the next stage; must contain R
    std::function<TupleSet(const RelStructure&, const TupleSet& r, const std::optional<Tuple>& chosen)> step;
    std::function<TupleSet(const RelStructure&, const TupleSet& r)> choice;
    // maps offered for the pair (a, b); some offered map should send b to a
    std::function<std::vector<VertexMap>(const RelStructure&, const TupleSet& r, const TupleSet& final_stage,
                                         const Tuple& a, const Tuple& b)>
        witness;
    std::function<bool(const RelStructure&, const TupleSet& final_stage)> output;
};

enum class PickPolicy { LexLeast, LexGreatest, SeededRandom };
const char* pick_name(PickPolicy p);
PickPolicy parse_pick(const std::string& s);

struct WscOptions {
    PickPolicy pick = PickPolicy::LexLeast;
    std::uint64_t seed = 0;
    int max_rounds = 1 << 20;
};

enum class WscVerdict { AcceptedTrue, AcceptedFalse, RejectedUnwitnessed };
const char* verdict_name(WscVerdict v);

struct WscRound {
    TupleSet choice;
    std::optional<Tuple> chosen;
    bool witnessed = true;
    int maps = 0;  // distinct non-identity maps verified
};

struct WscOutcome {
    WscVerdict verdict = WscVerdict::AcceptedFalse;
    TupleSet final_stage;
    std::vector<WscRound> log;
    std::string reason;  // first witnessing failure
};

RelStructure reduct(const RelStructure& s, const WscProgram& p);

// Throws NonMonotoneStep, ArityMismatch.
WscOutcome wsc_fixpoint(const RelStructure& s, const WscProgram& p, const WscOptions& opt = {});

WscProgram threshold_program();
WscOutcome threshold_via_wsc(const ColoredGraph& g, const WscOptions& opt = {});

// Returns a 1-orbit for an individualization-extension of the input.
using ReadyOracle = std::function<std::vector<Vertex>(const RelStructure&)>;

// Equitable cells of the shortest discrete individualization prefix; nullopt unless the
// refinement of s is discrete (which certifies a trivial automorphism group).
std::optional<std::vector<int>> anchor_cells(const RelStructure& s);

// Rigid structures: the vertex with the least anchor cell. Otherwise orbits from the
// automorphism group, ordered by their least canonical position.
std::vector<Vertex> brute_ready(const RelStructure& s, const SearchLimits& lim = {});

// Two-pair CFI graphs with only edge vertices individualized (gadget vertices only once every
// edge vertex is). Works from the recovered base, its 2-orbits and edge-vertex-pair orders.
std::vector<Vertex> cfi_ready(const RelStructure& s, const SearchLimits& lim = {});

struct CanonOptions {
    WscOptions wsc;
    int check_bound = 64;  // ready answers are checked against brute orbits up to this size
    SearchLimits search;
};

struct Canonization {
    RelStructure canon;        // relabeled by individualization order, indiv = 0..n-1
    std::vector<Vertex> order;  // vertex individualized at each position
    WscOutcome outcome;
};

// Throws RejectedUnwitnessed, NotProgressing.
Canonization gurevich_canonize(const RelStructure& s, const ReadyOracle& ready, const CanonOptions& opt = {});

struct KOrbitOrder {
    int k = 0;
    std::vector<std::vector<Tuple>> classes;  // ascending; members sorted
};

// Tuples compared by the canon of the structure with the tuple individualized.
KOrbitOrder order_k_orbits(const RelStructure& s, int k, const ReadyOracle& ready, const CanonOptions& opt = {});

nlohmann::ordered_json outcome_to_json(const WscOutcome& o);

}  // namespace wscfi
