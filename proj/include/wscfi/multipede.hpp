#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "wscfi/structure.hpp"

namespace wscfi {

// Segments are 0..w-1; the order on V ∪ W is segment id order, then constraint index.
// Each constraint lists its three segments ascending; constraints are sorted and distinct.
struct BipartiteBase {
    int w = 0;
    std::vector<std::array<int, 3>> constraints;
    bool operator==(const BipartiteBase&) const = default;
};

// Normalizes and validates (three distinct in-range segments per constraint).
BipartiteBase make_base(int w, std::vector<std::array<int, 3>> constraints);

// Each 3-subset becomes a constraint with probability n^(-2+epsilon).
BipartiteBase sample_bipartite(int n, double epsilon, std::uint64_t seed);

// Rank over GF(2) of the constraint/segment incidence matrix.
int gf2_rank(const BipartiteBase& b);
bool is_odd(const BipartiteBase& b);

struct MeagerLimits {
    int max_segments = 24;
    std::uint64_t max_nodes = 5'000'000;
};

// Exact. Only connected unions of constraint neighbourhoods are enumerated: a violating set
// always contains one.
bool is_k_meager(const BipartiteBase& b, int k, const MeagerLimits& lim = {});

// Distance in the bipartite graph from a segment to every segment (even, or -1 if unreachable).
std::vector<int> segment_distances(const BipartiteBase& b, int from);

struct ScatteredSet {
    std::vector<int> segments;
    bool complete = false;  // reached the target size
};

// Greedy in segment order, pairwise distance >= 2k.
ScatteredSet scattered_set(const BipartiteBase& b, int k, int target);

std::vector<int> attractor(const BipartiteBase& b, const std::vector<int>& x);
std::vector<int> closure(const BipartiteBase& b, const std::vector<int>& x);
bool is_closed(const BipartiteBase& b, const std::vector<int>& x);
// Components of a set: connected via constraints lying inside it. Sorted by least member.
std::vector<std::vector<int>> components(const BipartiteBase& b, const std::vector<int>& x);

struct Multipede {
    RelStructure structure;  // relation "R", one color class per segment
    BipartiteBase base;
};

inline Vertex foot(int segment, int i) { return 2 * segment + i; }

Multipede build_multipede(const BipartiteBase& b);
// Substructure on the feet of x (x sorted), relabelled in foot order.
RelStructure feet_induced(const Multipede& m, const std::vector<int>& x);

struct SampleMeta {
    int n = 0;
    double epsilon = 0;
    std::uint64_t seed = 0;
    int attempt = 0;  // rejection-sampling attempt that succeeded
};

// Resamples with derived seeds until the requested checks pass; BudgetExceeded after max_tries.
std::pair<BipartiteBase, SampleMeta> sample_verified(int n, double epsilon, std::uint64_t seed, bool require_odd,
                                                     int meager_k, int max_tries = 1000);

nlohmann::ordered_json base_to_json(const BipartiteBase& b);
BipartiteBase base_from_json(const nlohmann::json& j);

}  // namespace wscfi
