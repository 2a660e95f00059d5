#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wscfi/structure.hpp"

namespace wscfi {

struct SearchLimits {
    int max_vertices = 64;
    std::uint64_t max_nodes = 20'000'000;  // search-tree nodes before BudgetExceeded
};

// All automorphisms fixing the individualization pointwise, sorted lexicographically.
std::vector<Permutation> automorphisms(const RelStructure& s, const SearchLimits& lim = {});

// Partition of all n^k tuples into orbits; classes sorted, ordered by first tuple.
std::vector<std::vector<Tuple>> orbits(const RelStructure& s, int k, const SearchLimits& lim = {});
std::vector<std::vector<Tuple>> orbits_from_group(int n, int k, const std::vector<Permutation>& group);

std::optional<Permutation> isomorphic(const RelStructure& s, const RelStructure& t,
                                      const SearchLimits& lim = {});

struct CanonicalLabeling {
    Permutation labeling;  // vertex -> canonical position
    RelStructure form;     // relabel(s, labeling)
};

// Exhaustive search-tree minimum. Isomorphic inputs give identical forms.
CanonicalLabeling canonical_labeling(const RelStructure& s, const SearchLimits& lim = {});

// Coarsest equitable partition refining colors and individualization; cell ids are
// isomorphism-invariant. A discrete result certifies a trivial automorphism group.
std::vector<int> equitable_cells(const RelStructure& s);

// Flat integer encoding used to compare structures lexicographically.
std::vector<int> serialize(const RelStructure& s);

}  // namespace wscfi
