#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wscfi/structure.hpp"

namespace wscfi {

struct WlLimits {
    std::uint64_t max_tuples = 2'000'000;  // n^d
    std::uint64_t max_work = 4'000'000'000ULL;  // n^(d+1) per round, summed
};

struct StableColoring {
    int d = 0;
    int n = 0;
    std::vector<int> color;  // tuple (t_0..t_{d-1}) at index sum t_i n^i
    std::vector<std::int64_t> histogram;  // count per color id
    int rounds = 0;
};

StableColoring wl_refine(const RelStructure& s, int d, const WlLimits& lim = {});

// (k-1)-dimensional WL on the disjoint union; histograms of tuples inside each side compared.
bool ck_equivalent(const RelStructure& a, const RelStructure& b, int k, const WlLimits& lim = {});

enum class Winner { Spoiler, Duplicator };

struct GameVerdict {
    Winner winner = Winner::Duplicator;
    std::optional<int> depth;  // rounds Spoiler needs
};

struct GameLimits {
    std::uint64_t max_positions = 3'000'000;
    std::uint64_t max_games = 2000;  // post-P-move games in the P^k game
};

// Bijective k-pebble game starting with pebbles on (apins[i], bpins[i]).
// Individualized vertices act as constants matched by position.
GameVerdict bijective_game_decide(const RelStructure& a, const std::vector<Vertex>& apins, const RelStructure& b,
                                  const std::vector<Vertex>& bpins, int k, const GameLimits& lim = {});

// Maximum bipartite matching; adj[u] lists right vertices. Returns the matched size.
int hopcroft_karp(int left, int right, const std::vector<std::vector<int>>& adj, std::vector<int>* match_left = nullptr);

// P^k game on CFI graphs over color class joins; labels give the part of each vertex (-1 = join).
GameVerdict pk_game_decide(const RelStructure& a, const std::vector<int>& a_labels, const RelStructure& b,
                           const std::vector<int>& b_labels, int k, const GameLimits& lim = {});

}  // namespace wscfi
