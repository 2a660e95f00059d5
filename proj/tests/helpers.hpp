#pragma once
// Independent oracles and generators shared by the unit tests.

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "wscfi/multipede.hpp"
#include "wscfi/structure.hpp"

namespace testutil {

using namespace wscfi;

// Plain n! enumeration, no pruning.
inline std::vector<Permutation> all_isomorphisms_naive(const RelStructure& s, const RelStructure& t)
{
    std::vector<Permutation> out;
    if (s.n != t.n)
        return out;
    Permutation p(s.n);
    std::iota(p.begin(), p.end(), 0);
    do {
        if (is_isomorphism(s, t, p))
            out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

inline Permutation random_perm(int n, std::mt19937_64& rng)
{
    Permutation p(n);
    std::iota(p.begin(), p.end(), 0);
    std::shuffle(p.begin(), p.end(), rng);
    return p;
}

inline ColoredGraph random_graph(int n, double p, int ncolors, std::mt19937_64& rng)
{
    std::bernoulli_distribution coin(p);
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (coin(rng))
                edges.emplace_back(u, v);
    std::vector<std::vector<Vertex>> colors(std::max(1, ncolors));
    std::uniform_int_distribution<int> pick(0, std::max(1, ncolors) - 1);
    for (int v = 0; v < n; ++v)
        colors[ncolors > 1 ? pick(rng) : 0].push_back(v);
    std::erase_if(colors, [](const auto& c) { return c.empty(); });
    return make_graph(n, edges, colors);
}

// Graph plus a random binary relation and a random ternary relation.
inline RelStructure random_structure(int n, std::mt19937_64& rng)
{
    RelStructure s = random_graph(n, 0.4, 2, rng);
    std::bernoulli_distribution coin(0.15);
    Relation d{2, {}}, t{3, {}};
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            if (coin(rng))
                d.tuples.push_back({a, b});
            for (int c = 0; c < n; ++c)
                if (coin(rng) && coin(rng))
                    t.tuples.push_back({a, b, c});
        }
    s.relations["D"] = d;
    s.relations["T"] = t;
    s.normalize();
    return s;
}

inline ColoredGraph cycle_graph(int n)
{
    std::vector<std::pair<Vertex, Vertex>> e;
    for (int i = 0; i < n; ++i)
        e.emplace_back(i, (i + 1) % n);
    return make_graph(n, e);
}

inline ColoredGraph complete_graph(int n)
{
    std::vector<std::pair<Vertex, Vertex>> e;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            e.emplace_back(i, j);
    return make_graph(n, e);
}

inline ColoredGraph totally_ordered(ColoredGraph g)
{
    g.colors.clear();
    for (int v = 0; v < g.n; ++v)
        g.colors.push_back({v});
    return g;
}

inline ColoredGraph prism_graph()
{
    return make_graph(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {0, 3}, {1, 4}, {2, 5}});
}

// Oddness straight from the definition: every nonempty segment set meets some constraint oddly.
inline bool is_odd_by_enumeration(const BipartiteBase& b)
{
    std::vector<std::uint32_t> masks;
    for (const auto& c : b.constraints)
        masks.push_back((1u << c[0]) | (1u << c[1]) | (1u << c[2]));
    for (std::uint32_t x = 1; x < (1u << b.w); ++x) {
        bool hit = false;
        for (auto m : masks)
            if (__builtin_popcount(x & m) & 1) {
                hit = true;
                break;
            }
        if (!hit)
            return false;
    }
    return true;
}

// All subsets of size <= 2k.
inline bool is_k_meager_naive(const BipartiteBase& b, int k)
{
    for (std::uint32_t x = 0; x < (1u << b.w); ++x) {
        int size = __builtin_popcount(x);
        if (size > 2 * k)
            continue;
        int inside = 0;
        for (const auto& c : b.constraints)
            inside += (x >> c[0] & 1) && (x >> c[1] & 1) && (x >> c[2] & 1);
        if (inside > 2 * size)
            return false;
    }
    return true;
}

// Attractor iterated to a fixpoint, straight from the definition.
inline std::vector<int> closure_naive(const BipartiteBase& b, std::vector<int> x)
{
    std::vector<char> in(b.w, 0);
    for (int s : x)
        in[s] = 1;
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& c : b.constraints)
            if (!in[c[0]] + !in[c[1]] + !in[c[2]] <= 1)
                for (int s : c)
                    if (!in[s])
                        in[s] = 1, changed = true;
    }
    std::vector<int> out;
    for (int s = 0; s < b.w; ++s)
        if (in[s])
            out.push_back(s);
    return out;
}

inline BipartiteBase random_base(int w, int m, std::mt19937_64& rng)
{
    std::vector<std::array<int, 3>> cs;
    std::uniform_int_distribution<int> seg(0, w - 1);
    for (int i = 0; i < m; ++i) {
        std::array<int, 3> c{seg(rng), seg(rng), seg(rng)};
        if (c[0] == c[1] || c[1] == c[2] || c[0] == c[2])
            continue;
        std::sort(c.begin(), c.end());
        if (std::find(cs.begin(), cs.end(), c) == cs.end())
            cs.push_back(c);
    }
    return make_base(w, cs);
}

}  // namespace testutil

namespace testutil {

// Deletes isolated or universal vertices until none is left or none qualifies.
inline bool is_threshold_direct(const wscfi::ColoredGraph& g)
{
    auto adj = wscfi::adjacency(g);
    std::vector<char> alive(g.n, 1);
    int left = g.n;
    while (left > 0) {
        int found = -1;
        for (int v = 0; v < g.n && found < 0; ++v) {
            if (!alive[v])
                continue;
            int deg = 0;
            for (int w : adj[v])
                deg += alive[w];
            if (deg == 0 || deg == left - 1)
                found = v;
        }
        if (found < 0)
            return false;
        alive[found] = 0;
        --left;
    }
    return true;
}

// Graph on n vertices from the bits of mask over the pairs (i<j) in lex order.
inline wscfi::ColoredGraph graph_from_mask(int n, std::uint64_t mask)
{
    std::vector<std::pair<wscfi::Vertex, wscfi::Vertex>> e;
    int b = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j, ++b)
            if ((mask >> b) & 1)
                e.emplace_back(i, j);
    return wscfi::make_graph(n, e);
}

}  // namespace testutil
