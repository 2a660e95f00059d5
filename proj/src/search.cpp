// Individualization/refinement search used as the exact oracle. Refinement is only a
// pruning device: every leaf is checked against the full structure.
#include "wscfi/search.hpp"

#include <algorithm>
#include <numeric>

namespace wscfi {

namespace {

std::uint64_t splitmix(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t h, std::uint64_t x) { return splitmix(h ^ splitmix(x + 0x632be59bd9b4e019ULL)); }

struct Index {
    const RelStructure* s = nullptr;
    int n = 0;
    std::vector<int> tuple_rel;
    std::vector<int> tuple_off;
    std::vector<Vertex> entries;
    std::vector<std::vector<std::pair<int, int>>> inc;  // (tuple, position)
    std::vector<std::uint64_t> init_key;
};

Index build_index(const RelStructure& s)
{
    Index ix;
    ix.s = &s;
    ix.n = s.n;
    ix.inc.resize(s.n);
    ix.tuple_off.push_back(0);
    int rid = 0;
    for (const auto& [name, r] : s.relations) {
        for (const auto& t : r.tuples) {
            int ti = static_cast<int>(ix.tuple_rel.size());
            ix.tuple_rel.push_back(rid);
            for (int p = 0; p < r.arity; ++p) {
                ix.entries.push_back(t[p]);
                ix.inc[t[p]].emplace_back(ti, p);
            }
            ix.tuple_off.push_back(static_cast<int>(ix.entries.size()));
        }
        ++rid;
    }
    auto col = s.color_of();
    std::vector<int> ipos(s.n, -1);
    for (std::size_t i = 0; i < s.indiv.size(); ++i)
        ipos[s.indiv[i]] = static_cast<int>(i);
    ix.init_key.resize(s.n);
    for (int v = 0; v < s.n; ++v)
        ix.init_key[v] = (static_cast<std::uint64_t>(col[v]) << 32) | static_cast<std::uint32_t>(ipos[v] + 1);
    return ix;
}

using Key = std::pair<std::uint64_t, std::uint64_t>;

// Ranks keys jointly over all sides; returns number of distinct keys.
int rank_joint(const std::vector<std::vector<Key>>& keys, std::vector<std::vector<int>>& cells)
{
    std::vector<Key> all;
    for (const auto& k : keys)
        all.insert(all.end(), k.begin(), k.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    cells.resize(keys.size());
    for (std::size_t s = 0; s < keys.size(); ++s) {
        cells[s].resize(keys[s].size());
        for (std::size_t v = 0; v < keys[s].size(); ++v)
            cells[s][v] = static_cast<int>(std::lower_bound(all.begin(), all.end(), keys[s][v]) - all.begin());
    }
    return static_cast<int>(all.size());
}

bool same_histogram(const std::vector<std::vector<int>>& cells, int count)
{
    if (cells.size() < 2)
        return true;
    std::vector<int> h0(count, 0);
    for (int c : cells[0])
        ++h0[c];
    for (std::size_t s = 1; s < cells.size(); ++s) {
        std::vector<int> h(count, 0);
        for (int c : cells[s])
            ++h[c];
        if (h != h0)
            return false;
    }
    return true;
}

// Joint refinement to the coarsest stable partition. Returns the cell count, or -1 if
// the sides stop matching.
int refine(const std::vector<const Index*>& ix, std::vector<std::vector<int>>& cells, int count)
{
    if (!same_histogram(cells, count))
        return -1;
    std::vector<std::vector<Key>> keys(ix.size());
    std::vector<std::uint64_t> parts;
    for (;;) {
        for (std::size_t s = 0; s < ix.size(); ++s) {
            const Index& I = *ix[s];
            const auto& c = cells[s];
            std::vector<std::uint64_t> th(I.tuple_rel.size());
            for (std::size_t t = 0; t < I.tuple_rel.size(); ++t) {
                std::uint64_t h = static_cast<std::uint64_t>(I.tuple_rel[t]) + 1;
                for (int e = I.tuple_off[t]; e < I.tuple_off[t + 1]; ++e)
                    h = mix(h, static_cast<std::uint64_t>(c[I.entries[e]]));
                th[t] = h;
            }
            keys[s].resize(I.n);
            for (int v = 0; v < I.n; ++v) {
                parts.clear();
                for (auto [t, p] : I.inc[v])
                    parts.push_back(mix(th[t], static_cast<std::uint64_t>(p) + 7));
                std::sort(parts.begin(), parts.end());
                std::uint64_t h = 0x51ed27;
                for (auto x : parts)
                    h = mix(h, x);
                keys[s][v] = {static_cast<std::uint64_t>(c[v]), h};
            }
        }
        std::vector<std::vector<int>> next;
        int nc = rank_joint(keys, next);
        if (!same_histogram(next, nc))
            return -1;
        cells = std::move(next);
        if (nc == count)
            return count;
        count = nc;
    }
}

int initial_cells(const std::vector<const Index*>& ix, std::vector<std::vector<int>>& cells)
{
    std::vector<std::vector<Key>> keys(ix.size());
    for (std::size_t s = 0; s < ix.size(); ++s)
        for (int v = 0; v < ix[s]->n; ++v)
            keys[s].push_back({ix[s]->init_key[v], 0});
    return rank_joint(keys, cells);
}

// Splits the cell of chosen[s] on every side, chosen vertex first.
int split(std::vector<std::vector<int>>& cells, const std::vector<Vertex>& chosen)
{
    std::vector<std::vector<Key>> keys(cells.size());
    for (std::size_t s = 0; s < cells.size(); ++s)
        for (std::size_t v = 0; v < cells[s].size(); ++v)
            keys[s].push_back({static_cast<std::uint64_t>(cells[s][v]),
                               static_cast<int>(v) == chosen[s] ? 0u : 1u});
    return rank_joint(keys, cells);
}

int target_cell(const std::vector<int>& cells, int count)
{
    std::vector<int> size(count, 0);
    for (int c : cells)
        ++size[c];
    for (int c = 0; c < count; ++c)
        if (size[c] > 1)
            return c;
    return -1;
}

void check_size(const RelStructure& s, const SearchLimits& lim)
{
    if (s.n > lim.max_vertices)
        throw Error(ErrorKind::SizeLimitExceeded,
                    "universe of size " + std::to_string(s.n) + " exceeds brute-force bound " +
                        std::to_string(lim.max_vertices));
}

bool same_shape(const RelStructure& s, const RelStructure& t)
{
    if (s.n != t.n || s.indiv.size() != t.indiv.size() || s.colors.size() != t.colors.size() ||
        s.relations.size() != t.relations.size())
        return false;
    for (std::size_t i = 0; i < s.colors.size(); ++i)
        if (s.colors[i].size() != t.colors[i].size())
            return false;
    auto it = t.relations.begin();
    for (const auto& [name, r] : s.relations) {
        if (it->first != name || it->second.arity != r.arity || it->second.tuples.size() != r.tuples.size())
            return false;
        ++it;
    }
    return true;
}

class IsoSearch {
public:
    IsoSearch(const Index& a, const Index& b, const SearchLimits& lim, bool all)
        : a_(a), b_(b), lim_(lim), all_(all)
    {
    }

    void run()
    {
        std::vector<const Index*> ix{&a_, &b_};
        std::vector<std::vector<int>> cells;
        int count = initial_cells(ix, cells);
        count = refine(ix, cells, count);
        if (count >= 0)
            rec(cells, count);
    }

    std::vector<Permutation> found;

private:
    bool rec(const std::vector<std::vector<int>>& cells, int count)
    {
        if (++nodes_ > lim_.max_nodes)
            throw Error(ErrorKind::BudgetExceeded, "search node budget exhausted");
        int n = a_.n;
        if (count == n) {
            std::vector<Vertex> at(n);
            for (int w = 0; w < n; ++w)
                at[cells[1][w]] = w;
            Permutation p(n);
            for (int v = 0; v < n; ++v)
                p[v] = at[cells[0][v]];
            if (is_isomorphism(*a_.s, *b_.s, p)) {
                found.push_back(std::move(p));
                return !all_;
            }
            return false;
        }
        int t = target_cell(cells[0], count);
        Vertex v = static_cast<Vertex>(std::find(cells[0].begin(), cells[0].end(), t) - cells[0].begin());
        std::vector<const Index*> ix{&a_, &b_};
        for (Vertex w = 0; w < n; ++w) {
            if (cells[1][w] != t)
                continue;
            auto next = cells;
            int c = split(next, {v, w});
            c = refine(ix, next, c);
            if (c >= 0 && rec(next, c))
                return true;
        }
        return false;
    }

    const Index& a_;
    const Index& b_;
    const SearchLimits& lim_;
    bool all_;
    std::uint64_t nodes_ = 0;
};

class CanonSearch {
public:
    CanonSearch(const Index& a, const SearchLimits& lim) : a_(a), lim_(lim) {}

    void run()
    {
        std::vector<const Index*> ix{&a_};
        std::vector<std::vector<int>> cells;
        int count = initial_cells(ix, cells);
        count = refine(ix, cells, count);
        rec(cells[0], count);
    }

    Permutation best_label;
    std::vector<int> best;
    bool have = false;

private:
    void rec(const std::vector<int>& cells, int count)
    {
        if (++nodes_ > lim_.max_nodes)
            throw Error(ErrorKind::BudgetExceeded, "search node budget exhausted");
        if (count == a_.n) {
            auto code = serialize(relabel(*a_.s, cells));
            if (!have || code < best) {
                best = std::move(code);
                best_label = cells;
                have = true;
            }
            return;
        }
        int t = target_cell(cells, count);
        std::vector<const Index*> ix{&a_};
        for (Vertex v = 0; v < a_.n; ++v) {
            if (cells[v] != t)
                continue;
            std::vector<std::vector<int>> next{cells};
            int c = split(next, {v});
            c = refine(ix, next, c);
            rec(next[0], c);
        }
    }

    const Index& a_;
    const SearchLimits& lim_;
    std::uint64_t nodes_ = 0;
};

}  // namespace

std::vector<int> serialize(const RelStructure& s)
{
    std::vector<int> out{s.n, static_cast<int>(s.relations.size())};
    for (const auto& [name, r] : s.relations) {
        out.push_back(static_cast<int>(name.size()));
        for (char ch : name)
            out.push_back(static_cast<unsigned char>(ch));
        out.push_back(r.arity);
        out.push_back(static_cast<int>(r.tuples.size()));
        for (const auto& t : r.tuples)
            out.insert(out.end(), t.begin(), t.end());
    }
    out.push_back(static_cast<int>(s.colors.size()));
    for (const auto& c : s.colors) {
        out.push_back(static_cast<int>(c.size()));
        out.insert(out.end(), c.begin(), c.end());
    }
    out.push_back(static_cast<int>(s.indiv.size()));
    out.insert(out.end(), s.indiv.begin(), s.indiv.end());
    return out;
}

std::vector<Permutation> automorphisms(const RelStructure& s, const SearchLimits& lim)
{
    check_size(s, lim);
    if (s.n == 0)
        return {Permutation{}};
    Index a = build_index(s);
    Index b = build_index(s);
    IsoSearch search(a, b, lim, true);
    search.run();
    std::sort(search.found.begin(), search.found.end());
    return search.found;
}

std::vector<std::vector<Tuple>> orbits_from_group(int n, int k, const std::vector<Permutation>& group)
{
    std::size_t total = 1;
    for (int i = 0; i < k; ++i)
        total *= static_cast<std::size_t>(n);
    std::vector<std::size_t> parent(total);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    auto decode = [&](std::size_t code) {
        Tuple t(k);
        for (int i = k - 1; i >= 0; --i) {
            t[i] = static_cast<Vertex>(code % n);
            code /= n;
        }
        return t;
    };
    for (const auto& p : group) {
        for (std::size_t code = 0; code < total; ++code) {
            std::size_t img = 0, rest = code, mul = 1;
            for (int i = 0; i < k; ++i) {
                img += static_cast<std::size_t>(p[rest % n]) * mul;
                rest /= n;
                mul *= n;
            }
            std::size_t x = find(code), y = find(img);
            if (x != y)
                parent[std::max(x, y)] = std::min(x, y);
        }
    }
    std::vector<std::vector<Tuple>> classes;
    std::vector<long> slot(total, -1);
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t r = find(code);
        if (slot[r] < 0) {
            slot[r] = static_cast<long>(classes.size());
            classes.emplace_back();
        }
        classes[slot[r]].push_back(decode(code));
    }
    return classes;
}

std::vector<std::vector<Tuple>> orbits(const RelStructure& s, int k, const SearchLimits& lim)
{
    if (k < 0)
        throw Error(ErrorKind::InvalidStructure, "negative tuple arity");
    return orbits_from_group(s.n, k, automorphisms(s, lim));
}

std::optional<Permutation> isomorphic(const RelStructure& s, const RelStructure& t, const SearchLimits& lim)
{
    check_size(s, lim);
    check_size(t, lim);
    if (!same_shape(s, t))
        return std::nullopt;
    if (s.n == 0)
        return Permutation{};
    Index a = build_index(s);
    Index b = build_index(t);
    IsoSearch search(a, b, lim, false);
    search.run();
    if (search.found.empty())
        return std::nullopt;
    return search.found.front();
}

std::vector<int> equitable_cells(const RelStructure& s)
{
    if (s.n == 0)
        return {};
    Index a = build_index(s);
    std::vector<const Index*> ix{&a};
    std::vector<std::vector<int>> cells;
    int count = initial_cells(ix, cells);
    refine(ix, cells, count);
    return cells[0];
}

CanonicalLabeling canonical_labeling(const RelStructure& s, const SearchLimits& lim)
{
    check_size(s, lim);
    if (s.n == 0)
        return {Permutation{}, s};
    Index a = build_index(s);
    CanonSearch search(a, lim);
    search.run();
    return {search.best_label, relabel(s, search.best_label)};
}

}  // namespace wscfi
