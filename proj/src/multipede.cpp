#include "wscfi/multipede.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <random>
#include <set>

namespace wscfi {

namespace {

std::vector<std::vector<int>> incidence(const BipartiteBase& b)
{
    std::vector<std::vector<int>> inc(b.w);
    for (int c = 0; c < static_cast<int>(b.constraints.size()); ++c)
        for (int s : b.constraints[c])
            inc[s].push_back(c);
    return inc;
}

double uniform53(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint64_t splitmix(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::vector<int> sorted_unique(std::vector<int> x, int w)
{
    std::sort(x.begin(), x.end());
    x.erase(std::unique(x.begin(), x.end()), x.end());
    for (int s : x)
        if (s < 0 || s >= w)
            throw Error(ErrorKind::InvalidStructure, "segment out of range");
    return x;
}

}  // namespace

BipartiteBase make_base(int w, std::vector<std::array<int, 3>> constraints)
{
    if (w < 0)
        throw Error(ErrorKind::InvalidStructure, "negative segment count");
    for (auto& c : constraints) {
        std::sort(c.begin(), c.end());
        if (c[0] < 0 || c[2] >= w || c[0] == c[1] || c[1] == c[2])
            throw Error(ErrorKind::InvalidStructure, "constraint needs three distinct segments");
    }
    std::sort(constraints.begin(), constraints.end());
    if (std::adjacent_find(constraints.begin(), constraints.end()) != constraints.end())
        throw Error(ErrorKind::InvalidStructure, "repeated constraint");
    return {w, std::move(constraints)};
}

BipartiteBase sample_bipartite(int n, double epsilon, std::uint64_t seed)
{
    if (n < 4)
        throw Error(ErrorKind::InvalidStructure, "need at least 4 segments");
    if (!(epsilon > 0 && epsilon < 1))
        throw Error(ErrorKind::InvalidStructure, "epsilon must lie in (0,1)");
    const double p = std::pow(static_cast<double>(n), -2.0 + epsilon);
    std::mt19937_64 rng(seed);
    BipartiteBase b;
    b.w = n;
    for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y)
            for (int z = y + 1; z < n; ++z)
                if (uniform53(rng) < p)
                    b.constraints.push_back({x, y, z});
    return b;
}

int gf2_rank(const BipartiteBase& b)
{
    const int words = (b.w + 63) / 64;
    std::vector<std::vector<std::uint64_t>> rows;
    for (const auto& c : b.constraints) {
        std::vector<std::uint64_t> r(words, 0);
        for (int s : c)
            r[s / 64] |= std::uint64_t{1} << (s % 64);
        rows.push_back(std::move(r));
    }
    int rank = 0;
    for (int col = 0; col < b.w && rank < static_cast<int>(rows.size()); ++col) {
        const std::uint64_t bit = std::uint64_t{1} << (col % 64);
        int piv = -1;
        for (int i = rank; i < static_cast<int>(rows.size()); ++i)
            if (rows[i][col / 64] & bit) {
                piv = i;
                break;
            }
        if (piv < 0)
            continue;
        std::swap(rows[rank], rows[piv]);
        for (int i = 0; i < static_cast<int>(rows.size()); ++i)
            if (i != rank && (rows[i][col / 64] & bit))
                for (int t = 0; t < words; ++t)
                    rows[i][t] ^= rows[rank][t];
        ++rank;
    }
    return rank;
}

bool is_odd(const BipartiteBase& b) { return gf2_rank(b) == b.w; }

bool is_k_meager(const BipartiteBase& b, int k, const MeagerLimits& lim)
{
    if (b.w > lim.max_segments)
        throw Error(ErrorKind::BoundExceeded, "too many segments for the exact meagerness check");
    const std::size_t cap = 2 * static_cast<std::size_t>(std::max(k, 0));
    if (cap < 3)
        return true;
    auto inc = incidence(b);
    std::vector<char> in(b.w, 0);
    std::set<std::vector<int>> seen;
    std::vector<std::vector<int>> stack;
    std::uint64_t nodes = 0;
    for (const auto& c : b.constraints) {
        std::vector<int> u(c.begin(), c.end());
        if (seen.insert(u).second)
            stack.push_back(std::move(u));
    }
    while (!stack.empty()) {
        auto u = std::move(stack.back());
        stack.pop_back();
        if (++nodes > lim.max_nodes)
            throw Error(ErrorKind::BudgetExceeded, "meagerness search budget exhausted");
        for (int s : u)
            in[s] = 1;
        std::size_t inside = 0;
        std::vector<int> grow;
        for (int s : u)
            for (int ci : inc[s]) {
                const auto& c = b.constraints[ci];
                bool all = in[c[0]] && in[c[1]] && in[c[2]];
                if (all)
                    inside += s == c[0];
                else if (std::find(grow.begin(), grow.end(), ci) == grow.end())
                    grow.push_back(ci);
            }
        for (int s : u)
            in[s] = 0;
        if (inside > 2 * u.size())
            return false;
        for (int ci : grow) {
            std::vector<int> v = u;
            v.insert(v.end(), b.constraints[ci].begin(), b.constraints[ci].end());
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
            if (v.size() <= cap && seen.insert(v).second)
                stack.push_back(std::move(v));
        }
    }
    return true;
}

std::vector<int> segment_distances(const BipartiteBase& b, int from)
{
    auto inc = incidence(b);
    std::vector<int> d(b.w, -1);
    std::vector<char> used(b.constraints.size(), 0);
    std::deque<int> q{from};
    d.at(from) = 0;
    while (!q.empty()) {
        int s = q.front();
        q.pop_front();
        for (int ci : inc[s]) {
            if (used[ci])
                continue;
            used[ci] = 1;
            for (int t : b.constraints[ci])
                if (d[t] < 0) {
                    d[t] = d[s] + 2;
                    q.push_back(t);
                }
        }
    }
    return d;
}

ScatteredSet scattered_set(const BipartiteBase& b, int k, int target)
{
    ScatteredSet out;
    std::vector<char> blocked(b.w, 0);
    for (int s = 0; s < b.w && static_cast<int>(out.segments.size()) < target; ++s) {
        if (blocked[s])
            continue;
        out.segments.push_back(s);
        auto d = segment_distances(b, s);
        for (int t = 0; t < b.w; ++t)
            if (d[t] >= 0 && d[t] < 2 * k)
                blocked[t] = 1;
    }
    out.complete = static_cast<int>(out.segments.size()) >= target;
    return out;
}

std::vector<int> attractor(const BipartiteBase& b, const std::vector<int>& x)
{
    auto xs = sorted_unique(x, b.w);
    std::vector<char> in(b.w, 0);
    for (int s : xs)
        in[s] = 1;
    std::vector<int> out = xs;
    for (const auto& c : b.constraints) {
        int outside = !in[c[0]] + !in[c[1]] + !in[c[2]];
        if (outside <= 1)
            out.insert(out.end(), c.begin(), c.end());
    }
    return sorted_unique(out, b.w);
}

std::vector<int> closure(const BipartiteBase& b, const std::vector<int>& x)
{
    auto xs = sorted_unique(x, b.w);
    auto inc = incidence(b);
    std::vector<char> in(b.w, 0);
    std::vector<int> missing(b.constraints.size(), 3);
    std::vector<int> work;
    auto add = [&](int s) {
        if (!in[s]) {
            in[s] = 1;
            work.push_back(s);
        }
    };
    for (int s : xs)
        add(s);
    while (!work.empty()) {
        int s = work.back();
        work.pop_back();
        for (int ci : inc[s])
            if (--missing[ci] == 1)
                for (int t : b.constraints[ci])
                    add(t);
    }
    std::vector<int> out;
    for (int s = 0; s < b.w; ++s)
        if (in[s])
            out.push_back(s);
    return out;
}

bool is_closed(const BipartiteBase& b, const std::vector<int>& x)
{
    return attractor(b, x) == sorted_unique(x, b.w);
}

std::vector<std::vector<int>> components(const BipartiteBase& b, const std::vector<int>& x)
{
    auto xs = sorted_unique(x, b.w);
    std::vector<int> parent(b.w);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int a) {
        while (parent[a] != a)
            a = parent[a] = parent[parent[a]];
        return a;
    };
    std::vector<char> in(b.w, 0);
    for (int s : xs)
        in[s] = 1;
    for (const auto& c : b.constraints)
        if (in[c[0]] && in[c[1]] && in[c[2]]) {
            parent[find(c[1])] = find(c[0]);
            parent[find(c[2])] = find(c[0]);
        }
    std::vector<std::vector<int>> groups;
    std::vector<int> slot(b.w, -1);
    for (int s : xs) {
        int r = find(s);
        if (slot[r] < 0) {
            slot[r] = static_cast<int>(groups.size());
            groups.emplace_back();
        }
        groups[slot[r]].push_back(s);
    }
    return groups;
}

Multipede build_multipede(const BipartiteBase& b)
{
    Multipede m;
    m.base = b;
    RelStructure& s = m.structure;
    s.n = 2 * b.w;
    Relation r{3, {}};
    for (const auto& c : b.constraints)
        for (int i1 = 0; i1 < 2; ++i1)
            for (int i2 = 0; i2 < 2; ++i2)
                r.tuples.push_back({foot(c[0], i1), foot(c[1], i2), foot(c[2], i1 ^ i2)});
    s.relations["R"] = std::move(r);
    for (int w = 0; w < b.w; ++w)
        s.colors.push_back({foot(w, 0), foot(w, 1)});
    s.normalize();
    return m;
}

RelStructure feet_induced(const Multipede& m, const std::vector<int>& x)
{
    std::vector<Vertex> feet;
    for (int s : sorted_unique(x, m.base.w)) {
        feet.push_back(foot(s, 0));
        feet.push_back(foot(s, 1));
    }
    return induced(m.structure, feet);
}

std::pair<BipartiteBase, SampleMeta> sample_verified(int n, double epsilon, std::uint64_t seed, bool require_odd,
                                                     int meager_k, int max_tries)
{
    MeagerLimits lim;
    lim.max_segments = n;
    for (int attempt = 0; attempt < max_tries; ++attempt) {
        std::uint64_t s = attempt == 0 ? seed : splitmix(seed + static_cast<std::uint64_t>(attempt));
        auto b = sample_bipartite(n, epsilon, s);
        if (require_odd && !is_odd(b))
            continue;
        if (meager_k > 0 && !is_k_meager(b, meager_k, lim))
            continue;
        return {b, SampleMeta{n, epsilon, seed, attempt}};
    }
    throw Error(ErrorKind::BudgetExceeded, "no sampled base passed the checks");
}

nlohmann::ordered_json base_to_json(const BipartiteBase& b)
{
    RelStructure s;
    s.n = b.w;
    Relation c{3, {}};
    for (const auto& t : b.constraints)
        c.tuples.push_back({t[0], t[1], t[2]});
    s.relations["C"] = std::move(c);
    for (int w = 0; w < b.w; ++w)
        s.colors.push_back({w});
    return to_json(s);
}

BipartiteBase base_from_json(const nlohmann::json& j)
{
    auto s = structure_from_json(j);
    std::vector<std::array<int, 3>> cs;
    auto it = s.relations.find("C");
    if (it != s.relations.end()) {
        if (it->second.arity != 3)
            throw Error(ErrorKind::InvalidStructure, "constraint relation must be ternary");
        for (const auto& t : it->second.tuples)
            cs.push_back({t[0], t[1], t[2]});
    }
    return make_base(s.n, std::move(cs));
}

}  // namespace wscfi
