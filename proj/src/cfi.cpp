#include "wscfi/cfi.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <map>
#include <numeric>
#include <sstream>

namespace wscfi {

namespace {

constexpr int kMaxDegree = 20;

std::vector<int> even_vectors(int d)
{
    std::vector<int> out;
    for (int b = 0; b < (1 << d); ++b)
        if (std::popcount(static_cast<unsigned>(b)) % 2 == 0)
            out.push_back(b);
    return out;
}

int bit(int b, int i) { return (b >> i) & 1; }

void add_edge(Relation& e, Vertex a, Vertex b)
{
    e.tuples.push_back({a, b});
    e.tuples.push_back({b, a});
}

std::vector<std::vector<Vertex>> classes_from_keys(const std::vector<std::array<int, 3>>& key)
{
    std::vector<std::array<int, 3>> uniq = key;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    std::vector<std::vector<Vertex>> classes(uniq.size());
    for (std::size_t v = 0; v < key.size(); ++v) {
        auto idx = std::lower_bound(uniq.begin(), uniq.end(), key[v]) - uniq.begin();
        classes[idx].push_back(static_cast<Vertex>(v));
    }
    return classes;
}

struct Lookup {
    std::vector<std::vector<Vertex>> gadget;               // [u][bits]
    std::map<std::array<int, 3>, Vertex> edge;             // (u,v,j)
};

Lookup make_lookup(const CfiGraph& c)
{
    Lookup L;
    auto adj = adjacency(c.base);
    L.gadget.resize(c.base.n);
    for (int u = 0; u < c.base.n; ++u)
        L.gadget[u].assign(std::size_t{1} << adj[u].size(), -1);
    for (std::size_t x = 0; x < c.origin.size(); ++x) {
        const Origin& o = c.origin[x];
        if (o.kind == Origin::Kind::Gadget)
            L.gadget[o.u][o.bits] = static_cast<Vertex>(x);
        else
            L.edge[{o.u, o.v, o.bits}] = static_cast<Vertex>(x);
    }
    return L;
}

}  // namespace

const char* variant_name(CfiVariant v)
{
    switch (v) {
    case CfiVariant::TwoPair: return "two-pair";
    case CfiVariant::Relational: return "relational";
    case CfiVariant::SinglePair: return "single-pair";
    }
    return "two-pair";
}

CfiVariant parse_variant(const std::string& s)
{
    if (s == "two-pair")
        return CfiVariant::TwoPair;
    if (s == "relational" || s == "relational-gadget")
        return CfiVariant::Relational;
    if (s == "single-pair")
        return CfiVariant::SinglePair;
    throw Error(ErrorKind::Usage, "unknown CFI variant '" + s + "'");
}

RelStructure build_gadget(int d, CfiVariant variant)
{
    if (d < 1)
        throw Error(ErrorKind::InvalidStructure, "gadget degree must be at least 1");
    if (d > kMaxDegree || (variant == CfiVariant::Relational && d > 8))
        throw Error(ErrorKind::ArityBoundExceeded, "gadget degree " + std::to_string(d) + " too large");
    RelStructure s;
    for (int i = 0; i < d; ++i)
        s.colors.push_back({2 * i, 2 * i + 1});
    auto evens = even_vectors(d);
    if (variant == CfiVariant::Relational) {
        s.n = 2 * d;
        Relation r{d, {}};
        for (int b : evens) {
            Tuple t(d);
            for (int i = 0; i < d; ++i)
                t[i] = 2 * i + bit(b, i);
            r.tuples.push_back(t);
        }
        s.relations["R"] = r;
    } else {
        s.n = 2 * d + static_cast<int>(evens.size());
        Relation e{2, {}};
        std::vector<Vertex> gadgets;
        for (std::size_t k = 0; k < evens.size(); ++k) {
            Vertex g = 2 * d + static_cast<Vertex>(k);
            gadgets.push_back(g);
            for (int i = 0; i < d; ++i)
                add_edge(e, 2 * i + bit(evens[k], i), g);
        }
        s.relations["E"] = e;
        s.colors.push_back(gadgets);
    }
    s.normalize();
    return s;
}

int parity(const Twist& f)
{
    int p = 0;
    for (auto x : f)
        p ^= (x & 1);
    return p;
}

int edge_index(const ColoredGraph& base, Vertex u, Vertex v)
{
    if (u > v)
        std::swap(u, v);
    auto edges = graph_edges(base);
    auto it = std::lower_bound(edges.begin(), edges.end(), std::make_pair(u, v));
    if (it == edges.end() || *it != std::make_pair(u, v))
        return -1;
    return static_cast<int>(it - edges.begin());
}

Twist parity_twist(const ColoredGraph& base, int p)
{
    Twist f(graph_edges(base).size(), 0);
    if ((p & 1) && !f.empty())
        f[0] = 1;
    return f;
}

CfiGraph build_cfi(const ColoredGraph& base, const Twist& f, CfiVariant variant, bool gadgets_last)
{
    if (!is_colored_graph(base))
        throw Error(ErrorKind::InvalidStructure, "CFI base must be a colored graph");
    if (!is_connected(base))
        throw Error(ErrorKind::DisconnectedBase, "CFI base graph is disconnected");
    auto edges = graph_edges(base);
    if (f.size() != edges.size())
        throw Error(ErrorKind::SizeMismatch, "twist has " + std::to_string(f.size()) + " entries, base has " +
                                                 std::to_string(edges.size()) + " edges");
    auto adj = adjacency(base);
    for (int u = 0; u < base.n; ++u) {
        if (adj[u].empty())
            throw Error(ErrorKind::InvalidStructure, "base vertex of degree 0");
        if (static_cast<int>(adj[u].size()) > kMaxDegree ||
            (variant == CfiVariant::Relational && adj[u].size() > 8))
            throw Error(ErrorKind::ArityBoundExceeded, "base degree too large for gadget construction");
    }
    auto col = base.color_of();
    std::vector<std::vector<int>> nidx(base.n, std::vector<int>(base.n, -1));
    for (int u = 0; u < base.n; ++u)
        for (std::size_t i = 0; i < adj[u].size(); ++i)
            nidx[u][adj[u][i]] = static_cast<int>(i);
    std::vector<std::vector<int>> eidx(base.n, std::vector<int>(base.n, -1));
    for (std::size_t e = 0; e < edges.size(); ++e) {
        eidx[edges[e].first][edges[e].second] = static_cast<int>(e);
        eidx[edges[e].second][edges[e].first] = static_cast<int>(e);
    }

    CfiGraph c;
    c.base = base;
    c.variant = variant;
    c.twist = f;
    for (auto& x : c.twist)
        x &= 1;
    c.gadgets_last = gadgets_last;
    std::vector<std::array<int, 3>> key;
    Relation E{2, {}};
    std::map<int, Relation> rel;  // relational variant, by arity

    auto new_vertex = [&](Origin o, std::array<int, 3> k) {
        c.origin.push_back(o);
        key.push_back(k);
        return static_cast<Vertex>(c.origin.size() - 1);
    };
    auto gadget_key = [&](int u) { return gadgets_last ? std::array<int, 3>{1, col[u], 0} : std::array<int, 3>{col[u], 0, 0}; };
    auto edge_key = [&](int a, int b) { return gadgets_last ? std::array<int, 3>{0, a, b} : std::array<int, 3>{a, 1, b}; };

    if (variant == CfiVariant::SinglePair) {
        for (auto [u, v] : edges)
            for (int j = 0; j < 2; ++j)
                new_vertex({Origin::Kind::UndirectedEdge, u, v, j},
                           edge_key(std::min(col[u], col[v]), std::max(col[u], col[v])));
        for (int u = 0; u < base.n; ++u) {
            int d = static_cast<int>(adj[u].size());
            for (int b : even_vectors(d)) {
                Vertex g = new_vertex({Origin::Kind::Gadget, u, -1, b}, gadget_key(u));
                for (int i = 0; i < d; ++i) {
                    Vertex v = adj[u][i];
                    int e = eidx[u][v];
                    int j = bit(b, i) ^ (u > v ? c.twist[e] : 0);
                    add_edge(E, g, 2 * e + j);
                }
            }
        }
    } else {
        std::vector<Vertex> pair_off(base.n);
        for (int u = 0; u < base.n; ++u) {
            int d = static_cast<int>(adj[u].size());
            pair_off[u] = static_cast<Vertex>(c.origin.size());
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < 2; ++j)
                    new_vertex({Origin::Kind::DirectedEdge, u, adj[u][i], j}, edge_key(col[u], col[adj[u][i]]));
            for (int b : even_vectors(d)) {
                if (variant == CfiVariant::TwoPair) {
                    Vertex g = new_vertex({Origin::Kind::Gadget, u, -1, b}, gadget_key(u));
                    for (int i = 0; i < d; ++i)
                        add_edge(E, pair_off[u] + 2 * i + bit(b, i), g);
                } else {
                    Tuple t(d);
                    for (int i = 0; i < d; ++i)
                        t[i] = pair_off[u] + 2 * i + bit(b, i);
                    rel[d].arity = d;
                    rel[d].tuples.push_back(t);
                }
            }
        }
        for (std::size_t e = 0; e < edges.size(); ++e) {
            auto [u, v] = edges[e];
            for (int k = 0; k < 2; ++k) {
                int l = k ^ c.twist[e];
                add_edge(E, pair_off[u] + 2 * nidx[u][v] + k, pair_off[v] + 2 * nidx[v][u] + l);
            }
        }
    }
    c.graph.n = static_cast<int>(c.origin.size());
    c.graph.relations["E"] = E;
    for (auto& [d, r] : rel)
        c.graph.relations["R" + std::to_string(d)] = r;
    c.graph.colors = classes_from_keys(key);
    c.graph.normalize();
    return c;
}

Twist parse_twist(const std::string& spec, const ColoredGraph& base)
{
    auto edges = graph_edges(base);
    Twist f(edges.size(), 0);
    if (spec.empty() || spec == "all-zero")
        return f;
    if (spec.find('-') != std::string::npos) {
        std::stringstream ss(spec);
        std::string item;
        while (std::getline(ss, item, ',')) {
            auto dash = item.find('-');
            if (dash == std::string::npos)
                throw Error(ErrorKind::Usage, "bad edge '" + item + "' in twist edge list");
            int u = std::stoi(item.substr(0, dash)), v = std::stoi(item.substr(dash + 1));
            int e = edge_index(base, u, v);
            if (e < 0)
                throw Error(ErrorKind::Usage, "twist edge " + item + " is not a base edge");
            f[e] ^= 1;
        }
        return f;
    }
    std::string hex = spec;
    if (hex.rfind("0x", 0) == 0 || hex.rfind("0X", 0) == 0)
        hex = hex.substr(2);
    for (std::size_t k = 0; k < hex.size(); ++k) {
        char ch = hex[hex.size() - 1 - k];
        int val;
        if (ch >= '0' && ch <= '9')
            val = ch - '0';
        else if (ch >= 'a' && ch <= 'f')
            val = ch - 'a' + 10;
        else if (ch >= 'A' && ch <= 'F')
            val = ch - 'A' + 10;
        else
            throw Error(ErrorKind::Usage, "bad hex digit in twist '" + spec + "'");
        for (int b = 0; b < 4; ++b)
            if ((val >> b) & 1) {
                std::size_t e = 4 * k + b;
                if (e >= f.size())
                    throw Error(ErrorKind::Usage, "twist sets bit beyond the edge count");
                f[e] = 1;
            }
    }
    return f;
}

std::string twist_bits(const Twist& f)
{
    std::string s;
    for (auto x : f)
        s.push_back(x ? '1' : '0');
    return s;
}

Vertex edge_vertex(const CfiGraph& c, Vertex u, Vertex v, int j)
{
    if (c.variant == CfiVariant::SinglePair && u > v)
        std::swap(u, v);
    for (std::size_t x = 0; x < c.origin.size(); ++x) {
        const Origin& o = c.origin[x];
        if (o.kind != Origin::Kind::Gadget && o.u == u && o.v == v && o.bits == j)
            return static_cast<Vertex>(x);
    }
    return -1;
}

Vertex gadget_vertex(const CfiGraph& c, Vertex u, int bits)
{
    for (std::size_t x = 0; x < c.origin.size(); ++x) {
        const Origin& o = c.origin[x];
        if (o.kind == Origin::Kind::Gadget && o.u == u && o.bits == bits)
            return static_cast<Vertex>(x);
    }
    return -1;
}

std::pair<CfiGraph, Permutation> path_twist_iso(const CfiGraph& c, const std::vector<Vertex>& path)
{
    const ColoredGraph& base = c.base;
    if (path.size() < 2)
        throw Error(ErrorKind::NotAPath, "path needs at least two vertices");
    for (Vertex x : path)
        if (x < 0 || x >= base.n)
            throw Error(ErrorKind::NotAPath, "path vertex out of range");
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
        if (edge_index(base, path[i], path[i + 1]) < 0)
            throw Error(ErrorKind::NotAPath, "consecutive path vertices are not adjacent");
    bool closed = path.size() >= 4 && path.front() == path.back();
    std::vector<Vertex> distinct(path.begin(), closed ? path.end() - 1 : path.end());
    {
        auto sorted = distinct;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw Error(ErrorKind::NotAPath, "path repeats a vertex");
    }

    // flips[x] = set of neighbors y such that x flips its side of edge {x,y}
    std::vector<std::vector<Vertex>> flips(base.n);
    std::size_t m = distinct.size();
    if (closed) {
        for (std::size_t i = 0; i < m; ++i) {
            flips[distinct[i]].push_back(distinct[(i + m - 1) % m]);
            flips[distinct[i]].push_back(distinct[(i + 1) % m]);
        }
    } else {
        for (std::size_t i = 1; i + 1 < m; ++i) {
            flips[distinct[i]].push_back(distinct[i - 1]);
            flips[distinct[i]].push_back(distinct[i + 1]);
        }
    }
    auto flipped = [&](Vertex x, Vertex y) {
        return std::find(flips[x].begin(), flips[x].end(), y) != flips[x].end();
    };

    auto edges = graph_edges(base);
    Twist g = c.twist;
    for (std::size_t e = 0; e < edges.size(); ++e)
        g[e] ^= static_cast<std::uint8_t>(flipped(edges[e].first, edges[e].second) ^ flipped(edges[e].second, edges[e].first));

    CfiGraph out = build_cfi(base, g, c.variant, c.gadgets_last);
    Lookup L = make_lookup(out);
    auto adj = adjacency(base);
    Permutation p(c.graph.n);
    for (int x = 0; x < c.graph.n; ++x) {
        const Origin& o = c.origin[x];
        switch (o.kind) {
        case Origin::Kind::Gadget: {
            int mask = 0;
            for (std::size_t i = 0; i < adj[o.u].size(); ++i)
                if (flipped(o.u, adj[o.u][i]))
                    mask |= 1 << i;
            p[x] = L.gadget[o.u][o.bits ^ mask];
            break;
        }
        case Origin::Kind::DirectedEdge:
            p[x] = L.edge.at({o.u, o.v, o.bits ^ (flipped(o.u, o.v) ? 1 : 0)});
            break;
        case Origin::Kind::UndirectedEdge:
            p[x] = L.edge.at({o.u, o.v, o.bits ^ (flipped(o.u, o.v) ? 1 : 0)});
            break;
        }
    }
    return {std::move(out), std::move(p)};
}

RecoveredBase recover_base(const ColoredGraph& g)
{
    if (!is_colored_graph(g))
        throw Error(ErrorKind::NotCfiShaped, "input is not a colored graph");
    int n = g.n;
    auto adj = adjacency(g);
    auto col = g.color_of();
    std::vector<char> gad(n, 0);
    for (int u = 0; u < n; ++u) {
        if (adj[u].empty())
            continue;
        bool ok = true;
        for (Vertex v : adj[u]) {
            int first = -1;
            bool two = false;
            for (Vertex w : adj[v]) {
                if (w == u)
                    continue;
                if (first < 0)
                    first = col[w];
                else if (col[w] != first) {
                    two = true;
                    break;
                }
            }
            if (!two) {
                ok = false;
                break;
            }
        }
        gad[u] = ok;
    }
    std::vector<std::vector<int>> dist(n, std::vector<int>(n, -1));
    for (int s = 0; s < n; ++s) {
        if (!gad[s])
            continue;
        std::vector<Vertex> q{s};
        dist[s][s] = 0;
        for (std::size_t h = 0; h < q.size(); ++h)
            for (Vertex w : adj[q[h]])
                if (dist[s][w] < 0) {
                    dist[s][w] = dist[s][q[h]] + 1;
                    q.push_back(w);
                }
    }
    std::vector<int> cls(n, -1);
    std::vector<std::vector<Vertex>> members;
    for (int u = 0; u < n; ++u) {
        if (!gad[u] || cls[u] >= 0)
            continue;
        cls[u] = static_cast<int>(members.size());
        members.push_back({u});
        for (int w = u + 1; w < n; ++w)
            if (gad[w] && (dist[u][w] == 2 || dist[u][w] == 4)) {
                if (cls[w] >= 0)
                    throw Error(ErrorKind::NotCfiShaped, "inconsistent gadget classes");
                cls[w] = cls[u];
                members.back().push_back(w);
            }
    }
    if (members.empty())
        throw Error(ErrorKind::NotCfiShaped, "no vertex satisfies the gadget-vertex predicate");
    int nb = static_cast<int>(members.size());
    for (const auto& m : members)
        for (Vertex a : m)
            for (Vertex b : m) {
                int d = dist[a][b];
                if (!(d == 0 || d == 2 || d == 4) || col[a] != col[b])
                    throw Error(ErrorKind::NotCfiShaped, "gadget class is not closed under distance 2/4");
            }
    std::vector<std::pair<Vertex, Vertex>> bedges;
    for (int x = 0; x < nb; ++x)
        for (int y = x + 1; y < nb; ++y) {
            int near = 0, far = 0;
            for (Vertex a : members[x])
                for (Vertex b : members[y]) {
                    int d = dist[a][b];
                    if (d == 3 || d == 5)
                        ++near;
                    else if (d >= 0 && d < 6)
                        throw Error(ErrorKind::NotCfiShaped, "unexpected gadget distance");
                    else
                        ++far;
                }
            if (near && far)
                throw Error(ErrorKind::NotCfiShaped, "gadget classes disagree on adjacency");
            if (near)
                bedges.emplace_back(x, y);
        }
    // base colors: order of the CFI color index, compacted
    std::vector<int> bcol(nb);
    for (int x = 0; x < nb; ++x)
        bcol[x] = col[members[x][0]];
    std::vector<int> used = bcol;
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());
    std::vector<std::vector<Vertex>> bclasses(used.size());
    for (int x = 0; x < nb; ++x)
        bclasses[std::lower_bound(used.begin(), used.end(), bcol[x]) - used.begin()].push_back(x);

    RecoveredBase out;
    out.base = make_graph(nb, bedges, bclasses);
    out.origin.resize(n);
    for (int u = 0; u < n; ++u) {
        if (gad[u]) {
            out.origin[u] = {Origin::Kind::Gadget, cls[u], -1, -1};
            continue;
        }
        int own = -1, other = -1, cross = 0;
        for (Vertex w : adj[u]) {
            if (gad[w]) {
                if (own >= 0 && own != cls[w])
                    throw Error(ErrorKind::NotCfiShaped, "edge vertex touches two gadgets");
                own = cls[w];
            } else {
                ++cross;
                for (Vertex z : adj[w])
                    if (gad[z])
                        other = cls[z];
            }
        }
        if (own < 0 || other < 0 || cross != 1)
            throw Error(ErrorKind::NotCfiShaped, "vertex " + std::to_string(u) + " is neither gadget nor edge vertex");
        out.origin[u] = {Origin::Kind::DirectedEdge, own, other, -1};
    }
    for (Vertex v : g.indiv) {
        const Origin& o = out.origin[v];
        if (o.kind != Origin::Kind::DirectedEdge)
            continue;
        std::pair<Vertex, Vertex> e{o.u, o.v};
        if (std::find(out.individualized.begin(), out.individualized.end(), e) == out.individualized.end())
            out.individualized.push_back(e);
    }
    return out;
}

namespace {

// Some cycle of base minus the removed edges, or empty.
std::vector<Vertex> find_cycle(const ColoredGraph& base, const std::vector<std::vector<char>>& removed)
{
    auto adj = adjacency(base);
    std::vector<int> parent(base.n, -2);
    for (int s = 0; s < base.n; ++s) {
        if (parent[s] != -2)
            continue;
        parent[s] = -1;
        std::vector<std::pair<Vertex, std::size_t>> stack{{s, 0}};
        std::vector<int> depth(base.n, 0);
        while (!stack.empty()) {
            auto& [x, i] = stack.back();
            if (i == adj[x].size()) {
                stack.pop_back();
                continue;
            }
            Vertex y = adj[x][i++];
            if (removed[x][y] || y == parent[x])
                continue;
            if (parent[y] == -2) {
                parent[y] = x;
                depth[y] = depth[x] + 1;
                stack.push_back({y, 0});
            } else if (depth[y] < depth[x]) {
                std::vector<Vertex> cyc;
                for (Vertex z = x; z != y; z = parent[z])
                    cyc.push_back(z);
                cyc.push_back(y);
                return cyc;
            }
        }
    }
    return {};
}

}  // namespace

std::vector<Vertex> edge_pair_order(const std::vector<std::vector<Vertex>>& adj, const std::vector<Origin>& origin,
                                    const ColoredGraph& base, const std::vector<Vertex>& seed)
{
    auto badj = adjacency(base);
    int n = static_cast<int>(adj.size());
    auto cross_of = [&](Vertex x) {
        for (Vertex w : adj[x])
            if (origin[w].kind == Origin::Kind::DirectedEdge && origin[w].u == origin[x].v && origin[w].v == origin[x].u)
                return w;
        throw Error(ErrorKind::NotCfiShaped, "edge vertex without cross neighbor");
    };
    std::vector<std::vector<char>> ordered(base.n, std::vector<char>(base.n, 0));
    std::vector<char> in_r(n, 0);
    std::vector<Vertex> r;
    auto take = [&](Vertex x) {
        const Origin& o = origin[x];
        ordered[o.u][o.v] = ordered[o.v][o.u] = 1;
        Vertex y = cross_of(x);
        for (Vertex z : {x, y})
            if (!in_r[z]) {
                in_r[z] = 1;
                r.push_back(z);
            }
    };
    for (Vertex s : seed) {
        if (s < 0 || s >= n)
            throw Error(ErrorKind::InvalidStructure, "seed vertex out of range");
        const Origin& o = origin[s];
        if (o.kind == Origin::Kind::DirectedEdge) {
            if (!ordered[o.u][o.v])
                take(s);
        } else if (o.kind == Origin::Kind::Gadget) {
            for (Vertex w : adj[s])
                if (origin[w].kind == Origin::Kind::DirectedEdge && !ordered[origin[w].u][origin[w].v])
                    take(w);
        } else {
            throw Error(ErrorKind::WrongVariant, "edge-pair orders need the two-pair variant");
        }
    }
    auto cyc = find_cycle(base, ordered);
    if (!cyc.empty()) {
        std::string msg = "base cycle survives the seed:";
        for (Vertex v : cyc)
            msg += " " + std::to_string(v);
        throw Error(ErrorKind::CycleRemains, msg);
    }
    // Synchronous rounds. When both ends of an edge become determined in the same round
    // each side fixes only its own pair; taking one side's cross neighbour would break
    // invariance under automorphisms swapping the two ends.
    for (;;) {
        std::vector<std::pair<Vertex, Vertex>> found;  // (x, derived vertex)
        std::vector<std::vector<char>> derives(base.n, std::vector<char>(base.n, 0));
        for (int x = 0; x < base.n; ++x) {
            int open = -1, cnt = 0;
            for (Vertex y : badj[x])
                if (!ordered[x][y]) {
                    ++cnt;
                    open = y;
                }
            if (cnt != 1)
                continue;
            // the gadget vertex of x adjacent to every ordered representative
            Vertex pick = -1;
            for (int g = 0; g < n && pick < 0; ++g) {
                if (origin[g].kind != Origin::Kind::Gadget || origin[g].u != x)
                    continue;
                bool all = true;
                for (Vertex w : adj[g])
                    if (origin[w].v != open && !in_r[w]) {
                        all = false;
                        break;
                    }
                if (all)
                    pick = g;
            }
            if (pick < 0)
                throw Error(ErrorKind::NotCfiShaped, "no gadget vertex matches the ordered pairs");
            for (Vertex w : adj[pick])
                if (origin[w].v == open) {
                    found.emplace_back(x, w);
                    derives[x][open] = 1;
                }
        }
        if (found.empty())
            break;
        for (auto [x, w] : found) {
            Vertex y = origin[w].v;
            if (derives[y][x]) {
                ordered[x][y] = ordered[y][x] = 1;
                if (!in_r[w]) {
                    in_r[w] = 1;
                    r.push_back(w);
                }
            } else {
                take(w);
            }
        }
    }
    std::sort(r.begin(), r.end());
    return r;
}

std::vector<Vertex> edge_pair_order(const CfiGraph& c, const std::vector<Vertex>& seed)
{
    if (c.variant != CfiVariant::TwoPair)
        throw Error(ErrorKind::WrongVariant, "edge-pair orders need the two-pair variant");
    return edge_pair_order(adjacency(c.graph), c.origin, c.base, seed);
}

nlohmann::ordered_json cfi_to_json(const CfiGraph& c)
{
    auto j = to_json(c.graph);
    nlohmann::ordered_json meta;
    meta["variant"] = variant_name(c.variant);
    meta["gadgets_last"] = c.gadgets_last;
    meta["twist"] = twist_bits(c.twist);
    meta["base"] = to_json(c.base);
    nlohmann::ordered_json orig = nlohmann::ordered_json::array();
    for (const auto& o : c.origin) {
        const char* kind = o.kind == Origin::Kind::Gadget ? "g" : (o.kind == Origin::Kind::DirectedEdge ? "d" : "u");
        orig.push_back({kind, o.u, o.v, o.bits});
    }
    meta["origin"] = orig;
    j["cfi"] = meta;
    return j;
}

CfiGraph cfi_from_json(const nlohmann::json& j)
{
    if (!j.contains("cfi"))
        throw Error(ErrorKind::InvalidStructure, "structure carries no CFI metadata");
    const auto& meta = j.at("cfi");
    ColoredGraph base = structure_from_json(meta.at("base"));
    std::string bits = meta.at("twist").get<std::string>();
    Twist f;
    for (char ch : bits)
        f.push_back(ch == '1' ? 1 : 0);
    CfiGraph c = build_cfi(base, f, parse_variant(meta.at("variant").get<std::string>()),
                           meta.value("gadgets_last", false));
    RelStructure given = structure_from_json(j);
    auto stored_indiv = given.indiv;
    given.indiv.clear();
    if (!(given == c.graph))
        throw Error(ErrorKind::InvalidStructure, "CFI metadata does not reproduce the stored graph");
    c.graph.indiv = stored_indiv;
    return c;
}

}  // namespace wscfi
