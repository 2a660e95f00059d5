#include "wscfi/gluing.hpp"

#include <algorithm>
#include <set>

namespace wscfi {

Gluing glue(const Multipede& m, const std::vector<int>& x, const CfiGraph& c)
{
    if (c.variant != CfiVariant::SinglePair)
        throw Error(ErrorKind::WrongVariant, "gluing needs the single-pair CFI variant");
    auto edges = graph_edges(c.base);
    if (x.size() != edges.size())
        throw Error(ErrorKind::SizeMismatch, "need one segment per base edge");
    std::set<int> distinct(x.begin(), x.end());
    if (distinct.size() != x.size() || *distinct.begin() < 0 || *distinct.rbegin() >= m.base.w)
        throw Error(ErrorKind::SizeMismatch, "segments must be distinct and in range");

    Gluing g;
    g.base = m.base;
    g.x = x;
    g.cfi_base = c.base;
    const int feet = 2 * m.base.w;
    g.from_cfi.assign(c.graph.n, -1);
    int next = feet;
    for (int v = 0; v < c.graph.n; ++v) {
        const Origin& o = c.origin[v];
        if (o.kind == Origin::Kind::Gadget)
            g.from_cfi[v] = next++;
        else
            g.from_cfi[v] = foot(x[edge_index(c.base, o.u, o.v)], o.bits);
    }
    RelStructure& s = g.structure;
    s.n = next;
    g.cfi_origin.assign(s.n, std::nullopt);
    for (int v = 0; v < c.graph.n; ++v)
        g.cfi_origin[g.from_cfi[v]] = c.origin[v];

    Relation r = m.structure.relations.at("R");
    for (const auto& e : c.graph.relations.at("E").tuples)
        r.tuples.push_back({g.from_cfi[e[0]], g.from_cfi[e[1]], g.from_cfi[e[1]]});
    s.relations["R"] = std::move(r);
    s.colors = m.structure.colors;
    for (const auto& cls : c.graph.colors) {
        std::vector<Vertex> gad;
        for (Vertex v : cls)
            if (c.origin[v].kind == Origin::Kind::Gadget)
                gad.push_back(g.from_cfi[v]);
        if (!gad.empty())
            s.colors.push_back(std::move(gad));
    }
    s.normalize();
    s.validate();
    return g;
}

ColoredGraph extract_cfi(const RelStructure& s)
{
    std::set<std::pair<Vertex, Vertex>> edges;
    std::vector<char> used(s.n, 0);
    for (const auto& [name, rel] : s.relations) {
        if (rel.arity != 3)
            continue;
        for (const auto& t : rel.tuples)
            if (t[1] == t[2] && t[0] != t[1]) {
                edges.insert({std::min(t[0], t[1]), std::max(t[0], t[1])});
                used[t[0]] = used[t[1]] = 1;
            }
    }
    std::vector<Vertex> vs, pos(s.n, -1);
    for (int v = 0; v < s.n; ++v)
        if (used[v]) {
            pos[v] = static_cast<Vertex>(vs.size());
            vs.push_back(v);
        }
    std::vector<std::pair<Vertex, Vertex>> e;
    for (auto [a, b] : edges)
        e.emplace_back(pos[a], pos[b]);
    std::vector<std::vector<Vertex>> colors;
    for (const auto& cls : s.colors) {
        std::vector<Vertex> k;
        for (Vertex v : cls)
            if (used[v])
                k.push_back(pos[v]);
        if (!k.empty())
            colors.push_back(std::move(k));
    }
    if (vs.empty())
        return RelStructure{0, {{"E", Relation{2, {}}}}, {}, {}};
    return make_graph(static_cast<int>(vs.size()), e, colors);
}

std::vector<int> FixedSegments::all() const
{
    std::vector<int> u = directly;
    u.insert(u.end(), closure.begin(), closure.end());
    u.insert(u.end(), gadget.begin(), gadget.end());
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    return u;
}

FixedSegments classify_fixed_segments(const Gluing& g, const std::vector<Vertex>& pins)
{
    FixedSegments out;
    const int feet = 2 * g.base.w;
    std::set<int> gadget_bases;
    for (Vertex p : pins) {
        if (p < 0 || p >= g.structure.n)
            throw Error(ErrorKind::InvalidStructure, "pin outside the universe");
        if (p < feet)
            out.directly.push_back(p / 2);
        else
            gadget_bases.insert(g.cfi_origin[p]->u);
    }
    std::sort(out.directly.begin(), out.directly.end());
    out.directly.erase(std::unique(out.directly.begin(), out.directly.end()), out.directly.end());
    for (int s : closure(g.base, out.directly))
        if (!std::binary_search(out.directly.begin(), out.directly.end(), s))
            out.closure.push_back(s);
    auto edges = graph_edges(g.cfi_base);
    for (std::size_t i = 0; i < edges.size(); ++i)
        if (gadget_bases.count(edges[i].first) || gadget_bases.count(edges[i].second))
            out.gadget.push_back(g.x[i]);
    std::sort(out.gadget.begin(), out.gadget.end());
    return out;
}

nlohmann::ordered_json gluing_to_json(const Gluing& g)
{
    auto j = to_json(g.structure);
    j["gluing"] = {{"segments", g.x}, {"cfi_base", to_json(g.cfi_base)}, {"bipartite", base_to_json(g.base)}};
    return j;
}

}  // namespace wscfi
