#include "wscfi/structure.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

namespace wscfi {

const char* error_kind_name(ErrorKind k)
{
    switch (k) {
    case ErrorKind::SizeLimitExceeded: return "size-limit-exceeded";
    case ErrorKind::DuplicateVertex: return "duplicate-vertex";
    case ErrorKind::InvalidStructure: return "invalid-structure";
    case ErrorKind::ArityBoundExceeded: return "arity-bound-exceeded";
    case ErrorKind::DisconnectedBase: return "disconnected-base";
    case ErrorKind::NotAPath: return "not-a-path";
    case ErrorKind::NotCfiShaped: return "not-cfi-shaped";
    case ErrorKind::CycleRemains: return "cycle-remains";
    case ErrorKind::ClassCountMismatch: return "class-count-mismatch";
    case ErrorKind::DisconnectedPart: return "disconnected-part";
    case ErrorKind::BoundExceeded: return "bound-exceeded";
    case ErrorKind::SizeMismatch: return "size-mismatch";
    case ErrorKind::WrongVariant: return "wrong-variant";
    case ErrorKind::BudgetExceeded: return "budget-exceeded";
    case ErrorKind::KTooSmall: return "k-too-small";
    case ErrorKind::NonMonotoneStep: return "non-monotone-step";
    case ErrorKind::ArityMismatch: return "arity-mismatch";
    case ErrorKind::RejectedUnwitnessed: return "rejected-unwitnessed";
    case ErrorKind::NotProgressing: return "not-progressing";
    case ErrorKind::IoError: return "io-error";
    case ErrorKind::NonGraphInput: return "non-graph-input";
    case ErrorKind::StepFailure: return "step-failure";
    case ErrorKind::Usage: return "usage";
    }
    return "unknown";
}

Error::Error(ErrorKind kind, const std::string& msg)
    : std::runtime_error(std::string(error_kind_name(kind)) + ": " + msg), kind_(kind)
{
}

bool Relation::contains(const Tuple& t) const
{
    return std::binary_search(tuples.begin(), tuples.end(), t);
}

void Relation::normalize()
{
    std::sort(tuples.begin(), tuples.end());
    tuples.erase(std::unique(tuples.begin(), tuples.end()), tuples.end());
}

void RelStructure::normalize()
{
    for (auto& [name, r] : relations)
        r.normalize();
    for (auto& c : colors)
        std::sort(c.begin(), c.end());
}

void RelStructure::validate() const
{
    if (n < 0)
        throw Error(ErrorKind::InvalidStructure, "negative universe size");
    for (const auto& [name, r] : relations) {
        if (r.arity < 1)
            throw Error(ErrorKind::InvalidStructure, "relation " + name + " has arity < 1");
        for (const auto& t : r.tuples) {
            if (static_cast<int>(t.size()) != r.arity)
                throw Error(ErrorKind::InvalidStructure, "tuple of wrong arity in " + name);
            for (Vertex v : t)
                if (v < 0 || v >= n)
                    throw Error(ErrorKind::InvalidStructure, "tuple entry out of range in " + name);
        }
        if (!std::is_sorted(r.tuples.begin(), r.tuples.end()) ||
            std::adjacent_find(r.tuples.begin(), r.tuples.end()) != r.tuples.end())
            throw Error(ErrorKind::InvalidStructure, "relation " + name + " not normalized");
    }
    std::vector<int> seen(n, 0);
    for (const auto& c : colors)
        for (Vertex v : c) {
            if (v < 0 || v >= n)
                throw Error(ErrorKind::InvalidStructure, "color entry out of range");
            if (seen[v]++)
                throw Error(ErrorKind::InvalidStructure, "color classes overlap");
        }
    for (int v = 0; v < n; ++v)
        if (!seen[v])
            throw Error(ErrorKind::InvalidStructure, "color classes do not cover the universe");
    std::vector<int> in(n, 0);
    for (Vertex v : indiv) {
        if (v < 0 || v >= n)
            throw Error(ErrorKind::InvalidStructure, "individualized vertex out of range");
        if (in[v]++)
            throw Error(ErrorKind::DuplicateVertex, "vertex individualized twice");
    }
}

std::vector<int> RelStructure::color_of() const
{
    std::vector<int> c(n, -1);
    for (std::size_t i = 0; i < colors.size(); ++i)
        for (Vertex v : colors[i])
            c[v] = static_cast<int>(i);
    return c;
}

ColoredGraph make_graph(int n, const std::vector<std::pair<Vertex, Vertex>>& edges,
                        std::vector<std::vector<Vertex>> colors)
{
    ColoredGraph g;
    g.n = n;
    Relation e;
    e.arity = 2;
    for (auto [u, v] : edges) {
        if (u == v)
            throw Error(ErrorKind::InvalidStructure, "self-loop in graph");
        e.tuples.push_back({u, v});
        e.tuples.push_back({v, u});
    }
    g.relations["E"] = std::move(e);
    if (colors.empty()) {
        std::vector<Vertex> all(n);
        std::iota(all.begin(), all.end(), 0);
        if (n > 0)
            colors.push_back(all);
    }
    g.colors = std::move(colors);
    g.normalize();
    g.validate();
    return g;
}

bool is_colored_graph(const RelStructure& s)
{
    if (s.relations.size() != 1 || !s.relations.count("E"))
        return false;
    const Relation& e = s.relations.at("E");
    if (e.arity != 2)
        return false;
    for (const auto& t : e.tuples)
        if (t[0] == t[1] || !e.contains({t[1], t[0]}))
            return false;
    return true;
}

std::vector<std::pair<Vertex, Vertex>> graph_edges(const ColoredGraph& g)
{
    std::vector<std::pair<Vertex, Vertex>> out;
    auto it = g.relations.find("E");
    if (it == g.relations.end())
        return out;
    for (const auto& t : it->second.tuples)
        if (t[0] < t[1])
            out.emplace_back(t[0], t[1]);
    return out;
}

std::vector<std::vector<Vertex>> adjacency(const ColoredGraph& g)
{
    std::vector<std::vector<Vertex>> adj(g.n);
    auto it = g.relations.find("E");
    if (it != g.relations.end())
        for (const auto& t : it->second.tuples)
            adj[t[0]].push_back(t[1]);
    return adj;  // sorted because tuples are sorted
}

bool is_connected(const ColoredGraph& g)
{
    if (g.n == 0)
        return true;
    auto adj = adjacency(g);
    std::vector<char> seen(g.n, 0);
    std::vector<Vertex> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        Vertex v = stack.back();
        stack.pop_back();
        for (Vertex w : adj[v])
            if (!seen[w]) {
                seen[w] = 1;
                ++count;
                stack.push_back(w);
            }
    }
    return count == g.n;
}

Permutation identity_perm(int n)
{
    Permutation p(n);
    std::iota(p.begin(), p.end(), 0);
    return p;
}

bool is_permutation(const Permutation& p, int n)
{
    if (static_cast<int>(p.size()) != n)
        return false;
    std::vector<char> hit(n, 0);
    for (Vertex v : p) {
        if (v < 0 || v >= n || hit[v])
            return false;
        hit[v] = 1;
    }
    return true;
}

Permutation compose(const Permutation& outer, const Permutation& inner)
{
    Permutation r(inner.size());
    for (std::size_t i = 0; i < inner.size(); ++i)
        r[i] = outer[inner[i]];
    return r;
}

Permutation inverse(const Permutation& p)
{
    Permutation r(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        r[p[i]] = static_cast<Vertex>(i);
    return r;
}

RelStructure relabel(const RelStructure& s, const Permutation& p)
{
    if (!is_permutation(p, s.n))
        throw Error(ErrorKind::InvalidStructure, "relabeling is not a permutation");
    RelStructure t;
    t.n = s.n;
    for (const auto& [name, r] : s.relations) {
        Relation nr;
        nr.arity = r.arity;
        nr.tuples.reserve(r.tuples.size());
        for (const auto& tup : r.tuples) {
            Tuple x(tup.size());
            for (std::size_t i = 0; i < tup.size(); ++i)
                x[i] = p[tup[i]];
            nr.tuples.push_back(std::move(x));
        }
        t.relations[name] = std::move(nr);
    }
    for (const auto& c : s.colors) {
        std::vector<Vertex> nc;
        for (Vertex v : c)
            nc.push_back(p[v]);
        t.colors.push_back(std::move(nc));
    }
    for (Vertex v : s.indiv)
        t.indiv.push_back(p[v]);
    t.normalize();
    return t;
}

RelStructure individualize(const RelStructure& s, const std::vector<Vertex>& vs)
{
    RelStructure t = s;
    std::vector<char> in(s.n, 0);
    for (Vertex v : s.indiv)
        in[v] = 1;
    for (Vertex v : vs) {
        if (v < 0 || v >= s.n)
            throw Error(ErrorKind::InvalidStructure, "individualized vertex out of range");
        if (in[v])
            throw Error(ErrorKind::DuplicateVertex, "vertex " + std::to_string(v) + " already individualized");
        in[v] = 1;
        t.indiv.push_back(v);
    }
    return t;
}

RelStructure induced(const RelStructure& s, const std::vector<Vertex>& vs)
{
    std::vector<int> pos(s.n, -1);
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (pos[vs[i]] >= 0)
            throw Error(ErrorKind::DuplicateVertex, "vertex listed twice in induced()");
        pos[vs[i]] = static_cast<int>(i);
    }
    RelStructure t;
    t.n = static_cast<int>(vs.size());
    for (const auto& [name, r] : s.relations) {
        Relation nr;
        nr.arity = r.arity;
        for (const auto& tup : r.tuples) {
            Tuple x;
            bool inside = true;
            for (Vertex v : tup) {
                if (pos[v] < 0) {
                    inside = false;
                    break;
                }
                x.push_back(pos[v]);
            }
            if (inside)
                nr.tuples.push_back(std::move(x));
        }
        t.relations[name] = std::move(nr);
    }
    for (const auto& c : s.colors) {
        std::vector<Vertex> nc;
        for (Vertex v : c)
            if (pos[v] >= 0)
                nc.push_back(pos[v]);
        if (!nc.empty())
            t.colors.push_back(std::move(nc));
    }
    for (Vertex v : s.indiv)
        if (pos[v] >= 0)
            t.indiv.push_back(pos[v]);
    t.normalize();
    return t;
}

RelStructure compact_colors(RelStructure s)
{
    std::erase_if(s.colors, [](const auto& c) { return c.empty(); });
    return s;
}

bool is_isomorphism(const RelStructure& s, const RelStructure& t, const Permutation& p)
{
    if (s.n != t.n || !is_permutation(p, s.n))
        return false;
    if (s.colors.size() != t.colors.size() || s.indiv.size() != t.indiv.size())
        return false;
    if (s.relations.size() != t.relations.size())
        return false;
    for (std::size_t i = 0; i < s.indiv.size(); ++i)
        if (p[s.indiv[i]] != t.indiv[i])
            return false;
    auto ct = t.color_of();
    for (std::size_t i = 0; i < s.colors.size(); ++i) {
        if (s.colors[i].size() != t.colors[i].size())
            return false;
        for (Vertex v : s.colors[i])
            if (ct[p[v]] != static_cast<int>(i))
                return false;
    }
    for (const auto& [name, r] : s.relations) {
        auto it = t.relations.find(name);
        if (it == t.relations.end() || it->second.arity != r.arity ||
            it->second.tuples.size() != r.tuples.size())
            return false;
        Tuple x(r.arity);
        for (const auto& tup : r.tuples) {
            for (int i = 0; i < r.arity; ++i)
                x[i] = p[tup[i]];
            if (!it->second.contains(x))
                return false;
        }
    }
    return true;
}

bool is_automorphism(const RelStructure& s, const Permutation& p)
{
    return is_isomorphism(s, s, p);
}

nlohmann::ordered_json to_json(const RelStructure& s)
{
    RelStructure c = s;
    c.normalize();
    nlohmann::ordered_json j;
    j["n"] = c.n;
    nlohmann::ordered_json rels = nlohmann::ordered_json::object();
    for (const auto& [name, r] : c.relations) {
        nlohmann::ordered_json jr;
        jr["arity"] = r.arity;
        jr["tuples"] = r.tuples;
        rels[name] = jr;
    }
    j["relations"] = rels;
    j["colors"] = c.colors;
    j["indiv"] = c.indiv;
    return j;
}

RelStructure structure_from_json(const nlohmann::json& j)
{
    RelStructure s;
    try {
        s.n = j.at("n").get<int>();
        if (j.contains("relations"))
            for (const auto& [name, jr] : j.at("relations").items()) {
                Relation r;
                r.arity = jr.at("arity").get<int>();
                r.tuples = jr.at("tuples").get<std::vector<Tuple>>();
                s.relations[name] = std::move(r);
            }
        if (j.contains("colors"))
            s.colors = j.at("colors").get<std::vector<std::vector<Vertex>>>();
        if (j.contains("indiv"))
            s.indiv = j.at("indiv").get<std::vector<Vertex>>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidStructure, std::string("malformed structure JSON: ") + e.what());
    }
    if (s.colors.empty() && s.n > 0) {
        std::vector<Vertex> all(s.n);
        std::iota(all.begin(), all.end(), 0);
        s.colors.push_back(all);
    }
    s.normalize();
    s.validate();
    return s;
}

std::string dump_structure(const RelStructure& s)
{
    return to_json(s).dump() + "\n";
}

std::string read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::IoError, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorKind::IoError, "cannot write " + path);
    out << text;
    if (!out)
        throw Error(ErrorKind::IoError, "write failed for " + path);
}

RelStructure read_structure(const std::string& path)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::InvalidStructure, path + ": " + e.what());
    }
    return structure_from_json(j);
}

}  // namespace wscfi
