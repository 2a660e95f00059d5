#include "wscfi/joins.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace wscfi {

namespace {

JoinedGraph join_impl(const std::vector<ColoredGraph>& gs, bool require_connected)
{
    if (gs.empty())
        throw Error(ErrorKind::InvalidStructure, "color class join of no graphs");
    const std::size_t c = gs[0].colors.size();
    for (const auto& g : gs) {
        if (!is_colored_graph(g))
            throw Error(ErrorKind::NonGraphInput, "join part is not a colored graph");
        if (g.colors.size() != c)
            throw Error(ErrorKind::ClassCountMismatch, "join parts have different numbers of color classes");
        for (const auto& cls : g.colors)
            if (cls.empty())
                throw Error(ErrorKind::ClassCountMismatch, "join part has an empty color class");
        if (require_connected && !is_connected(g))
            throw Error(ErrorKind::DisconnectedPart, "join part is disconnected");
    }

    JoinedGraph j;
    std::vector<std::pair<Vertex, Vertex>> edges;
    std::vector<std::vector<Vertex>> colors(2 * c);
    int off = 0;
    for (std::size_t p = 0; p < gs.size(); ++p) {
        const auto& g = gs[p];
        Part part;
        part.index = static_cast<int>(p);
        part.source = static_cast<int>(p);
        for (int v = 0; v < g.n; ++v)
            part.vertices.push_back(off + v);
        for (auto [u, v] : graph_edges(g))
            edges.emplace_back(off + u, off + v);
        for (std::size_t i = 0; i < c; ++i)
            for (Vertex v : g.colors[i])
                colors[i].push_back(off + v);
        j.parts.push_back(std::move(part));
        off += g.n;
    }
    for (std::size_t i = 0; i < c; ++i) {
        Vertex u = off + static_cast<int>(i);
        j.join_vertices.push_back(u);
        colors[c + i] = {u};
        for (Vertex v : colors[i])
            edges.emplace_back(v, u);
    }
    j.graph = make_graph(off + static_cast<int>(c), edges, colors);
    return j;
}

}  // namespace

JoinedGraph color_class_join(const std::vector<ColoredGraph>& gs) { return join_impl(gs, true); }

JoinedGraph cfi_omega(const ColoredGraph& base, int g, int k)
{
    if (k < 1)
        throw Error(ErrorKind::InvalidStructure, "multiplicity must be at least 1");
    if (g != 0 && g != 1)
        throw Error(ErrorKind::InvalidStructure, "twist class must be 0 or 1");
    std::vector<ColoredGraph> gs;
    for (int p : {0, g, 1}) {
        auto c = build_cfi(base, parity_twist(base, p), CfiVariant::TwoPair).graph;
        for (int i = 0; i < k; ++i)
            gs.push_back(c);
    }
    // CFI graphs over cycles fall apart into two components, so connectivity is not required here
    return join_impl(gs, false);
}

std::vector<int> part_labels(const JoinedGraph& j)
{
    std::vector<int> lab(j.graph.n, -1);
    for (const auto& p : j.parts)
        for (Vertex v : p.vertices)
            lab[v] = p.index;
    return lab;
}

std::vector<int> cfi_part_labels(const CfiGraph& c, const std::vector<int>& base_labels)
{
    std::vector<int> lab(c.graph.n, -1);
    for (int x = 0; x < c.graph.n; ++x) {
        const Origin& o = c.origin[x];
        if (o.kind == Origin::Kind::Gadget)
            lab[x] = base_labels.at(o.u);
        else if (base_labels.at(o.u) == base_labels.at(o.v))
            lab[x] = base_labels[o.u];
    }
    return lab;
}

std::vector<Vertex> pebbled_part_vertices(const std::vector<int>& labels, const std::vector<Vertex>& pins)
{
    std::set<int> pebbled;
    for (Vertex p : pins) {
        if (p < 0 || p >= static_cast<int>(labels.size()))
            throw Error(ErrorKind::InvalidStructure, "pin outside the universe");
        if (labels[p] >= 0)
            pebbled.insert(labels[p]);
    }
    std::vector<Vertex> out;
    for (int v = 0; v < static_cast<int>(labels.size()); ++v)
        if (labels[v] < 0 || pebbled.count(labels[v]))
            out.push_back(v);
    return out;
}

PebbledPartIndividualizations::PebbledPartIndividualizations(const std::vector<int>& labels,
                                                             const std::vector<Vertex>& pins, std::uint64_t limit,
                                                             std::uint64_t seed)
    : set_(pebbled_part_vertices(labels, pins))
{
    if (limit == 0)
        return;
    // |set|! capped just above limit
    std::uint64_t count = 1;
    for (std::size_t i = 2; i <= set_.size() && count <= limit; ++i)
        count *= i;
    if (count <= limit)
        return;
    sampled_ = true;
    std::mt19937_64 rng(seed);
    std::set<std::vector<Vertex>> pick;
    while (pick.size() < limit) {
        auto v = set_;
        std::shuffle(v.begin(), v.end(), rng);
        pick.insert(std::move(v));
    }
    sample_.assign(pick.begin(), pick.end());
}

std::optional<std::vector<Vertex>> PebbledPartIndividualizations::next()
{
    if (sampled_) {
        if (pos_ >= sample_.size())
            return std::nullopt;
        return sample_[pos_++];
    }
    if (done_)
        return std::nullopt;
    if (!started_) {
        started_ = true;
        cur_ = set_;
        return cur_;
    }
    if (!std::next_permutation(cur_.begin(), cur_.end())) {
        done_ = true;
        return std::nullopt;
    }
    return cur_;
}

nlohmann::ordered_json joined_to_json(const JoinedGraph& j)
{
    auto out = to_json(j.graph);
    nlohmann::ordered_json parts = nlohmann::ordered_json::array();
    for (const auto& p : j.parts)
        parts.push_back({{"index", p.index}, {"source", p.source}, {"vertices", p.vertices}});
    out["join"] = {{"parts", parts}, {"join_vertices", j.join_vertices}};
    return out;
}

JoinedGraph joined_from_json(const nlohmann::json& j)
{
    JoinedGraph out;
    out.graph = structure_from_json(j);
    try {
        const auto& jj = j.at("join");
        for (const auto& p : jj.at("parts"))
            out.parts.push_back(
                {p.at("index").get<int>(), p.at("vertices").get<std::vector<Vertex>>(), p.at("source").get<int>()});
        out.join_vertices = jj.at("join_vertices").get<std::vector<Vertex>>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidStructure, std::string("malformed join metadata: ") + e.what());
    }
    return out;
}

}  // namespace wscfi
