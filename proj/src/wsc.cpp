#include "wscfi/wsc.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <unordered_map>

#include "wscfi/cfi.hpp"

namespace wscfi {

const char* pick_name(PickPolicy p)
{
    switch (p) {
    case PickPolicy::LexLeast: return "least";
    case PickPolicy::LexGreatest: return "greatest";
    case PickPolicy::SeededRandom: return "random";
    }
    return "?";
}

PickPolicy parse_pick(const std::string& s)
{
    if (s == "least")
        return PickPolicy::LexLeast;
    if (s == "greatest")
        return PickPolicy::LexGreatest;
    if (s == "random")
        return PickPolicy::SeededRandom;
    throw Error(ErrorKind::Usage, "unknown pick policy: " + s);
}

const char* verdict_name(WscVerdict v)
{
    switch (v) {
    case WscVerdict::AcceptedTrue: return "accepted-true";
    case WscVerdict::AcceptedFalse: return "accepted-false";
    case WscVerdict::RejectedUnwitnessed: return "rejected-unwitnessed";
    }
    return "?";
}

RelStructure reduct(const RelStructure& s, const WscProgram& p)
{
    RelStructure r = s;
    if (p.relations) {
        r.relations.clear();
        for (const auto& name : *p.relations) {
            auto it = s.relations.find(name);
            if (it != s.relations.end())
                r.relations.insert(*it);
        }
    }
    if (!p.mentions_order)
        r.indiv.clear();
    if (!p.mentions_colors) {
        r.colors.clear();
        if (s.n > 0) {
            r.colors.emplace_back();
            for (int v = 0; v < s.n; ++v)
                r.colors[0].push_back(v);
        }
    }
    return r;
}

namespace {

void check_tuples(const TupleSet& ts, int arity, int n, const char* what)
{
    for (const auto& t : ts) {
        if (static_cast<int>(t.size()) != arity)
            throw Error(ErrorKind::ArityMismatch, std::string(what) + " returned a tuple of the wrong arity");
        for (Vertex v : t)
            if (v < 0 || v >= n)
                throw Error(ErrorKind::ArityMismatch, std::string(what) + " returned a vertex outside the universe");
    }
}

Tuple apply(const Permutation& p, const Tuple& t)
{
    Tuple out(t.size());
    for (std::size_t i = 0; i < t.size(); ++i)
        out[i] = p[t[i]];
    return out;
}

// nullopt unless the pairs form a permutation of the universe
std::optional<Permutation> as_permutation(const VertexMap& m, int n)
{
    Permutation p(n, -1);
    for (auto [a, b] : m) {
        if (a < 0 || a >= n || b < 0 || b >= n)
            return std::nullopt;
        if (p[a] >= 0 && p[a] != b)
            return std::nullopt;
        p[a] = b;
    }
    if (!is_permutation(p, n))
        return std::nullopt;
    return p;
}

bool preserves(const Permutation& p, const TupleSet& layer)
{
    for (const auto& t : layer)
        if (!layer.count(apply(p, t)))
            return false;
    return true;
}

}  // namespace

WscOutcome wsc_fixpoint(const RelStructure& s, const WscProgram& p, const WscOptions& opt)
{
    if (p.arity < 1 || p.choice_arity < 1)
        throw Error(ErrorKind::ArityMismatch, "stage and choice arities must be positive");
    const RelStructure red = reduct(s, p);
    const int n = s.n;
    std::mt19937_64 rng(opt.seed);
    std::vector<TupleSet> stages{TupleSet{}};
    WscOutcome out;
    for (;;) {
        const TupleSet& r = stages.back();
        WscRound round;
        round.choice = p.choice ? p.choice(red, r) : TupleSet{};
        check_tuples(round.choice, p.choice_arity, n, "choice");
        if (!round.choice.empty()) {
            switch (opt.pick) {
            case PickPolicy::LexLeast: round.chosen = *round.choice.begin(); break;
            case PickPolicy::LexGreatest: round.chosen = *round.choice.rbegin(); break;
            case PickPolicy::SeededRandom: {
                auto it = round.choice.begin();
                std::advance(it, static_cast<long>(rng() % round.choice.size()));
                round.chosen = *it;
                break;
            }
            }
        }
        TupleSet next = p.step(red, r, round.chosen);
        check_tuples(next, p.arity, n, "step");
        if (!std::includes(next.begin(), next.end(), r.begin(), r.end()))
            throw Error(ErrorKind::NonMonotoneStep, "stage shrank in round " + std::to_string(out.log.size() + 1));
        out.log.push_back(std::move(round));
        if (next == r)
            break;
        stages.push_back(std::move(next));
        if (static_cast<int>(out.log.size()) > opt.max_rounds)
            throw Error(ErrorKind::BudgetExceeded, "too many WSC rounds");
    }
    out.final_stage = stages.back();

    // Witnessing, for every round including the last one.
    std::vector<TupleSet> layers;  // stage differences; a map preserves all stages iff it preserves these
    bool ok = true;
    for (std::size_t i = 0; i < out.log.size(); ++i) {
        if (i > 0) {
            TupleSet d;
            std::set_difference(stages[i].begin(), stages[i].end(), stages[i - 1].begin(), stages[i - 1].end(),
                                std::inserter(d, d.end()));
            layers.push_back(std::move(d));
        }
        auto& round = out.log[i];
        if (!ok) {
            round.witnessed = false;
            continue;
        }
        const auto& t = round.choice;
        if (t.size() <= 1)
            continue;
        std::set<Permutation> maps;
        std::string bad;
        for (const auto& a : t)
            for (const auto& b : t) {
                if (a == b || !p.witness)
                    continue;
                for (const auto& m : p.witness(red, stages[i], out.final_stage, a, b)) {
                    auto perm = as_permutation(m, n);
                    if (!perm) {
                        bad = "witness is not a permutation";
                        continue;
                    }
                    if (*perm == identity_perm(n) || maps.count(*perm))
                        continue;
                    bool aut = is_automorphism(red, *perm);
                    for (std::size_t j = 0; aut && j < layers.size(); ++j)
                        aut = preserves(*perm, layers[j]);
                    if (!aut)
                        bad = "witness is not an automorphism of the structure with its stages";
                    else
                        maps.insert(*perm);
                }
            }
        round.maps = static_cast<int>(maps.size());
        if (bad.empty())
            for (const auto& a : t) {
                for (const auto& b : t) {
                    if (a == b)
                        continue;
                    bool found = false;
                    for (const auto& m : maps)
                        if (apply(m, b) == a) {
                            found = true;
                            break;
                        }
                    if (!found) {
                        bad = "no witness maps a choice tuple onto another";
                        break;
                    }
                }
                if (!bad.empty())
                    break;
            }
        if (!bad.empty()) {
            round.witnessed = false;
            ok = false;
            out.reason = "round " + std::to_string(i + 1) + ": " + bad;
        }
    }
    if (!ok)
        out.verdict = WscVerdict::RejectedUnwitnessed;
    else
        out.verdict = p.output(red, out.final_stage) ? WscVerdict::AcceptedTrue : WscVerdict::AcceptedFalse;
    return out;
}

WscProgram threshold_program()
{
    WscProgram p;
    p.arity = 1;
    p.choice_arity = 1;
    p.relations = std::vector<std::string>{"E"};
    p.mentions_colors = false;
    // isolated or universal among the vertices not yet deleted
    p.choice = [](const RelStructure& g, const TupleSet& r) {
        TupleSet t;
        const auto& e = g.relations.count("E") ? g.relations.at("E") : Relation{2, {}};
        for (int y = 0; y < g.n; ++y) {
            if (r.count({y}))
                continue;
            bool all = true, none = true;
            for (int z = 0; z < g.n; ++z) {
                if (z == y || r.count({z}))
                    continue;
                bool adj = e.contains({y, z});
                all &= adj;
                none &= !adj;
            }
            if (all || none)
                t.insert({y});
        }
        return t;
    };
    p.step = [](const RelStructure&, const TupleSet& r, const std::optional<Tuple>& chosen) {
        TupleSet next = r;
        if (chosen)
            next.insert(*chosen);
        return next;
    };
    p.witness = [](const RelStructure& g, const TupleSet&, const TupleSet&, const Tuple& a, const Tuple& b) {
        VertexMap m;
        for (int z = 0; z < g.n; ++z)
            m.emplace_back(z, z == a[0] ? b[0] : z == b[0] ? a[0] : z);
        return std::vector<VertexMap>{m};
    };
    p.output = [](const RelStructure& g, const TupleSet& r) { return static_cast<int>(r.size()) == g.n; };
    return p;
}

WscOutcome threshold_via_wsc(const ColoredGraph& g, const WscOptions& opt)
{
    return wsc_fixpoint(g, threshold_program(), opt);
}

namespace {

bool is_discrete(const std::vector<int>& cells)
{
    return std::set<int>(cells.begin(), cells.end()).size() == cells.size();
}

}  // namespace

// Equitable cells of the shortest individualization prefix whose refinement is discrete.
// Depends only on the structure and its individualization order, hence invariant; cached
// so that extending an anchored structure costs a lookup.
std::optional<std::vector<int>> anchor_cells(const RelStructure& s)
{
    struct Hash {
        std::size_t operator()(const std::vector<int>& v) const noexcept
        {
            std::size_t h = v.size();
            for (int x : v)
                h = h * 1000003u ^ static_cast<std::size_t>(x);
            return h;
        }
    };
    thread_local std::unordered_map<std::vector<int>, std::vector<int>, Hash> cache;
    if (cache.size() > 20000)
        cache.clear();
    auto key = serialize(s);
    if (auto it = cache.find(key); it != cache.end())
        return it->second;
    if (!s.indiv.empty()) {
        RelStructure p = s;
        p.indiv.pop_back();
        if (auto it = cache.find(serialize(p)); it != cache.end()) {
            auto cells = it->second;
            cache.emplace(std::move(key), cells);
            return cells;
        }
    }
    if (s.n == 0 || !is_discrete(equitable_cells(s)))
        return std::nullopt;
    RelStructure p = s;
    for (std::size_t j = 0; j <= s.indiv.size(); ++j) {
        p.indiv.assign(s.indiv.begin(), s.indiv.begin() + static_cast<long>(j));
        auto cells = equitable_cells(p);
        if (is_discrete(cells)) {
            cache.emplace(std::move(key), cells);
            return cells;
        }
    }
    return std::nullopt;
}

std::vector<Vertex> brute_ready(const RelStructure& s, const SearchLimits& lim)
{
    if (s.n == 0)
        return {};
    // rigid: every orbit is a singleton, ordered by anchor cell
    if (auto anchor = anchor_cells(s)) {
        std::vector<char> done(s.n, 0);
        for (Vertex v : s.indiv)
            done[v] = 1;
        Vertex best = -1;
        for (int v = 0; v < s.n; ++v)
            if (!done[v] && (best < 0 || (*anchor)[v] < (*anchor)[best]))
                best = v;
        return {best >= 0 ? best : s.indiv.front()};
    }
    auto group = automorphisms(s, lim);
    auto orbs = orbits_from_group(s.n, 1, group);
    auto lab = canonical_labeling(s, lim).labeling;
    std::vector<char> indiv(s.n, 0);
    for (Vertex v : s.indiv)
        indiv[v] = 1;
    const std::vector<Tuple>* best = nullptr;
    int best_key = 0;
    bool best_big = false;
    for (const auto& o : orbs) {
        bool big = o.size() > 1;
        if (!big && indiv[o[0][0]])
            continue;
        int key = s.n;
        for (const auto& t : o)
            key = std::min(key, lab[t[0]]);
        if (!best || (big && !best_big) || (big == best_big && key < best_key)) {
            best = &o;
            best_key = key;
            best_big = big;
        }
    }
    if (!best)
        return {s.indiv.front()};
    std::vector<Vertex> out;
    for (const auto& t : *best)
        out.push_back(t[0]);
    return out;
}

namespace {

// Base vertices each directed edge is on a cycle of, after deleting the given undirected edges.
std::vector<std::vector<char>> on_cycle(const ColoredGraph& base, const std::vector<std::vector<char>>& removed)
{
    int n = base.n;
    auto adj = adjacency(base);
    std::vector<std::vector<char>> cyc(n, std::vector<char>(n, 0));
    for (auto [u, v] : graph_edges(base)) {
        if (removed[u][v])
            continue;
        // u-v is on a cycle iff v is reachable from u without the edge itself
        std::vector<char> seen(n, 0);
        std::vector<Vertex> st{u};
        seen[u] = 1;
        while (!st.empty()) {
            Vertex x = st.back();
            st.pop_back();
            for (Vertex y : adj[x]) {
                if (removed[x][y] || seen[y] || (x == u && y == v))
                    continue;
                seen[y] = 1;
                st.push_back(y);
            }
        }
        cyc[u][v] = cyc[v][u] = seen[v];
    }
    return cyc;
}

}  // namespace

std::vector<Vertex> cfi_ready(const RelStructure& s, const SearchLimits& lim)
{
    auto rb = recover_base(s);
    const int n = s.n;
    const ColoredGraph& base = rb.base;
    std::vector<char> indiv(n, 0);
    for (Vertex v : s.indiv)
        indiv[v] = 1;
    bool all_edges = true;
    for (int x = 0; x < n; ++x)
        if (rb.origin[x].kind == Origin::Kind::DirectedEdge && !indiv[x])
            all_edges = false;
    for (Vertex v : s.indiv)
        if (rb.origin[v].kind == Origin::Kind::Gadget && !all_edges)
            throw Error(ErrorKind::InvalidStructure, "only edge vertices may be individualized");

    // the base with the endpoints of individualized edges individualized in order
    std::vector<Vertex> ends;
    std::vector<std::vector<char>> removed(base.n, std::vector<char>(base.n, 0));
    for (auto [u, v] : rb.individualized) {
        removed[u][v] = removed[v][u] = 1;
        for (Vertex w : {u, v})
            if (std::find(ends.begin(), ends.end(), w) == ends.end())
                ends.push_back(w);
    }
    auto pinned = individualize(base, ends);
    auto lab = canonical_labeling(pinned, lim).labeling;
    const auto& e = base.relations.at("E");
    std::vector<std::pair<std::pair<int, int>, std::vector<std::pair<Vertex, Vertex>>>> edge_orbits;
    for (const auto& o : orbits(pinned, 2, lim)) {
        if (!e.contains(o[0]))
            continue;
        std::pair<int, int> key{base.n, base.n};
        std::vector<std::pair<Vertex, Vertex>> members;
        for (const auto& t : o) {
            key = std::min(key, std::pair<int, int>{lab[t[0]], lab[t[1]]});
            members.emplace_back(t[0], t[1]);
        }
        edge_orbits.emplace_back(key, members);
    }
    std::sort(edge_orbits.begin(), edge_orbits.end());
    auto in_orbit = [&](const std::vector<std::pair<Vertex, Vertex>>& m, Vertex x) {
        const Origin& o = rb.origin[x];
        return o.kind == Origin::Kind::DirectedEdge &&
               std::find(m.begin(), m.end(), std::pair<Vertex, Vertex>{o.u, o.v}) != m.end();
    };

    // an orbit of base edges on cycles of the unpinned part: all its edge vertices
    auto cyc = on_cycle(base, removed);
    for (const auto& [key, m] : edge_orbits) {
        if (!cyc[m[0].first][m[0].second])
            continue;
        std::vector<Vertex> out;
        for (int x = 0; x < n; ++x)
            if (in_orbit(m, x))
                out.push_back(x);
        return out;
    }

    // acyclic: an invariant edge-vertex-pair order splits every pair
    auto r = edge_pair_order(adjacency(s), rb.origin, base, s.indiv);
    std::vector<char> in_r(n, 0);
    for (Vertex x : r)
        in_r[x] = 1;
    for (const auto& [key, m] : edge_orbits) {
        if (m.size() < 2)
            continue;
        std::vector<Vertex> out;
        for (int x = 0; x < n; ++x)
            if (in_r[x] && in_orbit(m, x))
                out.push_back(x);
        return out;
    }

    // rigid: least vertex not yet individualized, edge vertices first
    auto adj = adjacency(s);
    std::vector<std::pair<std::vector<int>, Vertex>> keyed;
    for (int x = 0; x < n; ++x) {
        if (indiv[x])
            continue;
        const Origin& o = rb.origin[x];
        std::vector<int> key;
        if (o.kind == Origin::Kind::DirectedEdge) {
            key = {0, lab[o.u], lab[o.v], in_r[x] ? 0 : 1};
        } else {
            key = {1, lab[o.u]};
            std::vector<std::pair<int, int>> nb;
            for (Vertex w : adj[x])
                nb.emplace_back(lab[rb.origin[w].v], in_r[w]);
            std::sort(nb.begin(), nb.end());
            for (auto [l, b] : nb)
                key.push_back(b);
        }
        keyed.emplace_back(key, x);
    }
    if (keyed.empty())
        return {s.indiv.front()};
    return {std::min_element(keyed.begin(), keyed.end())->second};
}

namespace {

// Individualization order recorded in an arity-2 stage as a chain: (c0, c0) for the
// first vertex, then (prev, next) for each later one.
std::vector<Vertex> order_of(const TupleSet& r)
{
    std::vector<Vertex> out;
    if (r.empty())
        return out;
    std::unordered_map<Vertex, Vertex> succ;
    for (const auto& t : r) {
        if (t[0] == t[1])
            out.push_back(t[0]);
        else
            succ[t[0]] = t[1];
    }
    while (out.size() <= succ.size()) {
        auto it = succ.find(out.back());
        if (it == succ.end())
            break;
        out.push_back(it->second);
    }
    return out;
}

}  // namespace

Canonization gurevich_canonize(const RelStructure& s, const ReadyOracle& ready, const CanonOptions& opt)
{
    const int n = s.n;
    std::map<std::size_t, std::vector<Permutation>> groups;  // by order length
    auto group_of = [&](const RelStructure& t) -> const std::vector<Permutation>& {
        auto it = groups.find(t.indiv.size());
        if (it == groups.end()) {
            it = groups.emplace(t.indiv.size(), anchor_cells(t) ? std::vector<Permutation>{identity_perm(n)}
                                                         : automorphisms(t, opt.search))
                     .first;
        }
        return it->second;
    };
    std::string violation;

    WscProgram p;
    p.arity = 2;
    p.choice_arity = 1;
    p.mentions_order = true;
    p.choice = [&](const RelStructure& red, const TupleSet& r) {
        auto t = individualize(red, order_of(r));
        auto o = ready(t);
        std::sort(o.begin(), o.end());
        o.erase(std::unique(o.begin(), o.end()), o.end());
        TupleSet out;
        if (o.empty())
            return out;
        for (Vertex v : o)
            if (v < 0 || v >= n)
                throw Error(ErrorKind::InvalidStructure, "ready oracle returned a vertex outside the universe");
        bool done = static_cast<int>(t.indiv.size()) == n;
        if (o.size() == 1 && !done && std::find(t.indiv.begin(), t.indiv.end(), o[0]) != t.indiv.end())
            throw Error(ErrorKind::NotProgressing, "ready oracle returned an individualized vertex");
        if (n <= opt.check_bound && violation.empty() && !done) {
            auto orbs = orbits_from_group(n, 1, group_of(t));
            bool nontrivial = false;
            for (const auto& orb : orbs) {
                nontrivial |= orb.size() > 1;
                if (orb[0][0] <= o[0] && std::find(orb.begin(), orb.end(), Tuple{o[0]}) != orb.end()) {
                    std::vector<Vertex> vs;
                    for (const auto& x : orb)
                        vs.push_back(x[0]);
                    if (vs != o)
                        violation = "ready set is not a 1-orbit";
                }
            }
            if (violation.empty() && o.size() == 1 && nontrivial)
                violation = "ready set is a singleton while a non-trivial orbit exists";
        }
        for (Vertex v : o)
            out.insert({v});
        return out;
    };
    p.step = [&](const RelStructure& red, const TupleSet& r, const std::optional<Tuple>& chosen) {
        TupleSet next = r;
        if (!chosen)
            return next;
        Vertex c = (*chosen)[0];
        auto ord = order_of(r);
        if (std::find(ord.begin(), ord.end(), c) != ord.end() ||
            std::find(red.indiv.begin(), red.indiv.end(), c) != red.indiv.end())
            return next;
        if (ord.empty())
            next.insert({c, c});
        else
            next.insert({ord.back(), c});
        return next;
    };
    p.witness = [&](const RelStructure& red, const TupleSet& r, const TupleSet&, const Tuple& a, const Tuple& b) {
        auto t = individualize(red, order_of(r));
        for (const auto& g : group_of(t))
            if (g[b[0]] == a[0]) {
                VertexMap m;
                for (int x = 0; x < n; ++x)
                    m.emplace_back(x, g[x]);
                return std::vector<VertexMap>{m};
            }
        return std::vector<VertexMap>{};
    };
    p.output = [](const RelStructure&, const TupleSet&) { return true; };

    Canonization c;
    c.outcome = wsc_fixpoint(s, p, opt.wsc);
    if (!violation.empty())
        throw Error(ErrorKind::RejectedUnwitnessed, violation);
    if (c.outcome.verdict == WscVerdict::RejectedUnwitnessed)
        throw Error(ErrorKind::RejectedUnwitnessed, c.outcome.reason);
    c.order = s.indiv;
    for (Vertex v : order_of(c.outcome.final_stage))
        c.order.push_back(v);
    if (static_cast<int>(c.order.size()) != n)
        throw Error(ErrorKind::NotProgressing, "ready oracle stopped before every vertex was individualized");
    Permutation lab(n);
    for (int i = 0; i < n; ++i)
        lab[c.order[i]] = i;
    c.canon = relabel(s, lab);
    c.canon.indiv.resize(n);
    for (int i = 0; i < n; ++i)
        c.canon.indiv[i] = i;
    return c;
}

KOrbitOrder order_k_orbits(const RelStructure& s, int k, const ReadyOracle& ready, const CanonOptions& opt)
{
    if (k < 1)
        throw Error(ErrorKind::InvalidStructure, "k must be positive");
    const int n = s.n;
    std::uint64_t total = 1;
    for (int i = 0; i < k; ++i)
        total *= static_cast<std::uint64_t>(n);
    std::map<std::vector<Vertex>, std::vector<int>> canon_memo;  // by the individualized sequence
    std::map<std::vector<int>, std::vector<Tuple>> classes;
    Tuple t(k);
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        std::uint64_t x = idx;
        for (int i = k - 1; i >= 0; --i) {
            t[i] = static_cast<Vertex>(x % n);
            x /= n;
        }
        std::vector<int> key;
        std::vector<Vertex> fresh;
        for (int i = 0; i < k; ++i) {
            int first = i;
            for (int j = 0; j < i; ++j)
                if (t[j] == t[i]) {
                    first = j;
                    break;
                }
            key.push_back(first);
            auto it = std::find(s.indiv.begin(), s.indiv.end(), t[i]);
            key.push_back(it == s.indiv.end() ? -1 : static_cast<int>(it - s.indiv.begin()));
            if (first == i && it == s.indiv.end())
                fresh.push_back(t[i]);
        }
        auto m = canon_memo.find(fresh);
        if (m == canon_memo.end())
            m = canon_memo.emplace(fresh, serialize(gurevich_canonize(individualize(s, fresh), ready, opt).canon)).first;
        key.insert(key.end(), m->second.begin(), m->second.end());
        classes[key].push_back(t);
    }
    KOrbitOrder out;
    out.k = k;
    for (auto& [key, members] : classes) {
        std::sort(members.begin(), members.end());
        out.classes.push_back(std::move(members));
    }
    return out;
}

nlohmann::ordered_json outcome_to_json(const WscOutcome& o)
{
    nlohmann::ordered_json j;
    j["verdict"] = verdict_name(o.verdict);
    j["final_stage"] = std::vector<Tuple>(o.final_stage.begin(), o.final_stage.end());
    auto rounds = nlohmann::ordered_json::array();
    for (const auto& r : o.log) {
        nlohmann::ordered_json x;
        x["choice"] = std::vector<Tuple>(r.choice.begin(), r.choice.end());
        x["chosen"] = r.chosen ? nlohmann::ordered_json(*r.chosen) : nlohmann::ordered_json(nullptr);
        x["witnessed"] = r.witnessed;
        x["maps"] = r.maps;
        rounds.push_back(x);
    }
    j["rounds"] = rounds;
    if (!o.reason.empty())
        j["reason"] = o.reason;
    return j;
}

}  // namespace wscfi
