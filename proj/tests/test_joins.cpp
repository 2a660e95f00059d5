#include "doctest.h"
#include "helpers.hpp"
#include "wscfi/joins.hpp"
#include "wscfi/search.hpp"

#include <set>

using namespace wscfi;
using namespace testutil;

namespace {

std::vector<int> orbit_ids(const RelStructure& s)
{
    std::vector<int> id(s.n);
    auto orb = orbits(s, 1);
    for (std::size_t i = 0; i < orb.size(); ++i)
        for (const auto& t : orb[i])
            id[t[0]] = static_cast<int>(i);
    return id;
}

// connected graph with exactly c nonempty classes
ColoredGraph random_part(int n, int c, std::mt19937_64& rng)
{
    for (;;) {
        auto g = random_graph(n, 0.5, 1, rng);
        if (!is_connected(g))
            continue;
        auto p = random_perm(n, rng);
        std::vector<std::vector<Vertex>> cls(c);
        for (int i = 0; i < n; ++i)
            cls[i < c ? i : rng() % c].push_back(p[i]);
        g.colors = cls;
        g.normalize();
        return g;
    }
}

ColoredGraph nine_cycle()
{
    auto g = cycle_graph(9);
    g.colors = {{0, 3, 6}, {1, 4, 7}, {2, 5, 8}};
    return g;
}

}  // namespace

TEST_CASE("join sizes and colors")
{
    auto g = nine_cycle();
    auto one = color_class_join({g});
    CHECK(one.graph.n == 12);
    auto j = color_class_join({g, g, g});
    CHECK(j.graph.n == 30);
    CHECK(j.graph.colors.size() == 6);
    CHECK(j.parts.size() == 3);
    CHECK(j.join_vertices == std::vector<Vertex>{27, 28, 29});
    auto adj = adjacency(j.graph);
    // u_1 sees class 1 of every part
    CHECK(adj[28].size() == 9);
    for (Vertex v : adj[28])
        CHECK(v % 9 % 3 == 1);
    for (int i = 3; i < 6; ++i)
        CHECK(j.graph.colors[i].size() == 1);
}

TEST_CASE("join errors")
{
    auto g = nine_cycle();
    CHECK_THROWS_AS(color_class_join({g, cycle_graph(4)}), Error);
    auto disc = make_graph(4, {{0, 1}, {2, 3}}, {{0, 2}, {1, 3}, {}});
    disc.colors.pop_back();
    auto two = make_graph(4, {{0, 1}, {1, 2}, {2, 3}}, {{0, 2}, {1, 3}});
    CHECK_NOTHROW(color_class_join({two, two}));
    try {
        color_class_join({two, disc});
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DisconnectedPart);
    }
    try {
        color_class_join({g, two});
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ClassCountMismatch);
    }
}

TEST_CASE("orbits of a join respect parts")
{
    std::mt19937_64 rng(17);
    for (int iter = 0; iter < 25; ++iter) {
        int c = 1 + iter % 3;
        std::vector<ColoredGraph> gs;
        int parts = 2 + iter % 3;
        for (int p = 0; p < parts; ++p)
            gs.push_back(p > 0 && rng() % 3 == 0 ? relabel(gs[0], random_perm(gs[0].n, rng))
                                                  : random_part(c + 1 + static_cast<int>(rng() % 4), c, rng));
        auto j = color_class_join(gs);
        auto lab = part_labels(j);
        auto id = orbit_ids(j.graph);
        for (int v = 0; v < j.graph.n; ++v)
            for (int w = 0; w < j.graph.n; ++w) {
                if (id[v] != id[w])
                    continue;
                CHECK((lab[v] < 0) == (lab[w] < 0));
                if (lab[v] >= 0 && lab[v] != lab[w])
                    CHECK(isomorphic(gs[lab[v]], gs[lab[w]]).has_value());
            }
        // non-isomorphic parts never share an orbit
        for (std::size_t a = 0; a < gs.size(); ++a)
            for (std::size_t b = 0; b < gs.size(); ++b)
                if (!isomorphic(gs[a], gs[b]))
                    for (Vertex v : j.parts[a].vertices)
                        for (Vertex w : j.parts[b].vertices)
                            CHECK(id[v] != id[w]);
    }
}

TEST_CASE("pinning other parts does not split orbits inside a part")
{
    std::mt19937_64 rng(23);
    for (int iter = 0; iter < 20; ++iter) {
        int c = 1 + iter % 2;
        std::vector<ColoredGraph> gs;
        for (int p = 0; p < 3; ++p)
            gs.push_back(iter % 2 && p ? gs[0] : random_part(c + 2 + static_cast<int>(rng() % 4), c, rng));
        auto j = color_class_join(gs);
        REQUIRE(j.graph.n <= 30);
        int target = static_cast<int>(rng() % 3);
        std::vector<Vertex> pins;
        for (Vertex v = 0; v < j.graph.n; ++v) {
            bool mine = v < j.graph.n - c && part_labels(j)[v] == target;
            if (!mine && rng() % 3 == 0)
                pins.push_back(v);
        }
        auto pinned = orbit_ids(individualize(j.graph, pins));
        auto own = orbit_ids(gs[target]);
        const auto& vs = j.parts[target].vertices;
        for (std::size_t a = 0; a < vs.size(); ++a)
            for (std::size_t b = 0; b < vs.size(); ++b)
                if (own[a] == own[b])
                    CHECK(pinned[vs[a]] == pinned[vs[b]]);
    }
}

TEST_CASE("cfi_omega")
{
    auto c3 = complete_graph(3);
    auto j = cfi_omega(c3, 0, 1);
    REQUIRE(j.parts.size() == 3);
    std::vector<ColoredGraph> parts;
    for (const auto& p : j.parts)
        parts.push_back(induced(j.graph, p.vertices));
    std::set<int> reps;
    for (std::size_t a = 0; a < 3; ++a) {
        int r = static_cast<int>(a);
        for (std::size_t b = 0; b < a; ++b)
            if (isomorphic(parts[a], parts[b])) {
                r = reps.count(static_cast<int>(b)) ? static_cast<int>(b) : r;
                break;
            }
        reps.insert(r);
    }
    CHECK(reps.size() == 2);
    CHECK(isomorphic(parts[0], parts[1]).has_value());
    CHECK_FALSE(isomorphic(parts[1], parts[2]).has_value());

    auto j1 = cfi_omega(c3, 1, 1);
    CHECK_FALSE(isomorphic(induced(j1.graph, j1.parts[0].vertices), induced(j1.graph, j1.parts[1].vertices)));

    CHECK(cfi_omega(c3, 1, 2).parts.size() == 6);
    CHECK_THROWS_AS(cfi_omega(c3, 0, 0), Error);

    // join vertices sit in singleton classes and in their own orbits
    auto id = orbit_ids(j.graph);
    for (Vertex u : j.join_vertices)
        for (Vertex v = 0; v < j.graph.n; ++v)
            if (v != u)
                CHECK(id[u] != id[v]);
}

TEST_CASE("pebbled-part individualizations")
{
    // 2-class parts: 4-vertex paths; join of three, plus CFI on top
    auto p4 = make_graph(4, {{0, 1}, {1, 2}, {2, 3}}, {{0, 2}, {1, 3}});
    auto j = color_class_join({p4, p4, p4});
    auto lab = part_labels(j);
    CHECK(pebbled_part_vertices(lab, {}) == j.join_vertices);
    CHECK(pebbled_part_vertices(lab, {12, 13}) == j.join_vertices);

    auto pv = pebbled_part_vertices(lab, {5});
    CHECK(pv == std::vector<Vertex>{4, 5, 6, 7, 12, 13});
    PebbledPartIndividualizations gen(lab, {5, 6});
    std::vector<std::vector<Vertex>> all;
    while (auto x = gen.next())
        all.push_back(*x);
    CHECK(gen.exhaustive());
    CHECK(all.size() == 720);
    CHECK(std::is_sorted(all.begin(), all.end()));
    CHECK(std::set<std::vector<Vertex>>(all.begin(), all.end()).size() == 720);
    for (const auto& x : all)
        CHECK(x.size() == 6);

    PebbledPartIndividualizations few(lab, {0, 9}, 50, 3);
    std::vector<std::vector<Vertex>> some;
    while (auto x = few.next())
        some.push_back(*x);
    CHECK_FALSE(few.exhaustive());
    CHECK(some.size() == 50);
    CHECK(std::is_sorted(some.begin(), some.end()));
    PebbledPartIndividualizations again(lab, {0, 9}, 50, 3);
    for (const auto& x : some)
        CHECK(again.next() == x);

    // CFI over the join: part membership through origins
    auto small = color_class_join({make_graph(2, {{0, 1}}, {{0}, {1}}), make_graph(2, {{0, 1}}, {{1}, {0}})});
    auto c = build_cfi(small.graph, Twist(graph_edges(small.graph).size(), 0), CfiVariant::TwoPair);
    auto clab = cfi_part_labels(c, part_labels(small));
    int part0 = 0, joins = 0;
    for (int x = 0; x < c.graph.n; ++x) {
        part0 += clab[x] == 0;
        joins += clab[x] < 0;
    }
    // part 0: two degree-2 base vertices (2 gadget + 4 edge vertices each), 2 of those edge vertices
    // go to the join edges
    CHECK(part0 == 2 * 2 + 2 * 2);
    CHECK(joins == c.graph.n - 2 * part0);
    std::vector<Vertex> pin{0};
    REQUIRE(clab[0] >= 0);
    auto cpv = pebbled_part_vertices(clab, pin);
    CHECK(static_cast<int>(cpv.size()) == part0 + joins);
}

TEST_CASE("join json roundtrip")
{
    auto j = cfi_omega(complete_graph(3), 1, 1);
    auto back = joined_from_json(nlohmann::json::parse(joined_to_json(j).dump()));
    CHECK(back.graph == j.graph);
    CHECK(back.join_vertices == j.join_vertices);
    REQUIRE(back.parts.size() == 3);
    CHECK(back.parts[2].vertices == j.parts[2].vertices);
}
