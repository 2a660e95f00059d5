#include "doctest.h"
#include "helpers.hpp"
#include "wscfi/gluing.hpp"
#include "wscfi/search.hpp"

using namespace wscfi;
using namespace testutil;

namespace {

Multipede odd_multipede(int w, std::uint64_t seed)
{
    auto [b, meta] = sample_verified(w, 0.95, seed, true, 0, 5000);
    return build_multipede(b);
}

CfiGraph single_pair(const ColoredGraph& h, int parity)
{
    return build_cfi(h, parity_twist(h, parity), CfiVariant::SinglePair, true);
}

}  // namespace

TEST_CASE("gluing shape")
{
    auto k4 = totally_ordered(complete_graph(4));
    auto m = odd_multipede(10, 1);
    auto c = single_pair(k4, 0);
    std::vector<int> x{0, 2, 3, 5, 7, 9};
    auto g = glue(m, x, c);
    CHECK(g.structure.n == 2 * 10 + 16);
    // every CFI edge becomes one triple per direction
    CHECK(g.structure.relations.at("R").tuples.size() ==
          m.structure.relations.at("R").tuples.size() + c.graph.relations.at("E").tuples.size());
    // gadget colors come after all foot colors
    CHECK(g.structure.colors.size() == 10 + 4);
    for (std::size_t i = 10; i < g.structure.colors.size(); ++i)
        for (Vertex v : g.structure.colors[i])
            CHECK(v >= 20);
    // the i-th base edge sits on the i-th listed segment
    auto edges = graph_edges(k4);
    for (std::size_t i = 0; i < edges.size(); ++i)
        for (int j = 0; j < 2; ++j) {
            Vertex f = foot(x[i], j);
            REQUIRE(g.cfi_origin[f].has_value());
            CHECK(g.cfi_origin[f]->u == edges[i].first);
            CHECK(g.cfi_origin[f]->v == edges[i].second);
            CHECK(g.cfi_origin[f]->bits == j);
        }

    CHECK_THROWS_AS(glue(m, {0, 1, 2}, c), Error);
    CHECK_THROWS_AS(glue(m, x, build_cfi(k4, Twist(6, 0), CfiVariant::TwoPair)), Error);
    try {
        glue(m, {0, 1, 2}, c);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SizeMismatch);
    }
}

TEST_CASE("extraction recovers the CFI graph and its parity")
{
    auto k4 = totally_ordered(complete_graph(4));
    auto prism = totally_ordered(prism_graph());
    for (const auto& h : {k4, prism}) {
        int m_edges = static_cast<int>(graph_edges(h).size());
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            auto m = odd_multipede(m_edges + 3, seed);
            std::vector<int> x;
            for (int i = 0; i < m_edges; ++i)
                x.push_back(i + static_cast<int>(seed % 3));
            for (int p = 0; p < 2; ++p) {
                auto c = single_pair(h, p);
                auto e = extract_cfi(glue(m, x, c).structure);
                CHECK(isomorphic(e, c.graph).has_value());
                CHECK(isomorphic(e, single_pair(h, 1 - p).graph).has_value() == false);
            }
        }
    }
    auto m = odd_multipede(8, 0);
    auto e = extract_cfi(m.structure);
    CHECK(e.n == 0);
}

TEST_CASE("extraction commutes with relabeling")
{
    auto k4 = totally_ordered(complete_graph(4));
    auto m = odd_multipede(9, 4);
    auto s = glue(m, {1, 2, 3, 4, 6, 8}, single_pair(k4, 1)).structure;
    std::mt19937_64 rng(1);
    for (int iter = 0; iter < 5; ++iter) {
        auto pi = random_perm(s.n, rng);
        auto a = extract_cfi(s), b = extract_cfi(relabel(s, pi));
        std::vector<Vertex> before;
        std::vector<char> used(s.n, 0);
        for (const auto& t : s.relations.at("R").tuples)
            if (t[1] == t[2])
                used[t[0]] = used[t[1]] = 1;
        for (int v = 0; v < s.n; ++v)
            if (used[v])
                before.push_back(v);
        std::vector<Vertex> imgs;
        for (Vertex v : before)
            imgs.push_back(pi[v]);
        std::sort(imgs.begin(), imgs.end());
        Permutation map(before.size());
        for (std::size_t i = 0; i < before.size(); ++i)
            map[i] = static_cast<Vertex>(std::lower_bound(imgs.begin(), imgs.end(), pi[before[i]]) - imgs.begin());
        REQUIRE(a.n == static_cast<int>(before.size()));
        CHECK(is_isomorphism(a, b, map));
    }
}

TEST_CASE("gluing an asymmetric multipede is asymmetric")
{
    auto k4 = totally_ordered(complete_graph(4));
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        auto m = odd_multipede(12, seed);
        REQUIRE(automorphisms(m.structure).size() == 1);
        for (int p = 0; p < 2; ++p) {
            auto g = glue(m, {0, 1, 4, 6, 9, 11}, single_pair(k4, p));
            CHECK(g.structure.n <= 40);
            CHECK(automorphisms(g.structure).size() == 1);
        }
    }
    // a symmetric multipede passes its symmetry on to the gluing
    auto flat = build_multipede(make_base(6, {{0, 1, 2}}));
    auto g = glue(flat, {0, 1, 2, 3, 4, 5}, single_pair(k4, 0));
    CHECK(automorphisms(g.structure).size() > 1);
}

TEST_CASE("segment order matters")
{
    auto c4 = totally_ordered(cycle_graph(4));
    auto m = odd_multipede(8, 2);
    auto c = single_pair(c4, 0);
    auto a = glue(m, {0, 1, 2, 3}, c).structure;
    auto b = glue(m, {1, 0, 3, 2}, c).structure;
    CHECK(isomorphic(a, a).has_value());
    CHECK_FALSE(isomorphic(a, b).has_value());
}

TEST_CASE("fixed segments")
{
    auto k4 = totally_ordered(complete_graph(4));
    auto m = odd_multipede(10, 3);
    std::vector<int> x{0, 2, 3, 5, 7, 9};
    auto g = glue(m, x, single_pair(k4, 0));
    auto none = classify_fixed_segments(g, {});
    CHECK(none.all().empty());

    // a gadget vertex of base vertex 1 fixes the segments of edges 01, 12, 13
    Vertex gad = -1;
    for (int v = 20; v < g.structure.n && gad < 0; ++v)
        if (g.cfi_origin[v]->u == 1)
            gad = v;
    auto fs = classify_fixed_segments(g, {gad});
    CHECK(fs.gadget == std::vector<int>{0, 5, 7});
    CHECK(fs.directly.empty());

    auto feet = classify_fixed_segments(g, {foot(4, 1), foot(4, 0), foot(8, 0)});
    CHECK(feet.directly == std::vector<int>{4, 8});
    CHECK(feet.closure == [&] {
        std::vector<int> r;
        for (int s : closure(m.base, {4, 8}))
            if (s != 4 && s != 8)
                r.push_back(s);
        return r;
    }());
}
