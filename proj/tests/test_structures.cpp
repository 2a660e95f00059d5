#include "doctest.h"
#include "helpers.hpp"
#include "wscfi/search.hpp"

#include <set>

using namespace wscfi;
using namespace testutil;

TEST_CASE("directed 3-path is asymmetric")
{
    RelStructure s;
    s.n = 3;
    s.relations["E"] = Relation{2, {{0, 1}, {1, 2}}};
    s.colors = {{0, 1, 2}};
    auto aut = automorphisms(s);
    REQUIRE(aut.size() == 1);
    CHECK(aut[0] == identity_perm(3));
}

TEST_CASE("uncolored 4-cycle has 8 automorphisms")
{
    auto c4 = cycle_graph(4);
    auto aut = automorphisms(c4);
    CHECK(aut.size() == 8);
    CHECK(aut == all_isomorphisms_naive(c4, c4));
}

TEST_CASE("automorphisms match naive enumeration on random structures")
{
    std::mt19937_64 rng(11);
    for (int iter = 0; iter < 60; ++iter) {
        int n = 2 + iter % 6;
        RelStructure s = iter % 2 ? random_structure(n, rng) : random_graph(n, 0.5, 1 + iter % 3, rng);
        if (iter % 5 == 0 && n > 2)
            s = individualize(s, {n - 1});
        auto aut = automorphisms(s);
        CHECK(aut == all_isomorphisms_naive(s, s));
    }
}

TEST_CASE("group axioms and conjugation under relabeling")
{
    std::mt19937_64 rng(5);
    for (int iter = 0; iter < 30; ++iter) {
        int n = 3 + iter % 6;
        auto s = random_graph(n, 0.5, 1 + iter % 2, rng);
        auto aut = automorphisms(s);
        std::set<Permutation> g(aut.begin(), aut.end());
        CHECK(g.count(identity_perm(n)) == 1);
        for (const auto& a : aut) {
            CHECK(g.count(inverse(a)) == 1);
            for (const auto& b : aut)
                CHECK(g.count(compose(a, b)) == 1);
        }
        auto pi = random_perm(n, rng);
        auto t = relabel(s, pi);
        std::set<Permutation> expect;
        for (const auto& a : aut)
            expect.insert(compose(pi, compose(a, inverse(pi))));
        auto aut_t = automorphisms(t);
        CHECK(std::set<Permutation>(aut_t.begin(), aut_t.end()) == expect);
    }
}

TEST_CASE("orbits of a triangle")
{
    auto k3 = complete_graph(3);
    auto o = orbits(k3, 1);
    REQUIRE(o.size() == 1);
    CHECK(o[0].size() == 3);
    auto o2 = orbits(individualize(k3, {0}), 1);
    REQUIRE(o2.size() == 2);
    CHECK(o2[0] == std::vector<Tuple>{{0}});
    CHECK(o2[1] == std::vector<Tuple>{{1}, {2}});
    // pairs: diagonal and off-diagonal
    CHECK(orbits(k3, 2).size() == 2);
}

TEST_CASE("orbits refine color-class signatures")
{
    std::mt19937_64 rng(8);
    for (int iter = 0; iter < 20; ++iter) {
        auto s = random_graph(6, 0.4, 3, rng);
        auto col = s.color_of();
        for (const auto& cls : orbits(s, 2))
            for (const auto& t : cls) {
                CHECK(col[t[0]] == col[cls[0][0]]);
                CHECK(col[t[1]] == col[cls[0][1]]);
                CHECK((t[0] == t[1]) == (cls[0][0] == cls[0][1]));
            }
    }
}

TEST_CASE("individualize")
{
    auto k3 = complete_graph(3);
    CHECK(individualize(k3, {}) == k3);
    CHECK(automorphisms(individualize(k3, {0})).size() == 2);
    CHECK(automorphisms(individualize(k3, {0, 1})).size() == 1);
    CHECK_THROWS_AS(individualize(individualize(k3, {0}), {0}), Error);
}

TEST_CASE("isomorphic agrees with naive search and is an equivalence")
{
    std::mt19937_64 rng(21);
    for (int iter = 0; iter < 80; ++iter) {
        int n = 3 + iter % 5;
        auto s = iter % 3 ? random_graph(n, 0.5, 1 + iter % 2, rng) : random_structure(n, rng);
        RelStructure t = iter % 2 ? relabel(s, random_perm(n, rng))
                                  : (iter % 3 ? random_graph(n, 0.5, 1 + iter % 2, rng) : random_structure(n, rng));
        auto phi = isomorphic(s, t);
        bool naive = !all_isomorphisms_naive(s, t).empty();
        CHECK(phi.has_value() == naive);
        if (phi) {
            CHECK(is_isomorphism(s, t, *phi));
            CHECK(is_isomorphism(t, s, inverse(*phi)));
        }
        CHECK(isomorphic(s, s).has_value());
    }
}

TEST_CASE("isomorphism respects class sizes by index")
{
    auto a = make_graph(3, {{0, 1}}, {{0, 1}, {2}});
    auto b = make_graph(3, {{1, 2}}, {{0}, {1, 2}});
    CHECK_FALSE(isomorphic(a, b).has_value());
}

TEST_CASE("canonical labeling is invariant")
{
    std::mt19937_64 rng(3);
    for (int iter = 0; iter < 40; ++iter) {
        int n = 3 + iter % 7;
        auto s = iter % 2 ? random_graph(n, 0.4, 1 + iter % 3, rng) : random_structure(n, rng);
        auto c1 = canonical_labeling(s);
        auto c2 = canonical_labeling(relabel(s, random_perm(n, rng)));
        CHECK(c1.form == c2.form);
        CHECK(relabel(s, c1.labeling) == c1.form);
    }
}

TEST_CASE("size limit")
{
    SearchLimits lim;
    lim.max_vertices = 4;
    CHECK_THROWS_AS(automorphisms(cycle_graph(5), lim), Error);
}

TEST_CASE("json roundtrip")
{
    std::mt19937_64 rng(2);
    auto s = individualize(random_structure(5, rng), {3, 1});
    auto text = dump_structure(s);
    auto back = structure_from_json(nlohmann::json::parse(text));
    CHECK(back == s);
    CHECK(text.rfind("{\"n\":5,\"relations\":", 0) == 0);
}
