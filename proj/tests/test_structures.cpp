#include "support.hpp"

#include <catch_amalgamated.hpp>

using namespace typeamalg;
using namespace testing_support;

TEST_CASE("language validation")
{
    CHECK_THROWS_AS(Language({{"E", 0}}), InputError);
    CHECK_THROWS_AS(Language({{"E", 2}, {"E", 3}}), InputError);
    CHECK_THROWS_AS(Language({{"", 2}}), InputError);
    CHECK(Language({{"E", 2}, {"H", 3}}).max_arity() == 3);
}

TEST_CASE("structure tuples are validated")
{
    Structure s(graph_language(), 3);
    CHECK_THROWS_AS(s.add("E", {0, 3}), InputError);
    CHECK_THROWS_AS(s.add("E", {0}), InputError);
    CHECK_THROWS_AS(s.add("X", {0, 1}), InputError);
    s.add("E", {0, 1});
    CHECK(s.has(0, {0, 1}));
    CHECK_FALSE(s.has(0, {1, 0}));
}

TEST_CASE("induced substructure and initial segment")
{
    auto p3 = path_graph(3);
    auto sub = induced_substructure(p3, {0, 2});
    CHECK(sub.size() == 2);
    CHECK(sub.tuple_count() == 0);
    CHECK(initial_segment(p3, 2) == complete_graph(2));
    CHECK_THROWS_AS(induced_substructure(p3, {2, 0}), InputError);
}

TEST_CASE("embedding counts")
{
    CHECK(enumerate_embeddings(complete_graph(2), complete_graph(3)).size() == 3);
    CHECK(enumerate_embeddings(complete_graph(2), path_graph(3)).size() == 2);
    CHECK(enumerate_embeddings(complete_graph(2), path_graph(3)) == oracle_embeddings(complete_graph(2), path_graph(3)));
    CHECK(enumerate_embeddings(Structure(graph_language(), 0), complete_graph(3)).size() == 1);
    CHECK(enumerate_embeddings(complete_graph(3), complete_graph(3)).size() == 1);
}

TEST_CASE("embedding enumeration agrees with the filtering oracle on random structures")
{
    std::mt19937_64 rng(seed());
    for (int trial = 0; trial < 60; ++trial) {
        auto lang = random_language(rng, 3);
        auto b = random_structure(rng, lang, 4 + trial % 2, 0.4);
        std::uniform_int_distribution<int> pick_size(0, 3);
        int n = pick_size(rng);
        std::vector<int> vs;
        for (int v = 0; v < b.size() && static_cast<int>(vs.size()) < n; ++v)
            if (rng() % 2)
                vs.push_back(v);
        auto a = induced_substructure(b, vs);
        INFO("trial " << trial << " seed " << seed());
        auto got = enumerate_embeddings(a, b);
        CHECK(got == oracle_embeddings(a, b));
        CHECK(std::find(got.begin(), got.end(), vs) != got.end());
    }
}

TEST_CASE("monomorphisms may add tuples")
{
    auto edge_only = graph(2, {});
    CHECK(find_monomorphism(edge_only, complete_graph(2), true).has_value());
    CHECK_FALSE(find_embedding(edge_only, complete_graph(2)).has_value());
    // ordered and unordered readings differ on an arc pointing backwards
    Structure back(graph_language(), 2);
    back.add("E", {1, 0});
    Structure fwd(graph_language(), 2);
    fwd.add("E", {0, 1});
    CHECK_FALSE(find_monomorphism(back, fwd, true).has_value());
    CHECK(find_monomorphism(back, fwd, false).has_value());
}

TEST_CASE("irreducibility")
{
    CHECK(is_irreducible(complete_graph(3)));
    CHECK_FALSE(is_irreducible(path_graph(3)));
    CHECK_FALSE(is_irreducible(graph(1, {})));
    CHECK(is_irreducible(graph(1, {}), true));
    CHECK(is_irreducible(bad_clique()));
    Structure loop(graph_language(), 1);
    loop.add("E", {0, 0});
    CHECK(is_irreducible(loop));
    // a ternary tuple covers all three pairs
    Structure h(Language({{"H", 3}}), 3);
    h.add("H", {0, 1, 2});
    CHECK(is_irreducible(h));
    Structure hh(Language({{"H", 3}}), 3);
    hh.add("H", {0, 0, 1});
    CHECK_FALSE(is_irreducible(hh));
}

TEST_CASE("family membership")
{
    auto k = graph_family({complete_graph(3)});
    CHECK(family_member(k, path_graph(3)));
    CHECK(family_member(k, complete_graph(2)));
    CHECK_FALSE(family_member(k, complete_graph(3)));
    Structure arc(graph_language(), 2);
    arc.add("E", {0, 1});
    CHECK_FALSE(family_member(k, arc));
    CHECK(k.reducible_members().empty());

    auto mono = bad_clique_family();
    CHECK_FALSE(family_member(mono, bad_clique()));
    Structure more = bad_clique();
    more.add("E", {0, 1});
    CHECK_FALSE(family_member(mono, more));
    Structure less = bad_clique();
    less.remove(1, {0, 2, 3});
    CHECK(family_member(mono, less));
}

TEST_CASE("the forbidden structure document matches the listed tuples")
{
    auto f = fixture("bad_clique");
    CHECK(f == bad_clique());
    CHECK(f.tuples(0) == std::set<Tuple>{{1, 0}, {1, 2}, {1, 3}});
    CHECK(f.tuples(1) == std::set<Tuple>{{0, 2, 3}});
}

TEST_CASE("family membership is hereditary on random substructures")
{
    std::mt19937_64 rng(seed() + 1);
    auto k = graph_family({complete_graph(3)});
    for (int trial = 0; trial < 40; ++trial) {
        auto g = random_graph(rng, 5, 0.35);
        if (!family_member(k, g))
            continue;
        for (int drop = 0; drop < g.size(); ++drop) {
            std::vector<int> keep;
            for (int v = 0; v < g.size(); ++v)
                if (v != drop)
                    keep.push_back(v);
            CHECK(family_member(k, induced_substructure(g, keep)));
        }
    }
}
