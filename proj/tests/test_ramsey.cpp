#include "support.hpp"

#include <catch_amalgamated.hpp>

using namespace typeamalg;
using namespace testing_support;

namespace {

/// Exhaustive search for a colouring of `n` points using more than l colours on every edge.
bool oracle_bad_exists(std::size_t n, const std::vector<std::vector<int>> & edges, int k, int l)
{
    std::vector<int> colour(n, 0);
    while (true) {
        bool bad = std::all_of(edges.begin(), edges.end(), [&](const std::vector<int> & e) {
            std::set<int> used;
            for (int i : e)
                used.insert(colour[static_cast<std::size_t>(i)]);
            return static_cast<int>(used.size()) > l;
        });
        if (bad)
            return true;
        std::size_t i = n;
        while (i > 0 && ++colour[i - 1] == k)
            colour[--i] = 0;
        if (i == 0)
            return false;
    }
}

Structure edgeless(int n) { return graph(n, {}); }

} // namespace

TEST_CASE("the classical Ramsey number R(3,3)")
{
    auto k2 = complete_graph(2), k3 = complete_graph(3);
    auto six = arrows(complete_graph(6), k3, k2, 2, 1);
    CHECK(six.holds);
    CHECK_FALSE(six.witness_coloring.has_value());
    CHECK(six.domain_size == 15);
    CHECK(six.copies == 20);

    auto five = arrows(complete_graph(5), k3, k2, 2, 1);
    CHECK_FALSE(five.holds);
    REQUIRE(five.witness_coloring.has_value());
    CHECK(coloring_defeats(*five.witness_coloring, complete_graph(5), k3, k2, 1));
    // the only 2-colouring of K5 without monochromatic triangles is two pentagons
    std::vector<int> degree(5, 0);
    const auto & w = *five.witness_coloring;
    for (std::size_t i = 0; i < w.domain.size(); ++i)
        if (w.assignment[i] == 0) {
            ++degree[static_cast<std::size_t>(w.domain[i][0])];
            ++degree[static_cast<std::size_t>(w.domain[i][1])];
        }
    CHECK(std::all_of(degree.begin(), degree.end(), [](int d) { return d == 2; }));
}

TEST_CASE("arrows agree with exhaustive colouring")
{
    std::mt19937_64 rng(seed() + 30);
    std::vector<Structure> small{complete_graph(1), complete_graph(2), edgeless(2), path_graph(3), complete_graph(3)};
    for (int trial = 0; trial < 60; ++trial) {
        auto c = random_graph(rng, 4 + trial % 2, 0.5);
        const auto & b = small[1 + rng() % 4];
        const auto & a = small[rng() % 3];
        int k = 2 + static_cast<int>(rng() % 2);
        int l = 1 + static_cast<int>(rng() % 2);
        if (enumerate_embeddings(a, c).size() > 10)
            continue;
        INFO("seed " << seed() << " trial " << trial);
        auto got = arrows(c, b, a, k, l);
        auto oracle = oracle_bad_colouring(c, b, a, k, l);
        CHECK(got.holds == !oracle.has_value());
        if (!got.holds) {
            REQUIRE(got.witness_coloring.has_value());
            CHECK(coloring_defeats(*got.witness_coloring, c, b, a, l));
        }
        ArrowConfig plain;
        plain.symmetry = false;
        CHECK(arrows(c, b, a, k, l, plain).holds == got.holds);
    }
}

TEST_CASE("arrows are monotone in l and k")
{
    std::mt19937_64 rng(seed() + 31);
    for (int trial = 0; trial < 20; ++trial) {
        auto c = random_graph(rng, 5, 0.6);
        auto b = complete_graph(3), a = complete_graph(2);
        bool prev = false;
        for (int l = 0; l <= 3; ++l) {
            bool now = arrows(c, b, a, 2, l).holds;
            CHECK((!prev || now));
            prev = now;
        }
        if (arrows(c, b, a, 3, 1).holds)
            CHECK(arrows(c, b, a, 2, 1).holds);
    }
}

TEST_CASE("degenerate arrow relations")
{
    // l at least the number of copies of A in B
    CHECK(arrows(complete_graph(4), complete_graph(3), complete_graph(2), 5, 3).holds);
    // no copy of B at all
    CHECK_FALSE(arrows(complete_graph(2), complete_graph(3), complete_graph(1), 2, 1).holds);
    // A does not embed in B: every copy of B is trivially fine
    CHECK(arrows(path_graph(3), edgeless(2), complete_graph(2), 2, 0).holds);
    CHECK(arrows(complete_graph(3), complete_graph(3), complete_graph(1), 1, 1).holds);
    CHECK_THROWS_AS(arrows(complete_graph(3), complete_graph(3), complete_graph(1), 0, 1), InputError);
    CHECK_THROWS_AS(arrows(complete_graph(3), complete_graph(3), complete_graph(1), 2, -1), InputError);
}

TEST_CASE("the arrow search refuses past its budget")
{
    ArrowConfig tiny;
    tiny.budget = 10;
    CHECK_THROWS_AS(arrows(complete_graph(6), complete_graph(3), complete_graph(2), 2, 1, tiny), BudgetExceeded);
}

TEST_CASE("parallel search returns the sequential witness")
{
    ArrowConfig many;
    many.jobs = 4;
    auto one = arrows(complete_graph(5), complete_graph(3), complete_graph(2), 2, 1);
    auto four = arrows(complete_graph(5), complete_graph(3), complete_graph(2), 2, 1, many);
    REQUIRE(one.witness_coloring.has_value());
    REQUIRE(four.witness_coloring.has_value());
    CHECK(one.witness_coloring->assignment == four.witness_coloring->assignment);
    CHECK(arrows(complete_graph(6), complete_graph(3), complete_graph(2), 2, 1, many).holds);
}

TEST_CASE("finite degrees")
{
    CHECK(finite_degree(complete_graph(3), complete_graph(1), 3) == 3);
    CHECK(finite_degree(edgeless(3), complete_graph(1), 2) == 2);
    CHECK(finite_degree(complete_graph(3), complete_graph(1), 1) == 1);
    std::mt19937_64 rng(seed() + 32);
    for (int trial = 0; trial < 10; ++trial) {
        auto c = random_graph(rng, 4, 0.5);
        int d = finite_degree(c, complete_graph(1), 2);
        CHECK(d >= 1);
        CHECK(d <= 2);
        CHECK(arrows(c, c, complete_graph(1), 2, d).holds);
        CHECK_FALSE(arrows(c, c, complete_graph(1), 2, d - 1).holds);
    }
}

TEST_CASE("colouring by meet-closure shape")
{
    auto pure = sierpinski_coloring(edgeless(5), edgeless(2));
    CHECK(pure.domain.size() == 10);
    CHECK(pure.color_count == 1);
    auto complete = sierpinski_coloring(complete_graph(5), complete_graph(2));
    CHECK(complete.color_count == 1);

    std::mt19937_64 rng(seed() + 33);
    for (int trial = 0; trial < 20; ++trial) {
        auto u = random_graph(rng, 6, 0.5);
        auto col = sierpinski_coloring(u, complete_graph(2));
        CHECK(col.assignment.size() == col.domain.size());
        CHECK(static_cast<int>(col.labels.size()) == col.color_count);
        for (std::size_t i = 0; i < col.domain.size(); ++i) {
            CHECK(col.assignment[i] < col.color_count);
            CHECK(col.labels[static_cast<std::size_t>(col.assignment[i])] == meet_closure_shape(u, col.domain[i]).str());
        }
    }
    auto empty = sierpinski_coloring(complete_graph(3), Structure(graph_language(), 0));
    CHECK(empty.color_count == 1);
}

TEST_CASE("type-respecting arrows agree with an exhaustive search over admissible copies")
{
    auto k = graph_family({complete_graph(3)});
    std::mt19937_64 rng(seed() + 34);
    int conclusive = 0;
    for (int trial = 0; trial < 12; ++trial) {
        auto c = random_graph(rng, 5, 0.35);
        if (!family_member(k, c))
            continue;
        auto a = complete_graph(1);
        auto b = trial % 2 ? complete_graph(2) : edgeless(2);
        auto out = arrows_type_respecting(c, b, a, 2, 1, k, 2);
        if (out.outcome.verdict == Verdict::Inconclusive)
            continue;
        ++conclusive;
        std::vector<VertexMap> domain;
        for (const auto & e : enumerate_embeddings(a, c)) {
            auto induced = induced_plus_map(c, a, e);
            if (induced && is_family_type_respecting(*induced, k, 2).verdict == Verdict::Holds)
                domain.push_back(e);
        }
        CHECK(out.domain == domain);
        std::vector<std::vector<int>> edges;
        for (const auto & f : enumerate_embeddings(b, c)) {
            if (!is_type_respecting(b, c, f))
                continue;
            std::vector<int> edge;
            for (const auto & inner : enumerate_embeddings(a, b)) {
                auto it = std::find(domain.begin(), domain.end(), map_tuple(inner, f));
                if (it != domain.end())
                    edge.push_back(static_cast<int>(it - domain.begin()));
            }
            edges.push_back(edge);
        }
        INFO("seed " << seed() << " trial " << trial);
        CHECK((out.outcome.verdict == Verdict::Fails) == oracle_bad_exists(domain.size(), edges, 2, 1));
    }
    CHECK(conclusive > 0);
}

TEST_CASE("type-respecting arrows in trivial cases")
{
    auto k = graph_family({});
    auto out = arrows_type_respecting(complete_graph(3), complete_graph(1), complete_graph(1), 1, 1, k, 2);
    CHECK(out.outcome.verdict == Verdict::Holds);
    auto strict = arrows_type_respecting(complete_graph(3), complete_graph(1), complete_graph(1), 1, 1, k, 2, true);
    CHECK(strict.copies <= out.copies);
    CHECK_THROWS_AS(arrows_type_respecting(complete_graph(3), complete_graph(1), complete_graph(1), 1, 1,
                                           graph_family({complete_graph(3)}), 2),
                    InputError);
}
