#pragma once

// Seeded generators, fixture loading and brute-force oracles shared by the test programs.
// The oracles deliberately avoid the library's search code.

#include "typeamalg/typeamalg.hpp"

#include <cstdlib>
#include <iostream>
#include <random>

namespace testing_support {

using namespace typeamalg;

/// Seed from TYPEAMALG_SEED, else the given default.
inline std::uint64_t seed(std::uint64_t fallback = 20240611)
{
    if (const char * env = std::getenv("TYPEAMALG_SEED"))
        return std::strtoull(env, nullptr, 10);
    return fallback;
}

inline Structure fixture(const std::string & name)
{
    std::string path = std::string(TYPEAMALG_FIXTURES) + "/" + name + ".json";
    return structure_from_json(read_json_file(path), path);
}

inline HereditaryFamily family_fixture(const std::string & name)
{
    std::string path = std::string(TYPEAMALG_FIXTURES) + "/" + name + ".json";
    return family_from_json(read_json_file(path), path);
}

inline Structure random_structure(std::mt19937_64 & rng, const Language & lang, int n, double density = 0.3)
{
    std::bernoulli_distribution coin(density);
    Structure s(lang, n);
    for (std::size_t r = 0; r < lang.size(); ++r)
        for_each_tuple(lang[r].arity, n, [&](const Tuple & t) {
            if (coin(rng))
                s.add(r, t);
        });
    return s;
}

inline Structure random_graph(std::mt19937_64 & rng, int n, double density = 0.5)
{
    std::bernoulli_distribution coin(density);
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (coin(rng))
                edges.emplace_back(i, j);
    return graph(n, edges);
}

/// A random language with symbols of arity 1..max_arity, at least one of the maximal arity.
inline Language random_language(std::mt19937_64 & rng, int max_arity)
{
    std::uniform_int_distribution<int> extra(0, 2);
    std::uniform_int_distribution<int> arity(1, max_arity);
    std::vector<Relation> rels{{"R0", max_arity}};
    int more = extra(rng);
    for (int i = 1; i <= more; ++i)
        rels.push_back({"R" + std::to_string(i), arity(rng)});
    return Language(rels);
}

// ---- oracles ----

/// Direct tuple-by-tuple check that m is an injective, order-preserving embedding.
inline bool oracle_is_embedding(const Structure & a, const Structure & b, const std::vector<int> & m, bool monotone = true)
{
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = i + 1; j < m.size(); ++j)
            if (m[i] == m[j] || (monotone && m[i] > m[j]))
                return false;
    for (std::size_t r = 0; r < a.language().size(); ++r) {
        bool ok = true;
        for_each_tuple(a.language()[r].arity, a.size(), [&](const Tuple & t) {
            Tuple img;
            for (int x : t)
                img.push_back(m[static_cast<std::size_t>(x)]);
            if (a.has(r, t) != b.has(r, img))
                ok = false;
        });
        if (!ok)
            return false;
    }
    return true;
}

/// Embeddings by filtering all increasing index sequences.
inline std::vector<std::vector<int>> oracle_embeddings(const Structure & a, const Structure & b)
{
    std::vector<std::vector<int>> out;
    int n = a.size(), m = b.size();
    if (n > m)
        return out;
    std::vector<bool> pick(static_cast<std::size_t>(m), false);
    std::fill(pick.begin(), pick.begin() + n, true);
    do {
        std::vector<int> map;
        for (int i = 0; i < m; ++i)
            if (pick[static_cast<std::size_t>(i)])
                map.push_back(i);
        if (oracle_is_embedding(a, b, map))
            out.push_back(map);
    } while (std::prev_permutation(pick.begin(), pick.end()));
    std::sort(out.begin(), out.end());
    return out;
}

/// u ~_n v iff swapping them is an isomorphism of the substructures on {0..n-1, u} and {0..n-1, v}.
inline bool oracle_same_type(const Structure & s, int u, int v, int n)
{
    std::vector<int> left, right;
    for (int i = 0; i < n; ++i) {
        left.push_back(i);
        right.push_back(i);
    }
    left.push_back(u);
    right.push_back(v);
    for (std::size_t r = 0; r < s.language().size(); ++r) {
        bool ok = true;
        for_each_tuple(s.language()[r].arity, n + 1, [&](const Tuple & t) {
            Tuple x, y;
            for (int i : t) {
                x.push_back(left[static_cast<std::size_t>(i)]);
                y.push_back(right[static_cast<std::size_t>(i)]);
            }
            if (s.has(r, x) != s.has(r, y))
                ok = false;
        });
        if (!ok)
            return false;
    }
    return true;
}

inline int oracle_class_count(const Structure & s, int n)
{
    std::vector<int> reps;
    for (int v = n; v < s.size(); ++v) {
        bool fresh = true;
        for (int r : reps)
            if (oracle_same_type(s, r, v, n))
                fresh = false;
        if (fresh)
            reps.push_back(v);
    }
    return static_cast<int>(reps.size());
}

/// Number of admissible patterns over `level` base vertices, from the definition: tuples over
/// base vertices and t_0..t_{w-1} with some base vertex whose type indices form {0..k-1}, k >= 1.
inline std::size_t oracle_admissible_count(const Language & lang, int level)
{
    int w = std::max(0, lang.max_arity() - 1);
    std::size_t count = 0;
    for (std::size_t r = 0; r < lang.size(); ++r)
        for_each_tuple(lang[r].arity, level + w, [&](const Tuple & t) {
            std::set<int> types;
            bool base = false;
            for (int x : t) {
                if (x < level)
                    base = true;
                else
                    types.insert(x - level);
            }
            if (base && !types.empty() && *types.rbegin() + 1 == static_cast<int>(types.size()))
                ++count;
        });
    return count;
}

/// Plus-structure size by quotienting all weak types under agreement at each depth.
inline std::size_t oracle_plus_size(const Structure & base)
{
    auto all = enumerate_weak_types(base);
    int w = type_width(base.language());
    std::size_t total = static_cast<std::size_t>(base.size());
    for (int d = 1; d <= w; ++d) {
        std::vector<const WeakType *> reps;
        for (const auto & t : all) {
            bool fresh = true;
            for (const auto * r : reps)
                if (agree_as_n_types(*r, t, d))
                    fresh = false;
            if (fresh)
                reps.push_back(&t);
        }
        total += reps.size();
    }
    return total;
}

/// Colourings as base-k integers, no symmetry reduction and no pruning.
inline std::optional<std::vector<int>> oracle_bad_colouring(const Structure & c, const Structure & b, const Structure & a, int k, int l)
{
    auto domain = oracle_embeddings(a, c);
    auto copies = oracle_embeddings(b, c);
    auto inner = oracle_embeddings(a, b);
    std::vector<std::vector<int>> edges;
    for (const auto & f : copies) {
        std::vector<int> e;
        for (const auto & g : inner) {
            std::vector<int> comp;
            for (int x : g)
                comp.push_back(f[static_cast<std::size_t>(x)]);
            e.push_back(static_cast<int>(std::find(domain.begin(), domain.end(), comp) - domain.begin()));
        }
        edges.push_back(e);
    }
    std::vector<int> colour(domain.size(), 0);
    while (true) {
        bool bad = true;
        for (const auto & e : edges) {
            std::set<int> used;
            for (int i : e)
                used.insert(colour[static_cast<std::size_t>(i)]);
            if (static_cast<int>(used.size()) <= l)
                bad = false;
        }
        if (bad)
            return colour;
        std::size_t i = colour.size();
        while (i > 0 && ++colour[i - 1] == k)
            colour[--i] = 0;
        if (i == 0)
            return std::nullopt;
    }
}

} // namespace testing_support
