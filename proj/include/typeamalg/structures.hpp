#pragma once

// Finite enumerated relational structures: vertex set {0..n-1}, the linear order is the
// numeric order and is never stored. Embeddings are always monotone.

#include "typeamalg/error.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace typeamalg {

inline constexpr int kDefaultMaxVertices = 64;

using Tuple = std::vector<int>;
using VertexMap = std::vector<int>;

struct Relation {
    std::string name;
    int arity = 1;

    friend bool operator==(const Relation &, const Relation &) = default;
    friend auto operator<=>(const Relation &, const Relation &) = default;
};

class Language {
public:
    Language() = default;

    explicit Language(std::vector<Relation> relations) : relations_(std::move(relations))
    {
        for (std::size_t i = 0; i < relations_.size(); ++i) {
            if (relations_[i].arity < 1)
                throw InputError("relation '" + relations_[i].name + "' has arity < 1");
            if (relations_[i].name.empty())
                throw InputError("relation with empty name");
            for (std::size_t j = 0; j < i; ++j)
                if (relations_[j].name == relations_[i].name)
                    throw InputError("duplicate relation name '" + relations_[i].name + "'");
        }
    }

    [[nodiscard]] std::size_t size() const { return relations_.size(); }
    [[nodiscard]] const Relation & operator[](std::size_t r) const { return relations_.at(r); }
    [[nodiscard]] const std::vector<Relation> & relations() const { return relations_; }

    [[nodiscard]] std::optional<std::size_t> index_of(const std::string & name) const
    {
        for (std::size_t r = 0; r < relations_.size(); ++r)
            if (relations_[r].name == name)
                return r;
        return std::nullopt;
    }

    [[nodiscard]] int max_arity() const
    {
        int m = 0;
        for (const auto & rel : relations_)
            m = std::max(m, rel.arity);
        return m;
    }

    friend bool operator==(const Language &, const Language &) = default;

private:
    std::vector<Relation> relations_;
};

/// Calls fn(tuple) for every tuple in {0..n-1}^arity, in lexicographic order.
inline void for_each_tuple(int arity, int n, const std::function<void(const Tuple &)> & fn)
{
    if (n <= 0)
        return;
    Tuple t(static_cast<std::size_t>(arity), 0);
    while (true) {
        fn(t);
        int pos = arity - 1;
        while (pos >= 0 && t[static_cast<std::size_t>(pos)] == n - 1) {
            t[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0)
            return;
        ++t[static_cast<std::size_t>(pos)];
    }
}

class Structure {
public:
    Structure() = default;

    Structure(Language language, int size) : language_(std::move(language)), size_(size), tuples_(language_.size())
    {
        if (size < 0)
            throw InputError("structure size must be non-negative");
    }

    [[nodiscard]] const Language & language() const { return language_; }
    [[nodiscard]] int size() const { return size_; }
    [[nodiscard]] const std::set<Tuple> & tuples(std::size_t r) const { return tuples_.at(r); }

    [[nodiscard]] bool has(std::size_t r, const Tuple & t) const { return tuples_.at(r).contains(t); }

    [[nodiscard]] std::size_t tuple_count() const
    {
        std::size_t c = 0;
        for (const auto & s : tuples_)
            c += s.size();
        return c;
    }

    /// Adds a tuple after validating arity and range; duplicates are ignored.
    Structure & add(std::size_t r, Tuple t)
    {
        if (r >= tuples_.size())
            throw InputError("relation index out of range");
        if (static_cast<int>(t.size()) != language_[r].arity)
            throw InputError("tuple length does not match arity of '" + language_[r].name + "'");
        for (int v : t)
            if (v < 0 || v >= size_)
                throw InputError("tuple entry " + std::to_string(v) + " out of range for '" + language_[r].name +
                                 "' in a structure of size " + std::to_string(size_));
        tuples_[r].insert(std::move(t));
        return *this;
    }

    Structure & add(const std::string & name, Tuple t)
    {
        auto r = language_.index_of(name);
        if (!r)
            throw InputError("unknown relation symbol '" + name + "'");
        return add(*r, std::move(t));
    }

    Structure & remove(std::size_t r, const Tuple & t)
    {
        tuples_.at(r).erase(t);
        return *this;
    }

    friend bool operator==(const Structure &, const Structure &) = default;

    friend bool operator<(const Structure & a, const Structure & b)
    {
        if (a.size_ != b.size_)
            return a.size_ < b.size_;
        return a.tuples_ < b.tuples_;
    }

private:
    Language language_;
    int size_ = 0;
    std::vector<std::set<Tuple>> tuples_;
};

inline void require_same_language(const Structure & a, const Structure & b)
{
    if (!(a.language() == b.language()))
        throw InputError("structures are over different languages");
}

inline void require_increasing(const std::vector<int> & vs, int bound, const char * what)
{
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (vs[i] < 0 || vs[i] >= bound)
            throw InputError(std::string(what) + ": vertex " + std::to_string(vs[i]) + " out of range");
        if (i > 0 && vs[i - 1] >= vs[i])
            throw InputError(std::string(what) + ": vertex list is not strictly increasing");
    }
}

/// Vertex i of the result corresponds to vertices[i].
inline Structure induced_substructure(const Structure & s, const std::vector<int> & vertices)
{
    require_increasing(vertices, s.size(), "induced_substructure");
    Structure out(s.language(), static_cast<int>(vertices.size()));
    std::vector<int> inverse(static_cast<std::size_t>(s.size()), -1);
    for (std::size_t i = 0; i < vertices.size(); ++i)
        inverse[static_cast<std::size_t>(vertices[i])] = static_cast<int>(i);
    for (std::size_t r = 0; r < s.language().size(); ++r)
        for (const auto & t : s.tuples(r)) {
            Tuple image;
            image.reserve(t.size());
            bool inside = true;
            for (int v : t) {
                int w = inverse[static_cast<std::size_t>(v)];
                if (w < 0) {
                    inside = false;
                    break;
                }
                image.push_back(w);
            }
            if (inside)
                out.add(r, std::move(image));
        }
    return out;
}

/// The structure A(<v) induced on {0..v-1}.
inline Structure initial_segment(const Structure & a, int v)
{
    if (v < 0 || v > a.size())
        throw InputError("initial_segment: cut point " + std::to_string(v) + " out of range");
    std::vector<int> vs(static_cast<std::size_t>(v));
    std::iota(vs.begin(), vs.end(), 0);
    return induced_substructure(a, vs);
}

inline Tuple map_tuple(const Tuple & t, const VertexMap & m)
{
    Tuple out;
    out.reserve(t.size());
    for (int v : t)
        out.push_back(m[static_cast<std::size_t>(v)]);
    return out;
}

/// Checks that m is a monotone map A -> B preserving and reflecting every relation.
inline bool is_embedding(const Structure & a, const Structure & b, const VertexMap & m)
{
    if (static_cast<int>(m.size()) != a.size())
        return false;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i] < 0 || m[i] >= b.size())
            return false;
        if (i > 0 && m[i - 1] >= m[i])
            return false;
    }
    bool ok = true;
    for (std::size_t r = 0; r < a.language().size() && ok; ++r)
        for_each_tuple(a.language()[r].arity, a.size(), [&](const Tuple & t) {
            if (ok && a.has(r, t) != b.has(r, map_tuple(t, m)))
                ok = false;
        });
    return ok;
}

namespace detail {

    enum class MapKind { Embedding, Monomorphism, OrderedMonomorphism };

    // Backtracking over maps source -> target. Vertices are assigned in order 0..n-1; every
    // tuple whose largest entry is the newly assigned vertex is checked immediately.
    class MapSearch {
    public:
        MapSearch(const Structure & src, const Structure & dst, MapKind kind) : src_(src), dst_(dst), kind_(kind)
        {
            by_max_.resize(static_cast<std::size_t>(src.size()));
            for (std::size_t r = 0; r < src.language().size(); ++r)
                if (kind_ == MapKind::Embedding) {
                    for_each_tuple(src.language()[r].arity, src.size(), [&](const Tuple & t) {
                        int mx = *std::max_element(t.begin(), t.end());
                        by_max_[static_cast<std::size_t>(mx)].push_back({r, t, src.has(r, t)});
                    });
                }
                else {
                    for (const auto & t : src.tuples(r)) {
                        int mx = *std::max_element(t.begin(), t.end());
                        by_max_[static_cast<std::size_t>(mx)].push_back({r, t, true});
                    }
                }
        }

        // Visits maps in lexicographic order; the visitor returns false to stop.
        void run(const std::function<bool(const VertexMap &)> & visit)
        {
            map_.assign(static_cast<std::size_t>(src_.size()), -1);
            used_.assign(static_cast<std::size_t>(dst_.size()), false);
            stop_ = false;
            extend(0, visit);
        }

    private:
        struct Check {
            std::size_t r;
            Tuple t;
            bool present;
        };

        bool consistent(int v) const
        {
            for (const auto & c : by_max_[static_cast<std::size_t>(v)]) {
                bool img = dst_.has(c.r, map_tuple(c.t, map_));
                if (kind_ == MapKind::Embedding ? img != c.present : !img)
                    return false;
            }
            return true;
        }

        void extend(int v, const std::function<bool(const VertexMap &)> & visit)
        {
            if (stop_)
                return;
            if (v == src_.size()) {
                if (!visit(map_))
                    stop_ = true;
                return;
            }
            bool monotone = kind_ != MapKind::Monomorphism;
            int lo = (monotone && v > 0) ? map_[static_cast<std::size_t>(v - 1)] + 1 : 0;
            // leave room for the remaining vertices when monotone
            int hi = monotone ? dst_.size() - (src_.size() - v) : dst_.size() - 1;
            for (int w = lo; w <= hi && !stop_; ++w) {
                if (used_[static_cast<std::size_t>(w)])
                    continue;
                map_[static_cast<std::size_t>(v)] = w;
                used_[static_cast<std::size_t>(w)] = true;
                if (consistent(v))
                    extend(v + 1, visit);
                used_[static_cast<std::size_t>(w)] = false;
            }
            map_[static_cast<std::size_t>(v)] = -1;
        }

        const Structure & src_;
        const Structure & dst_;
        MapKind kind_;
        std::vector<std::vector<Check>> by_max_;
        VertexMap map_;
        std::vector<bool> used_;
        bool stop_ = false;
    };

} // namespace detail

/// All monotone embeddings A -> B in lexicographic order of their vertex maps.
inline std::vector<VertexMap> enumerate_embeddings(const Structure & a, const Structure & b)
{
    require_same_language(a, b);
    std::vector<VertexMap> out;
    detail::MapSearch(a, b, detail::MapKind::Embedding).run([&](const VertexMap & m) {
        out.push_back(m);
        return true;
    });
    return out;
}

inline std::optional<VertexMap> find_embedding(const Structure & a, const Structure & b)
{
    require_same_language(a, b);
    std::optional<VertexMap> found;
    detail::MapSearch(a, b, detail::MapKind::Embedding).run([&](const VertexMap & m) {
        found = m;
        return false;
    });
    return found;
}

/// Injective maps that carry every tuple of A into B (tuples are not reflected).
/// With ordered = true the map must also be monotone.
inline std::optional<VertexMap> find_monomorphism(const Structure & a, const Structure & b, bool ordered)
{
    require_same_language(a, b);
    std::optional<VertexMap> found;
    auto kind = ordered ? detail::MapKind::OrderedMonomorphism : detail::MapKind::Monomorphism;
    detail::MapSearch(a, b, kind).run([&](const VertexMap & m) {
        found = m;
        return false;
    });
    return found;
}

/// Every pair u, v of vertices co-occurs in some tuple. The pair u = v is included unless
/// distinct_only is set, so an isolated vertex makes a structure reducible.
inline bool is_irreducible(const Structure & a, bool distinct_only = false)
{
    const auto n = static_cast<std::size_t>(a.size());
    std::vector<std::vector<bool>> covered(n, std::vector<bool>(n, false));
    for (std::size_t r = 0; r < a.language().size(); ++r)
        for (const auto & t : a.tuples(r))
            for (int u : t)
                for (int v : t)
                    covered[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = true;
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = u; v < n; ++v) {
            if (u == v && distinct_only)
                continue;
            if (!covered[u][v])
                return false;
        }
    return true;
}

enum class FamilyMode { Embedding, Monomorphism };

/// The hereditary class of structures admitting no embedding (or monomorphism) from any
/// forbidden structure. Monomorphisms are injective and relation-preserving; when
/// `ordered` is set (the default) they must also preserve the vertex order.
struct HereditaryFamily {
    Language language;
    std::vector<Structure> forbidden;
    FamilyMode mode = FamilyMode::Embedding;
    bool ordered = true;

    [[nodiscard]] int max_forbidden_size() const
    {
        int m = 0;
        for (const auto & f : forbidden)
            m = std::max(m, f.size());
        return m;
    }

    /// Names of forbidden structures that are not irreducible; empty when the family is clean.
    [[nodiscard]] std::vector<std::size_t> reducible_members() const
    {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < forbidden.size(); ++i)
            if (!is_irreducible(forbidden[i]))
                out.push_back(i);
        return out;
    }
};

inline bool family_member(const HereditaryFamily & k, const Structure & a)
{
    if (!(a.language() == k.language))
        throw InputError("structure language differs from the family language");
    for (const auto & f : k.forbidden) {
        if (f.size() > a.size())
            continue;
        bool hit = k.mode == FamilyMode::Embedding ? find_embedding(f, a).has_value()
                                                   : find_monomorphism(f, a, k.ordered).has_value();
        if (hit)
            return false;
    }
    return true;
}

// Small constructors used throughout the tests and fixtures.

inline Language graph_language() { return Language({{"E", 2}}); }

/// Undirected graph encoded with both orientations of every edge.
inline Structure graph(int n, const std::vector<std::pair<int, int>> & edges, const Language & lang = graph_language())
{
    Structure s(lang, n);
    for (auto [u, v] : edges) {
        s.add(0, {u, v});
        s.add(0, {v, u});
    }
    return s;
}

inline Structure complete_graph(int n, const Language & lang = graph_language())
{
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            edges.emplace_back(u, v);
    return graph(n, edges, lang);
}

inline Structure path_graph(int n, const Language & lang = graph_language())
{
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u + 1 < n; ++u)
        edges.emplace_back(u, u + 1);
    return graph(n, edges, lang);
}

/// The forbidden family {K_n} read inside undirected loopless graphs: loops and
/// one-directional arcs are forbidden too, so members are exactly the K_n-free graphs.
inline HereditaryFamily graph_family(const std::vector<Structure> & forbidden_graphs, const Language & lang = graph_language())
{
    HereditaryFamily k{lang, {}, FamilyMode::Embedding, true};
    Structure loop(lang, 1);
    loop.add(0, {0, 0});
    Structure forward(lang, 2);
    forward.add(0, {0, 1});
    Structure backward(lang, 2);
    backward.add(0, {1, 0});
    k.forbidden = {loop, forward, backward};
    for (const auto & f : forbidden_graphs)
        k.forbidden.push_back(f);
    return k;
}

} // namespace typeamalg
