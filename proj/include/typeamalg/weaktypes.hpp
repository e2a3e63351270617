#pragma once

// Weak types, their restrictions ("agree as n-types") and the plus-structure A+.
//
// Type vertices t0, t1, ... are encoded as negative integers: t_i == -1 - i. A pattern is a
// relation tuple over base vertices and type vertices. A node of A+ at depth d is identified
// by the set of all patterns of a weak type that only use t0..t_{d-1}; the parent of a node is
// its restriction to depth d-1. Because nodes are values, plus-structures never need to be
// materialized in full: maps between them are rules on nodes.

#include "typeamalg/structures.hpp"

#include <map>
#include <mutex>
#include <tuple>

namespace typeamalg {

inline constexpr int type_vertex(int i) { return -1 - i; }
inline constexpr bool is_type_vertex(int x) { return x < 0; }
inline constexpr int type_index(int x) { return -1 - x; }

struct WeakTypeOptions {
    /// Admit patterns such as (0, t0, t0) in which a type vertex repeats.
    bool allow_repeated_type_vertices = true;
};

inline WeakTypeOptions & weak_type_options()
{
    static WeakTypeOptions options;
    return options;
}

/// Number of retained type vertices: maxArity - 1, or 0 for languages without a relation of arity >= 2.
inline int type_width(const Language & lang) { return std::max(0, lang.max_arity() - 1); }

using Pattern = std::pair<std::size_t, Tuple>;
using PatternSet = std::set<Pattern>;

/// 0 for a pure base tuple, otherwise one more than the largest type index used.
inline int pattern_depth(const Tuple & t)
{
    int d = 0;
    for (int x : t)
        if (is_type_vertex(x))
            d = std::max(d, type_index(x) + 1);
    return d;
}

/// Type vertices form a nonempty initial segment {t0..t_{k-1}} and at least one base vertex occurs.
inline bool is_admissible(const Tuple & t, bool allow_repeated = weak_type_options().allow_repeated_type_vertices)
{
    bool has_base = false;
    std::vector<int> seen;
    for (int x : t) {
        if (is_type_vertex(x))
            seen.push_back(type_index(x));
        else
            has_base = true;
    }
    if (!has_base || seen.empty())
        return false;
    std::sort(seen.begin(), seen.end());
    if (!allow_repeated && std::adjacent_find(seen.begin(), seen.end()) != seen.end())
        return false;
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    return seen.back() + 1 == static_cast<int>(seen.size());
}

/// Admissible patterns over a base of `level` vertices, grouped by depth 1..width.
/// by_depth[d] holds the patterns of depth exactly d (index 0 is unused).
struct PatternUniverse {
    int level = 0;
    int width = 0;
    std::vector<std::vector<Pattern>> by_depth;

    [[nodiscard]] std::size_t count_up_to(int depth) const
    {
        std::size_t c = 0;
        for (int d = 1; d <= depth && d < static_cast<int>(by_depth.size()); ++d)
            c += by_depth[static_cast<std::size_t>(d)].size();
        return c;
    }
};

inline const PatternUniverse & admissible_patterns(const Language & lang, int level)
{
    using Key = std::tuple<std::vector<Relation>, int, bool>;
    static std::map<Key, PatternUniverse> cache;
    static std::mutex guard;
    bool allow_repeated = weak_type_options().allow_repeated_type_vertices;
    Key key{lang.relations(), level, allow_repeated};
    std::lock_guard lock(guard);
    auto it = cache.find(key);
    if (it != cache.end())
        return it->second;

    PatternUniverse u;
    u.level = level;
    u.width = type_width(lang);
    u.by_depth.resize(static_cast<std::size_t>(u.width) + 1);
    int symbols = level + u.width;
    for (std::size_t r = 0; r < lang.size(); ++r)
        for_each_tuple(lang[r].arity, symbols, [&](const Tuple & raw) {
            Tuple t = raw;
            for (int & x : t)
                if (x >= level)
                    x = type_vertex(x - level);
            if (is_admissible(t, allow_repeated))
                u.by_depth[static_cast<std::size_t>(pattern_depth(t))].emplace_back(r, t);
        });
    for (auto & v : u.by_depth)
        std::sort(v.begin(), v.end());
    return cache.emplace(key, std::move(u)).first->second;
}

/// A node of a plus-structure: depth d and every pattern using only t0..t_{d-1}.
struct PlusNode {
    int depth = 0;
    PatternSet data;

    [[nodiscard]] PlusNode restrict_to(int d) const
    {
        PlusNode out{std::min(d, depth), {}};
        for (const auto & p : data)
            if (pattern_depth(p.second) <= out.depth)
                out.data.insert(p);
        return out;
    }

    [[nodiscard]] PlusNode parent() const { return depth == 0 ? *this : restrict_to(depth - 1); }

    /// Patterns introduced at this depth.
    [[nodiscard]] PatternSet fresh() const
    {
        PatternSet out;
        for (const auto & p : data)
            if (pattern_depth(p.second) == depth)
                out.insert(p);
        return out;
    }

    friend auto operator<=>(const PlusNode &, const PlusNode &) = default;
    friend bool operator==(const PlusNode &, const PlusNode &) = default;
};

struct WeakType {
    Structure base;
    int width = 0;
    PatternSet mixed;

    [[nodiscard]] int level() const { return base.size(); }
    [[nodiscard]] PlusNode restrict_to(int depth) const
    {
        PlusNode out{std::min(depth, width), {}};
        for (const auto & p : mixed)
            if (pattern_depth(p.second) <= out.depth)
                out.data.insert(p);
        return out;
    }
    [[nodiscard]] PlusNode node() const { return restrict_to(width); }

    friend bool operator==(const WeakType &, const WeakType &) = default;
    friend bool operator<(const WeakType & a, const WeakType & b)
    {
        return std::tie(a.base, a.width, a.mixed) < std::tie(b.base, b.width, b.mixed);
    }
};

/// Every mixed tuple is admissible, in range, and uses at most `width` type vertices.
inline bool weak_type_invariant_holds(const WeakType & t)
{
    for (const auto & [r, tuple] : t.mixed) {
        if (r >= t.base.language().size() || static_cast<int>(tuple.size()) != t.base.language()[r].arity)
            return false;
        if (!is_admissible(tuple))
            return false;
        for (int x : tuple)
            if (is_type_vertex(x) ? type_index(x) >= t.width : x >= t.level())
                return false;
    }
    return true;
}

inline constexpr std::size_t kDefaultEnumerationLimit = std::size_t{1} << 20;

/// All weak types extending `base`: every subset of the admissible-pattern universe.
/// Order: bit i of the subset index selects the i-th admissible pattern in sorted order.
inline std::vector<WeakType> enumerate_weak_types(const Structure & base, std::size_t limit = kDefaultEnumerationLimit)
{
    const auto & u = admissible_patterns(base.language(), base.size());
    std::vector<Pattern> all;
    for (const auto & v : u.by_depth)
        all.insert(all.end(), v.begin(), v.end());
    std::sort(all.begin(), all.end());
    if (all.size() >= 63 || (std::size_t{1} << all.size()) > limit)
        throw BudgetExceeded("enumerate_weak_types: 2^" + std::to_string(all.size()) + " weak types exceed the limit");
    std::vector<WeakType> out;
    std::uint64_t total = std::uint64_t{1} << all.size();
    out.reserve(static_cast<std::size_t>(total));
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        WeakType t{base, u.width, {}};
        for (std::size_t i = 0; i < all.size(); ++i)
            if (mask >> i & 1U)
                t.mixed.insert(all[i]);
        out.push_back(std::move(t));
    }
    return out;
}

/// Image of a pattern under t_i -> tuple[i] and base vertex x -> x.
inline Tuple substitute(const Tuple & pattern, const std::vector<int> & tuple)
{
    Tuple out = pattern;
    for (int & x : out)
        if (is_type_vertex(x))
            x = tuple[static_cast<std::size_t>(type_index(x))];
    return out;
}

/// Node of depth min(|tuple|, width) holding the type of `tuple` over {0..level-1} in A.
inline PlusNode node_of_tuple(const Structure & a, int level, const std::vector<int> & tuple)
{
    const auto & u = admissible_patterns(a.language(), level);
    PlusNode node{std::min(static_cast<int>(tuple.size()), u.width), {}};
    for (int d = 1; d <= node.depth; ++d)
        for (const auto & p : u.by_depth[static_cast<std::size_t>(d)])
            if (a.has(p.first, substitute(p.second, tuple)))
                node.data.insert(p);
    return node;
}

inline WeakType weak_type_of_tuple(const Structure & a, int level, const std::vector<int> & tuple)
{
    if (level < 0 || level > a.size())
        throw InputError("weak_type_of_tuple: level out of range");
    require_increasing(tuple, a.size(), "weak_type_of_tuple");
    if (!tuple.empty() && tuple.front() < level)
        throw InputError("weak_type_of_tuple: tuple entries must be >= level");
    auto node = node_of_tuple(a, level, tuple);
    return WeakType{initial_segment(a, level), type_width(a.language()), std::move(node.data)};
}

inline bool agree_as_n_types(const WeakType & t, const WeakType & t2, int n)
{
    if (!(t.base == t2.base))
        throw InputError("agree_as_n_types: weak types extend different structures");
    return t.restrict_to(n) == t2.restrict_to(n);
}

/// Materialized plus-structure: base vertices 0..level-1 followed by type nodes, depth by depth.
class PlusStructure {
public:
    explicit PlusStructure(Structure base, std::size_t limit = kDefaultEnumerationLimit) : base_(std::move(base))
    {
        const auto & u = admissible_patterns(base_.language(), base_.size());
        width_ = u.width;
        nodes_.resize(static_cast<std::size_t>(width_) + 1);
        nodes_[0].push_back(PlusNode{});
        std::size_t total = 0;
        for (int d = 1; d <= width_; ++d) {
            const auto & fresh = u.by_depth[static_cast<std::size_t>(d)];
            if (fresh.size() >= 40)
                throw BudgetExceeded("plus_structure: too many admissible patterns at depth " + std::to_string(d));
            std::uint64_t per_parent = std::uint64_t{1} << fresh.size();
            total += static_cast<std::size_t>(per_parent) * nodes_[static_cast<std::size_t>(d - 1)].size();
            if (total > limit)
                throw BudgetExceeded("plus_structure: node count exceeds the limit");
            for (const auto & parent : nodes_[static_cast<std::size_t>(d - 1)])
                for (std::uint64_t mask = 0; mask < per_parent; ++mask) {
                    PlusNode n{d, parent.data};
                    for (std::size_t i = 0; i < fresh.size(); ++i)
                        if (mask >> i & 1U)
                            n.data.insert(fresh[i]);
                    nodes_[static_cast<std::size_t>(d)].push_back(std::move(n));
                }
            std::sort(nodes_[static_cast<std::size_t>(d)].begin(), nodes_[static_cast<std::size_t>(d)].end());
        }
    }

    [[nodiscard]] const Structure & base() const { return base_; }
    [[nodiscard]] int width() const { return width_; }
    [[nodiscard]] const std::vector<PlusNode> & nodes(int depth) const { return nodes_.at(static_cast<std::size_t>(depth)); }

    [[nodiscard]] std::size_t node_count() const
    {
        std::size_t c = 0;
        for (int d = 1; d <= width_; ++d)
            c += nodes(d).size();
        return c;
    }
    [[nodiscard]] std::size_t vertex_count() const { return static_cast<std::size_t>(base_.size()) + node_count(); }

    /// Vertex id of a node: base vertices come first, then depth-1 nodes, depth-2 nodes, ...
    [[nodiscard]] int vertex_of(const PlusNode & n) const
    {
        std::size_t offset = static_cast<std::size_t>(base_.size());
        for (int d = 1; d < n.depth; ++d)
            offset += nodes(d).size();
        const auto & level = nodes(n.depth);
        auto it = std::lower_bound(level.begin(), level.end(), n);
        if (it == level.end() || !(*it == n))
            throw InputError("node is not part of this plus-structure");
        return static_cast<int>(offset + static_cast<std::size_t>(it - level.begin()));
    }

    /// f maps a depth-d node to its depth-(d-1) restriction; depth-1 nodes are fixed points.
    [[nodiscard]] int parent_vertex(int v) const
    {
        if (v < base_.size())
            throw InputError("the successor function is undefined on base vertices");
        const auto & n = node_at(v);
        return n.depth == 1 ? v : vertex_of(n.parent());
    }

    [[nodiscard]] const PlusNode & node_at(int v) const
    {
        auto idx = static_cast<std::size_t>(v - base_.size());
        for (int d = 1; d <= width_; ++d) {
            if (idx < nodes(d).size())
                return nodes(d)[idx];
            idx -= nodes(d).size();
        }
        throw InputError("vertex out of range");
    }

    /// All relation tuples over vertex ids: base tuples plus the image of every pattern with
    /// t_i sent to the depth-(i+1) ancestor of the node that introduces it.
    [[nodiscard]] std::vector<std::set<Tuple>> relation_tuples() const
    {
        std::vector<std::set<Tuple>> out(base_.language().size());
        for (std::size_t r = 0; r < out.size(); ++r)
            out[r] = base_.tuples(r);
        for (int d = 1; d <= width_; ++d)
            for (const auto & n : nodes(d)) {
                std::vector<int> chain;
                for (int i = 1; i <= d; ++i)
                    chain.push_back(vertex_of(n.restrict_to(i)));
                for (const auto & [r, p] : n.fresh())
                    out[r].insert(substitute(p, chain));
            }
        return out;
    }

private:
    Structure base_;
    int width_ = 0;
    std::vector<std::vector<PlusNode>> nodes_;
};

inline PlusStructure plus_structure(const Structure & base, std::size_t limit = kDefaultEnumerationLimit)
{
    return PlusStructure(base, limit);
}

inline Tuple translate(const Tuple & pattern, const VertexMap & base_map)
{
    Tuple out = pattern;
    for (int & x : out)
        if (!is_type_vertex(x))
            x = base_map[static_cast<std::size_t>(x)];
    return out;
}

/// A map of plus-structures A+ -> B+ given by a base embedding and explicit node images.
/// Nodes without an override go to the minimal extension: the image of their parent plus the
/// translated fresh patterns, with no pattern touching a base vertex outside the image.
struct PlusMap {
    Structure source;
    Structure target;
    VertexMap base_map;
    std::map<PlusNode, PlusNode> overrides;

    [[nodiscard]] int width() const { return type_width(source.language()); }

    friend bool operator==(const PlusMap &, const PlusMap &) = default;
    friend bool operator<(const PlusMap & x, const PlusMap & y)
    {
        return std::tie(x.source, x.target, x.base_map, x.overrides) < std::tie(y.source, y.target, y.base_map, y.overrides);
    }

    [[nodiscard]] PlusNode image(const PlusNode & n) const
    {
        if (n.depth == 0)
            return n;
        if (auto it = overrides.find(n); it != overrides.end())
            return it->second;
        PlusNode out = image(n.parent());
        out.depth = n.depth;
        for (const auto & [r, p] : n.fresh())
            out.data.emplace(r, translate(p, base_map));
        return out;
    }

    /// Source node whose translation agrees with `m` on the image of the base map.
    [[nodiscard]] PlusNode pullback(const PlusNode & m) const
    {
        std::vector<int> inverse(static_cast<std::size_t>(target.size()), -1);
        for (std::size_t i = 0; i < base_map.size(); ++i)
            inverse[static_cast<std::size_t>(base_map[i])] = static_cast<int>(i);
        return pullback_with(m, inverse);
    }

    static PlusNode pullback_with(const PlusNode & m, const std::vector<int> & inverse)
    {
        PlusNode out{m.depth, {}};
        for (const auto & [r, p] : m.data) {
            Tuple q = p;
            bool inside = true;
            for (int & x : q)
                if (!is_type_vertex(x)) {
                    x = inverse[static_cast<std::size_t>(x)];
                    if (x < 0) {
                        inside = false;
                        break;
                    }
                }
            if (inside)
                out.data.emplace(r, std::move(q));
        }
        return out;
    }

    /// Whether m lies in the image of this map.
    [[nodiscard]] bool in_image(const PlusNode & m) const { return image(pullback(m)) == m; }

    /// Empty string when the map is a valid plus-embedding, otherwise the violated clause.
    [[nodiscard]] std::string violation() const
    {
        if (!(source.language() == target.language()))
            return "source and target languages differ";
        if (!is_embedding(source, target, base_map))
            return "base map is not an embedding";
        for (const auto & [from, to] : overrides) {
            if (from.depth != to.depth || from.depth < 1 || from.depth > width())
                return "override changes depth";
            if (!(pullback(to) == from))
                return "override image does not extend the translated node";
            if (!(to.parent() == image(from.parent())))
                return "override does not commute with the successor function";
        }
        return {};
    }

    [[nodiscard]] bool valid() const { return violation().empty(); }

    /// Composition (this after first).
    [[nodiscard]] PlusMap after(const PlusMap & first, const std::vector<PlusNode> & domain) const
    {
        PlusMap out{first.source, target, map_tuple(first.base_map, base_map), {}};
        for (const auto & n : domain)
            out.overrides[n] = image(first.image(n));
        return out;
    }
};

inline PlusMap identity_plus_map(const Structure & s)
{
    VertexMap id(static_cast<std::size_t>(s.size()));
    std::iota(id.begin(), id.end(), 0);
    return PlusMap{s, s, id, {}};
}

/// All nodes of A+ up to the width, shallow first; throws when the count exceeds `limit`.
inline std::vector<PlusNode> all_nodes(const Structure & base, std::size_t limit = kDefaultEnumerationLimit)
{
    PlusStructure p(base, limit);
    std::vector<PlusNode> out;
    for (int d = 1; d <= p.width(); ++d)
        out.insert(out.end(), p.nodes(d).begin(), p.nodes(d).end());
    return out;
}

/// Every plus-embedding between two materialized plus-structures, each node given explicitly.
inline std::vector<PlusMap> plus_embeddings(const PlusStructure & a, const PlusStructure & b,
                                            std::size_t limit = kDefaultEnumerationLimit)
{
    require_same_language(a.base(), b.base());
    std::vector<PlusMap> out;
    std::vector<PlusNode> order;
    for (int d = 1; d <= a.width(); ++d)
        order.insert(order.end(), a.nodes(d).begin(), a.nodes(d).end());

    for (const auto & e : enumerate_embeddings(a.base(), b.base())) {
        PlusMap m{a.base(), b.base(), e, {}};
        std::vector<int> inverse(static_cast<std::size_t>(b.base().size()), -1);
        for (std::size_t i = 0; i < e.size(); ++i)
            inverse[static_cast<std::size_t>(e[i])] = static_cast<int>(i);
        std::function<void(std::size_t)> assign = [&](std::size_t i) {
            if (i == order.size()) {
                if (out.size() >= limit)
                    throw BudgetExceeded("plus_embeddings: too many maps");
                out.push_back(m);
                return;
            }
            const auto & n = order[i];
            PlusNode parent_image = m.image(n.parent());
            for (const auto & cand : b.nodes(n.depth)) {
                if (!(cand.parent() == parent_image) || !(PlusMap::pullback_with(cand, inverse) == n))
                    continue;
                m.overrides[n] = cand;
                assign(i + 1);
            }
            m.overrides.erase(n);
        };
        assign(0);
    }
    return out;
}

/// Node of the tree of weak types: the weak type of a tuple of length `depth` at a level.
struct WeakTypeTreeNode {
    int level = 0;
    PlusNode node;

    friend auto operator<=>(const WeakTypeTreeNode &, const WeakTypeTreeNode &) = default;
};

/// Substructure order: x <= y iff y restricted to x's base and depth is x.
inline bool weak_tree_leq(const WeakTypeTreeNode & x, const WeakTypeTreeNode & y)
{
    if (x.level > y.level || x.node.depth > y.node.depth)
        return false;
    PlusNode r{x.node.depth, {}};
    for (const auto & [rel, p] : y.node.data) {
        if (pattern_depth(p) > x.node.depth)
            continue;
        bool low = std::all_of(p.begin(), p.end(), [&](int v) { return is_type_vertex(v) || v < x.level; });
        if (low)
            r.data.emplace(rel, p);
    }
    return r == x.node;
}

inline void for_each_increasing_tuple(int lo, int hi, int length, const std::function<void(const std::vector<int> &)> & fn)
{
    std::vector<int> t;
    std::function<void(int)> rec = [&](int next) {
        if (static_cast<int>(t.size()) == length) {
            fn(t);
            return;
        }
        for (int v = next; v < hi; ++v) {
            t.push_back(v);
            rec(v + 1);
            t.pop_back();
        }
    };
    if (length >= 0)
        rec(lo);
}

/// Realized weak types of increasing tuples (length 0..width) at every level 0..size.
inline std::vector<WeakTypeTreeNode> tree_of_weak_types(const Structure & u)
{
    std::set<WeakTypeTreeNode> found;
    int w = type_width(u.language());
    for (int level = 0; level <= u.size(); ++level)
        for (int len = 0; len <= w; ++len)
            for_each_increasing_tuple(level, u.size(), len, [&](const std::vector<int> & t) {
                found.insert({level, node_of_tuple(u, level, t)});
            });
    return {found.begin(), found.end()};
}

} // namespace typeamalg
