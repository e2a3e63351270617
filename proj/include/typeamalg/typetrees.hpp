#pragma once

// Quantifier-free 1-types over initial segments and the tree they form. The tree is the
// finite truncation of the usual omega-indexed construction: levels 0..size-1.

#include "typeamalg/structures.hpp"

#include <map>
#include <sstream>
#include <utility>

namespace typeamalg {

/// Placeholder for the realizing vertex inside a 1-type shape.
inline constexpr int kStar = -1;

/// Relation tuples over {0..level-1} and the star that mention the star.
using TypeShape = std::vector<std::pair<std::size_t, Tuple>>;

struct OneType {
    int level = 0;
    TypeShape shape;
    std::vector<int> members; // increasing, all >= level

    friend bool operator==(const OneType &, const OneType &) = default;
};

/// The shape of vertex u over {0..n-1}.
inline TypeShape type_shape(const Structure & u, int vertex, int n)
{
    TypeShape shape;
    const Language & lang = u.language();
    for (std::size_t r = 0; r < lang.size(); ++r)
        for_each_tuple(lang[r].arity, n + 1, [&](const Tuple & t) {
            if (std::find(t.begin(), t.end(), n) == t.end())
                return;
            Tuple actual = t;
            Tuple pattern = t;
            for (std::size_t i = 0; i < t.size(); ++i)
                if (t[i] == n) {
                    actual[i] = vertex;
                    pattern[i] = kStar;
                }
            if (u.has(r, actual))
                shape.emplace_back(r, std::move(pattern));
        });
    return shape;
}

inline bool same_type(const Structure & u, int a, int b, int n)
{
    if (n < 0 || a >= u.size() || b >= u.size() || std::min(a, b) < n)
        throw InputError("same_type: requires n <= min(u, v) < size");
    return type_shape(u, a, n) == type_shape(u, b, n);
}

/// Partition of {n..size-1} into 1-type classes, ordered by least member.
inline std::vector<OneType> one_type_classes(const Structure & u, int n)
{
    if (n < 0 || n > u.size())
        throw InputError("one_type_classes: level out of range");
    std::vector<OneType> classes;
    std::map<TypeShape, std::size_t> index;
    for (int v = n; v < u.size(); ++v) {
        auto shape = type_shape(u, v, n);
        auto it = index.find(shape);
        if (it == index.end()) {
            index.emplace(shape, classes.size());
            classes.push_back({n, std::move(shape), {v}});
        }
        else {
            classes[it->second].members.push_back(v);
        }
    }
    return classes;
}

class TypeTree {
public:
    explicit TypeTree(const Structure & u)
    {
        for (int n = 0; n < u.size(); ++n)
            for (auto & c : one_type_classes(u, n))
                nodes_.push_back(std::move(c));
        parent_.assign(nodes_.size(), -1);
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            for (std::size_t j = 0; j < nodes_.size(); ++j)
                if (nodes_[j].level + 1 == nodes_[i].level && leq(j, i))
                    parent_[i] = static_cast<int>(j);
    }

    [[nodiscard]] const std::vector<OneType> & nodes() const { return nodes_; }
    [[nodiscard]] int parent(std::size_t i) const { return parent_.at(i); }

    /// x <= y iff level(x) <= level(y) and members(x) contains members(y).
    [[nodiscard]] bool leq(std::size_t x, std::size_t y) const
    {
        const auto & a = nodes_.at(x);
        const auto & b = nodes_.at(y);
        if (a.level > b.level)
            return false;
        return std::includes(a.members.begin(), a.members.end(), b.members.begin(), b.members.end());
    }

    [[nodiscard]] std::vector<std::size_t> down_set(std::size_t y) const
    {
        std::vector<std::size_t> out;
        for (std::size_t x = 0; x < nodes_.size(); ++x)
            if (leq(x, y))
                out.push_back(x);
        return out;
    }

    /// Index of the node at `level` whose class contains `vertex`.
    [[nodiscard]] std::optional<std::size_t> node_of(int vertex, int level) const
    {
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            if (nodes_[i].level == level &&
                std::binary_search(nodes_[i].members.begin(), nodes_[i].members.end(), vertex))
                return i;
        return std::nullopt;
    }

private:
    std::vector<OneType> nodes_;
    std::vector<int> parent_;
};

inline TypeTree type_tree(const Structure & u) { return TypeTree(u); }

/// Isomorphism-invariant description of the meet closure of a copy inside the tree of 1-types.
struct ShapeCode {
    struct Node {
        int level_rank = 0;  // rank of the level among the distinct levels of the closure
        int parent = -1;     // index in the closure, -1 for the root
        int copy_index = -1; // position in the copy when the node is a vertex node, else -1
        TypeShape context;   // relations with earlier copy vertices, in copy coordinates

        friend auto operator<=>(const Node &, const Node &) = default;
    };
    std::vector<Node> nodes;

    friend auto operator<=>(const ShapeCode &, const ShapeCode &) = default;
    friend bool operator==(const ShapeCode &, const ShapeCode &) = default;

    [[nodiscard]] std::string str() const
    {
        std::ostringstream os;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const auto & n = nodes[i];
            os << (i ? ";" : "") << "L" << n.level_rank << "p" << n.parent << "c" << n.copy_index;
            for (const auto & [r, t] : n.context) {
                os << "|" << r << ":";
                for (int v : t)
                    os << v << ",";
            }
        }
        return os.str();
    }
};

/// Level of the meet of the vertex nodes of a and b: the largest n <= min(a, b) with a ~n b.
inline int meet_level(const Structure & u, int a, int b)
{
    int lo = std::min(a, b);
    for (int n = lo; n > 0; --n)
        if (type_shape(u, a, n) == type_shape(u, b, n))
            return n;
    return 0;
}

inline ShapeCode meet_closure_shape(const Structure & u, const std::vector<int> & copy)
{
    if (copy.empty())
        throw InputError("meet_closure_shape: copy must be nonempty");
    require_increasing(copy, u.size(), "meet_closure_shape");

    // A tree node is identified by (level, least member of its class).
    struct Raw {
        int level;
        int least;
        int copy_index;
        std::vector<int> members;
    };
    auto class_of = [&](int vertex, int level) {
        std::vector<int> members;
        auto shape = type_shape(u, vertex, level);
        for (int w = level; w < u.size(); ++w)
            if (type_shape(u, w, level) == shape)
                members.push_back(w);
        return members;
    };
    std::map<std::pair<int, int>, Raw> closure;
    auto insert = [&](int vertex, int level, int copy_index) {
        auto members = class_of(vertex, level);
        std::pair<int, int> key{level, members.front()};
        auto it = closure.find(key);
        if (it == closure.end())
            closure.emplace(key, Raw{level, members.front(), copy_index, std::move(members)});
        else if (copy_index >= 0)
            it->second.copy_index = copy_index;
    };
    for (std::size_t i = 0; i < copy.size(); ++i)
        insert(copy[i], copy[i], static_cast<int>(i));
    for (std::size_t i = 0; i < copy.size(); ++i)
        for (std::size_t j = i + 1; j < copy.size(); ++j)
            insert(copy[i], meet_level(u, copy[i], copy[j]), -1);

    std::vector<Raw> nodes;
    for (auto & [key, raw] : closure)
        nodes.push_back(raw);
    std::vector<int> levels;
    for (const auto & n : nodes)
        levels.push_back(n.level);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    ShapeCode code;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        ShapeCode::Node out;
        out.level_rank = static_cast<int>(std::lower_bound(levels.begin(), levels.end(), nodes[i].level) - levels.begin());
        out.copy_index = nodes[i].copy_index;
        // parent: the deepest closure node strictly below
        int best = -1;
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            if (nodes[j].level >= nodes[i].level)
                continue;
            if (!std::includes(nodes[j].members.begin(), nodes[j].members.end(), nodes[i].members.begin(),
                               nodes[i].members.end()))
                continue;
            if (best < 0 || nodes[j].level > nodes[static_cast<std::size_t>(best)].level)
                best = static_cast<int>(j);
        }
        out.parent = best;
        if (out.copy_index >= 0) {
            auto ci = static_cast<std::size_t>(out.copy_index);
            std::vector<int> local(copy.begin(), copy.begin() + static_cast<std::ptrdiff_t>(ci) + 1);
            auto sub = induced_substructure(u, local);
            out.context = type_shape(sub, static_cast<int>(ci), static_cast<int>(ci));
        }
        code.nodes.push_back(std::move(out));
    }
    return code;
}

} // namespace typeamalg
