#pragma once

// Finite arrow relations C -> (B)^A_{k,l}, their type-respecting variant, finite degrees and
// colourings by meet-closure shape.

#include "typeamalg/respect.hpp"
#include "typeamalg/typetrees.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace typeamalg {

struct Coloring {
    std::vector<VertexMap> domain;
    int color_count = 0;
    std::vector<int> assignment;     // domain index -> colour
    std::vector<std::string> labels; // optional colour names
};

struct ArrowResult {
    bool holds = false;
    std::optional<Coloring> witness_coloring; // present iff !holds
    std::size_t domain_size = 0;
    std::size_t copies = 0; // embeddings of B into C
    std::uint64_t nodes_visited = 0;
};

inline constexpr std::uint64_t kDefaultArrowBudget = std::uint64_t{1} << 26;

struct ArrowConfig {
    std::uint64_t budget = kDefaultArrowBudget; // ceiling on colourings to examine
    bool symmetry = true;                       // colourings up to permutation of colours
    unsigned jobs = 1;
};

namespace detail {

    /// Number of colourings the search may visit: sum of Stirling numbers S(n, j), j <= k, with
    /// symmetry, k^n without. Saturates at UINT64_MAX.
    inline std::uint64_t colouring_count(std::size_t n, int k, bool symmetry)
    {
        const double cap = 1.8e19;
        if (!symmetry) {
            double v = std::pow(static_cast<double>(k), static_cast<double>(n));
            return v >= cap ? UINT64_MAX : static_cast<std::uint64_t>(v);
        }
        std::size_t kk = static_cast<std::size_t>(k);
        std::vector<double> s(kk + 1, 0.0); // S(i, j) for current i
        s[0] = 1.0;
        for (std::size_t i = 1; i <= n; ++i) {
            for (std::size_t j = std::min(i, kk); j >= 1; --j)
                s[j] = static_cast<double>(j) * s[j] + s[j - 1];
            s[0] = 0.0;
        }
        double total = 0;
        for (std::size_t j = 0; j <= kk; ++j)
            total += s[j];
        return total >= cap ? UINT64_MAX : static_cast<std::uint64_t>(std::llround(total));
    }

    /// Searches colourings of {0..n-1} with k colours in lexicographic order for one in which
    /// every hyperedge carries more than l colours. Hyperedges are checked as soon as their
    /// largest index is coloured.
    class ArrowSearch {
    public:
        ArrowSearch(std::size_t n, std::vector<std::vector<int>> hyperedges, int k, int l, bool symmetry)
            : n_(n), edges_(std::move(hyperedges)), k_(k), l_(l), symmetry_(symmetry), closing_(n)
        {
            for (std::size_t e = 0; e < edges_.size(); ++e)
                if (!edges_[e].empty())
                    closing_[static_cast<std::size_t>(edges_[e].back())].push_back(e);
        }

        /// Bad colouring extending `prefix`, or nullopt.
        std::optional<std::vector<int>> run(const std::vector<int> & prefix, const std::atomic<bool> * cancel = nullptr)
        {
            for (const auto & e : edges_)
                if (e.empty())
                    return std::nullopt; // a copy with no A-subcopy in the domain is never defeated
            std::vector<int> colour(prefix);
            colour.resize(n_, -1);
            int used = 0;
            for (std::size_t i = 0; i < prefix.size(); ++i) {
                used = std::max(used, prefix[i] + 1);
                if (!closes_ok(i, colour))
                    return std::nullopt;
            }
            cancel_ = cancel;
            if (dfs(prefix.size(), used, colour))
                return colour;
            return std::nullopt;
        }

        [[nodiscard]] std::uint64_t visited() const { return visited_; }

        /// Restricted-growth (or plain) prefixes of the given length, in lexicographic order.
        [[nodiscard]] std::vector<std::vector<int>> prefixes(std::size_t length) const
        {
            std::vector<std::vector<int>> out;
            std::vector<int> cur;
            std::function<void(int)> rec = [&](int used) {
                if (cur.size() == length) {
                    out.push_back(cur);
                    return;
                }
                int top = symmetry_ ? std::min(k_, used + 1) : k_;
                for (int c = 0; c < top; ++c) {
                    cur.push_back(c);
                    rec(std::max(used, c + 1));
                    cur.pop_back();
                }
            };
            rec(0);
            return out;
        }

    private:
        bool closes_ok(std::size_t i, const std::vector<int> & colour) const
        {
            for (auto e : closing_[i]) {
                std::uint64_t seen = 0;
                int distinct = 0;
                for (int x : edges_[e]) {
                    auto bit = std::uint64_t{1} << colour[static_cast<std::size_t>(x)];
                    if (!(seen & bit)) {
                        seen |= bit;
                        ++distinct;
                    }
                }
                if (distinct <= l_)
                    return false;
            }
            return true;
        }

        bool dfs(std::size_t i, int used, std::vector<int> & colour)
        {
            ++visited_;
            if (cancel_ && (visited_ & 0xFFF) == 0 && cancel_->load(std::memory_order_relaxed))
                return false;
            if (i == n_)
                return true;
            int top = symmetry_ ? std::min(k_, used + 1) : k_;
            for (int c = 0; c < top; ++c) {
                colour[i] = c;
                if (closes_ok(i, colour) && dfs(i + 1, std::max(used, c + 1), colour))
                    return true;
            }
            colour[i] = -1;
            return false;
        }

        std::size_t n_;
        std::vector<std::vector<int>> edges_;
        int k_;
        int l_;
        bool symmetry_;
        std::vector<std::vector<std::size_t>> closing_;
        std::uint64_t visited_ = 0;
        const std::atomic<bool> * cancel_ = nullptr;
    };

    struct SearchOutcome {
        std::optional<std::vector<int>> bad;
        std::uint64_t visited = 0;
    };

    /// Runs the search, optionally split over worker threads by colouring prefix. The result is
    /// the lexicographically least bad colouring regardless of the number of workers.
    inline SearchOutcome search_colourings(std::size_t n, const std::vector<std::vector<int>> & edges, int k, int l,
                                           const ArrowConfig & config)
    {
        if (k > 63)
            throw InputError("arrows: at most 63 colours are supported");
        std::uint64_t need = colouring_count(n, k, config.symmetry);
        if (need > config.budget)
            throw BudgetExceeded("arrows: " + std::to_string(need) + " colourings exceed the budget of " +
                                 std::to_string(config.budget));
        SearchOutcome out;
        if (config.jobs <= 1 || n < 4) {
            ArrowSearch s(n, edges, k, l, config.symmetry);
            out.bad = s.run({});
            out.visited = s.visited();
            return out;
        }
        ArrowSearch probe(n, edges, k, l, config.symmetry);
        std::size_t length = 1;
        while (length < n && probe.prefixes(length).size() < 8 * static_cast<std::size_t>(config.jobs))
            ++length;
        auto prefixes = probe.prefixes(length);
        std::vector<std::optional<std::vector<int>>> results(prefixes.size());
        std::atomic<std::size_t> next{0};
        std::atomic<std::size_t> best{prefixes.size()};
        std::atomic<std::uint64_t> visited{0};
        std::vector<std::atomic<bool>> cancel(prefixes.size());
        auto worker = [&]() {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= prefixes.size() || i > best.load())
                    return;
                ArrowSearch s(n, edges, k, l, config.symmetry);
                results[i] = s.run(prefixes[i], &cancel[i]);
                visited += s.visited();
                if (results[i]) {
                    std::size_t cur = best.load();
                    while (i < cur && !best.compare_exchange_weak(cur, i)) {
                    }
                    for (std::size_t j = i + 1; j < prefixes.size(); ++j)
                        cancel[j] = true;
                }
            }
        };
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < config.jobs; ++j)
            pool.emplace_back(worker);
        for (auto & t : pool)
            t.join();
        out.visited = visited;
        if (best < prefixes.size())
            out.bad = results[best];
        return out;
    }

    inline std::map<VertexMap, int> index_domain(const std::vector<VertexMap> & domain)
    {
        std::map<VertexMap, int> index;
        for (std::size_t i = 0; i < domain.size(); ++i)
            index.emplace(domain[i], static_cast<int>(i));
        return index;
    }

    /// For each copy f of B, the sorted distinct domain indices of f o e, e : A -> B.
    inline std::vector<std::vector<int>> copy_hyperedges(const std::vector<VertexMap> & copies,
                                                         const std::vector<VertexMap> & a_in_b,
                                                         const std::map<VertexMap, int> & index)
    {
        std::vector<std::vector<int>> edges;
        for (const auto & f : copies) {
            std::vector<int> e;
            for (const auto & inner : a_in_b)
                if (auto it = index.find(map_tuple(inner, f)); it != index.end())
                    e.push_back(it->second);
            std::sort(e.begin(), e.end());
            e.erase(std::unique(e.begin(), e.end()), e.end());
            edges.push_back(std::move(e));
        }
        return edges;
    }

    inline void check_arrow_args(const Structure & c, const Structure & b, const Structure & a, int k, int l)
    {
        require_same_language(c, b);
        require_same_language(c, a);
        if (k < 1)
            throw InputError("arrows: k must be at least 1");
        if (l < 0)
            throw InputError("arrows: l must be non-negative");
    }

} // namespace detail

/// C -> (B)^A_{k,l}: every k-colouring of the copies of A in C is constant-bounded by l on the
/// A-copies inside some copy of B. Refuses with BudgetExceeded rather than guessing.
inline ArrowResult arrows(const Structure & c, const Structure & b, const Structure & a, int k, int l,
                          const ArrowConfig & config = {})
{
    detail::check_arrow_args(c, b, a, k, l);
    ArrowResult out;
    auto domain = enumerate_embeddings(a, c);
    auto copies = enumerate_embeddings(b, c);
    auto edges = detail::copy_hyperedges(copies, enumerate_embeddings(a, b), detail::index_domain(domain));
    out.domain_size = domain.size();
    out.copies = copies.size();
    auto found = detail::search_colourings(domain.size(), edges, k, l, config);
    out.nodes_visited = found.visited;
    out.holds = !found.bad.has_value();
    if (found.bad)
        out.witness_coloring = Coloring{domain, k, *found.bad, {}};
    return out;
}

/// Independent replay: whether `coloring` leaves more than l colours on every copy of B.
inline bool coloring_defeats(const Coloring & coloring, const Structure & c, const Structure & b, const Structure & a, int l)
{
    if (coloring.assignment.size() != coloring.domain.size())
        return false;
    auto a_in_b = enumerate_embeddings(a, b);
    for (const auto & f : enumerate_embeddings(b, c)) {
        std::set<int> colours;
        for (const auto & inner : a_in_b) {
            auto composed = map_tuple(inner, f);
            auto it = std::find(coloring.domain.begin(), coloring.domain.end(), composed);
            if (it != coloring.domain.end())
                colours.insert(coloring.assignment[static_cast<std::size_t>(it - coloring.domain.begin())]);
        }
        if (static_cast<int>(colours.size()) <= l)
            return false;
    }
    return true;
}

/// Least l with C -> (C)^A_{k,l}; the finite analogue of a big Ramsey degree.
inline int finite_degree(const Structure & c, const Structure & a, int k, const ArrowConfig & config = {})
{
    auto n = static_cast<int>(enumerate_embeddings(a, c).size());
    for (int l = 0; l < n; ++l)
        if (arrows(c, c, a, k, l, config).holds)
            return l;
    return n;
}

/// Colours every copy of A in U by the shape of the meet closure of its image in the tree of
/// 1-types; colours are numbered in the order of the sorted shape codes.
inline Coloring sierpinski_coloring(const Structure & u, const Structure & a)
{
    require_same_language(u, a);
    Coloring out;
    out.domain = enumerate_embeddings(a, u);
    if (a.size() == 0) {
        out.color_count = out.domain.empty() ? 0 : 1;
        out.assignment.assign(out.domain.size(), 0);
        if (!out.domain.empty())
            out.labels.push_back("");
        return out;
    }
    std::vector<ShapeCode> codes;
    for (const auto & e : out.domain)
        codes.push_back(meet_closure_shape(u, e));
    std::vector<ShapeCode> palette = codes;
    std::sort(palette.begin(), palette.end());
    palette.erase(std::unique(palette.begin(), palette.end()), palette.end());
    for (const auto & code : codes)
        out.assignment.push_back(static_cast<int>(std::lower_bound(palette.begin(), palette.end(), code) - palette.begin()));
    out.color_count = static_cast<int>(palette.size());
    for (const auto & code : palette)
        out.labels.push_back(code.str());
    return out;
}

/// Induced map of plus-structures for a copy e of A in C: weak types over A of tuples of C
/// beyond the copy go to their weak types over the initial segment of C ending at the copy.
/// nullopt when two such tuples share a type over A but not over the segment.
inline std::optional<PlusMap> induced_plus_map(const Structure & c, const Structure & a, const VertexMap & e)
{
    int level = e.empty() ? 0 : e.back() + 1;
    Structure seg = initial_segment(c, level);
    PlusMap out{a, seg, e, {}};
    const int w = type_width(c.language());
    std::vector<int> inverse(static_cast<std::size_t>(level), -1);
    for (std::size_t i = 0; i < e.size(); ++i)
        inverse[static_cast<std::size_t>(e[i])] = static_cast<int>(i);
    bool ok = true;
    for (int len = 1; len <= w && ok; ++len)
        for_each_increasing_tuple(level, c.size(), len, [&](const std::vector<int> & t) {
            for (int d = 1; d <= len && ok; ++d) {
                auto over_seg = node_of_tuple(c, level, t).restrict_to(d);
                auto over_a = PlusMap::pullback_with(over_seg, inverse);
                auto [it, inserted] = out.overrides.emplace(over_a, over_seg);
                if (!inserted && !(it->second == over_seg))
                    ok = false;
            }
        });
    if (!ok)
        return std::nullopt;
    // drop overrides that agree with the default so the map is canonical
    for (auto it = out.overrides.begin(); it != out.overrides.end();) {
        PlusMap without = out;
        without.overrides.erase(it->first);
        if (without.image(it->first) == it->second)
            it = out.overrides.erase(it);
        else
            ++it;
    }
    return out;
}

struct TypeArrowResult {
    CheckOutcome outcome;
    std::optional<Coloring> witness_coloring;
    std::vector<VertexMap> domain; // copies of A with a K-type-respecting induced map
    std::size_t copies = 0;        // admissible copies of B
};

/// Type-respecting arrow relation. The colour domain consists of the copies of A whose induced
/// map into the initial segment of C is K-type-respecting at `depth`; copies of B must be
/// type-respecting, and with `strict` their induced maps must be K-type-respecting too.
inline TypeArrowResult arrows_type_respecting(const Structure & c, const Structure & b, const Structure & a, int k, int l,
                                              const HereditaryFamily & family, int depth, bool strict = false,
                                              const ArrowConfig & config = {}, const RespectConfig & respect = {})
{
    detail::check_arrow_args(c, b, a, k, l);
    if (!family_member(family, c))
        throw InputError("arrows_type_respecting: C must belong to the family");
    TypeArrowResult out;
    out.outcome.depth_used = depth;

    auto membership = [&](const Structure & src, const VertexMap & e) -> Verdict {
        auto induced = induced_plus_map(c, src, e);
        if (!induced)
            return Verdict::Fails;
        return is_family_type_respecting(*induced, family, depth, respect).verdict;
    };

    for (const auto & e : enumerate_embeddings(a, c)) {
        Verdict v = membership(a, e);
        if (v == Verdict::Inconclusive) {
            out.outcome.verdict = Verdict::Inconclusive;
            out.outcome.note = "domain membership undecided at this depth";
            return out;
        }
        if (v == Verdict::Holds)
            out.domain.push_back(e);
    }
    std::vector<VertexMap> copies;
    for (const auto & f : enumerate_embeddings(b, c)) {
        if (!is_type_respecting(b, c, f))
            continue;
        if (strict) {
            Verdict v = membership(b, f);
            if (v == Verdict::Inconclusive) {
                out.outcome.verdict = Verdict::Inconclusive;
                out.outcome.note = "strict copy membership undecided at this depth";
                return out;
            }
            if (v != Verdict::Holds)
                continue;
        }
        copies.push_back(f);
    }
    out.copies = copies.size();
    auto edges = detail::copy_hyperedges(copies, enumerate_embeddings(a, b), detail::index_domain(out.domain));
    auto found = detail::search_colourings(out.domain.size(), edges, k, l, config);
    if (found.bad) {
        out.outcome.verdict = Verdict::Fails;
        out.witness_coloring = Coloring{out.domain, k, *found.bad, {}};
        out.outcome.note = "colouring defeats every admissible copy";
    }
    else {
        out.outcome.verdict = Verdict::Holds;
    }
    return out;
}

} // namespace typeamalg
