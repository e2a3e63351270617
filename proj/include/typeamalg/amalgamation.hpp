#pragma once

// Type-respecting amalgamation: instance validation, the search for g', the exhaustive binary
// sweep and the explicit ternary failure.

#include "typeamalg/respect.hpp"

namespace typeamalg {

struct AmalgamationInstance {
    HereditaryFamily family;
    Structure a;
    Structure b;
    Structure b2;
    PlusMap f;  // A+ -> B+
    PlusMap f2; // A+ -> B2+
    PlusMap g;  // B+ -> B2+
};

struct AmalgamationOutcome {
    CheckOutcome outcome;
    std::optional<PlusMap> certificate; // g' when HOLDS
    std::string certificate_source;     // "g" or "transfer"
    std::vector<std::string> log;
};

namespace detail {

    inline bool compose_agrees(const PlusMap & outer, const PlusMap & inner, const PlusMap & expected)
    {
        if (map_tuple(inner.base_map, outer.base_map) != expected.base_map)
            return false;
        for (const auto & n : all_nodes(inner.source))
            if (!(outer.image(inner.image(n)) == expected.image(n)))
                return false;
        return true;
    }

    /// The g' that is forced on the image of f and minimal elsewhere.
    inline PlusMap minimal_transfer(const AmalgamationInstance & inst)
    {
        VertexMap id(static_cast<std::size_t>(inst.b.size()));
        std::iota(id.begin(), id.end(), 0);
        PlusMap out{inst.b, inst.b2, id, {}};
        for (const auto & n : all_nodes(inst.a))
            out.overrides[inst.f.image(n)] = inst.f2.image(n);
        return out;
    }

    inline bool transfer_applies(const HereditaryFamily & k)
    {
        return k.language.max_arity() <= 2 && k.mode == FamilyMode::Embedding && k.reducible_members().empty();
    }

} // namespace detail

/// Structural clauses of an instance; throws InputError naming the first violated clause.
inline void validate_instance_shape(const AmalgamationInstance & inst)
{
    const auto & k = inst.family;
    auto fail = [](const std::string & clause) { throw InputError("amalgamation instance: " + clause); };
    if (!(inst.a.language() == k.language) || !(inst.b.language() == k.language) || !(inst.b2.language() == k.language))
        fail("structures must use the family's language");
    if (!(inst.f.source == inst.a) || !(inst.f.target == inst.b))
        fail("f must map A+ to B+");
    if (!(inst.f2.source == inst.a) || !(inst.f2.target == inst.b2))
        fail("f2 must map A+ to B2+");
    if (!(inst.g.source == inst.b) || !(inst.g.target == inst.b2))
        fail("g must map B+ to B2+");
    if (inst.b2.size() != inst.b.size() + 1)
        fail("B2 must add exactly one vertex to B");
    if (!(initial_segment(inst.b2, inst.b.size()) == inst.b))
        fail("B must be an initial segment of B2");
    for (const auto * s : {&inst.a, &inst.b, &inst.b2})
        if (!family_member(k, *s))
            fail("A, B and B2 must belong to the family");
    for (const auto * m : {&inst.f, &inst.f2, &inst.g})
        if (auto why = m->violation(); !why.empty())
            fail("map is not a plus-embedding: " + why);
    if (!detail::is_initial_inclusion(inst.g.base_map))
        fail("g must be the identity on B");
    if (!detail::compose_agrees(inst.g, inst.f, inst.f2))
        fail("g o f must equal f2");
}

/// Searches for a K-type-respecting g' : B+ -> B2+ with g' o f = f2 and g' identity on B.
///
/// Candidates are g itself and the transfer that is forced on the image of f and minimal
/// elsewhere. Every admissible g' extends the minimal one node by node, so for families of
/// forbidden monomorphisms a refutation of the minimal transfer refutes every candidate.
inline AmalgamationOutcome check_instance(const AmalgamationInstance & inst, int depth, const RespectConfig & config = {})
{
    validate_instance_shape(inst);
    AmalgamationOutcome out;
    bool downgraded = false;

    auto validate = [&](const char * name, const CheckOutcome & c) {
        if (c.verdict == Verdict::Fails)
            throw InputError(std::string("amalgamation instance: ") + name + " is not type-respecting (" + c.note + ")");
        if (c.verdict == Verdict::Inconclusive) {
            downgraded = true;
            out.log.push_back(std::string(name) + ": validation inconclusive (" + c.note + ")");
        }
    };
    validate("f", is_family_type_respecting(inst.f, inst.family, depth, config));
    validate("f2", is_family_type_respecting(inst.f2, inst.family, depth, config));
    validate("g", is_plus_type_respecting(inst.g, depth));

    PlusMap minimal = detail::minimal_transfer(inst);
    std::vector<std::pair<std::string, PlusMap>> candidates{{"g", inst.g}};
    if (!(minimal == inst.g))
        candidates.emplace_back("transfer", minimal);

    std::optional<CheckOutcome> minimal_outcome;
    for (const auto & [name, cand] : candidates) {
        auto c = is_family_type_respecting(cand, inst.family, depth, config);
        out.log.push_back(name + ": " + to_string(c.verdict) + (c.note.empty() ? "" : " (" + c.note + ")"));
        if (cand == minimal)
            minimal_outcome = c;
        if (c.verdict == Verdict::Holds) {
            out.outcome = c;
            out.certificate = cand;
            out.certificate_source = name;
            if (downgraded) {
                out.outcome.verdict = Verdict::Inconclusive;
                out.outcome.note = "certificate found but instance validation was inconclusive";
            }
            return out;
        }
    }

    out.outcome = *minimal_outcome;
    if (minimal_outcome->verdict == Verdict::Fails) {
        if (inst.family.mode == FamilyMode::Monomorphism) {
            out.outcome.note = "every g' extends the minimal transfer, which is refuted: " + minimal_outcome->note;
        }
        else {
            out.outcome.verdict = Verdict::Inconclusive;
            out.outcome.note = "minimal transfer refuted; other candidates not exhausted for embedding-mode families";
        }
    }
    if (downgraded)
        out.outcome.verdict = Verdict::Inconclusive;
    return out;
}

/// Visits every structure on n vertices; throws BudgetExceeded past 2^24 structures.
inline void for_each_structure(const Language & lang, int n, const std::function<void(const Structure &)> & fn)
{
    std::vector<std::pair<std::size_t, Tuple>> universe;
    for (std::size_t r = 0; r < lang.size(); ++r)
        for_each_tuple(lang[r].arity, n, [&](const Tuple & t) { universe.emplace_back(r, t); });
    if (universe.size() > 24)
        throw BudgetExceeded("for_each_structure: too many structures on " + std::to_string(n) + " vertices");
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << universe.size()); ++bits) {
        Structure s(lang, n);
        for (std::size_t i = 0; i < universe.size(); ++i)
            if (bits >> i & 1U)
                s.add(universe[i].first, universe[i].second);
        fn(s);
    }
}

struct FamilySweep {
    CheckOutcome outcome;
    std::size_t instances = 0;    // valid instances examined
    std::size_t holds = 0;
    std::size_t fails = 0;
    std::size_t inconclusive = 0;
    std::size_t invalid = 0;      // generated but f or f2 not type-respecting
    std::optional<AmalgamationInstance> first_problem;
};

/// Exhaustive check of type-respecting amalgamation for a binary family over all instances
/// with |B2| <= size_bound. For each instance g is the map that is forced on the image of f and
/// minimal elsewhere; the transfer does not depend on the choice of g off that image.
inline FamilySweep check_family_binary(const HereditaryFamily & k, int size_bound, int depth = 3,
                                       const RespectConfig & config = {})
{
    if (k.language.max_arity() > 2)
        throw Unsupported("check_family_binary: only unary and binary languages are supported");
    if (k.mode != FamilyMode::Embedding)
        throw InputError("check_family_binary: family must be given by forbidden embeddings");
    if (!k.reducible_members().empty())
        throw InputError("check_family_binary: forbidden structures must be irreducible");

    FamilySweep sweep;
    std::size_t examined = 0;
    std::map<PlusMap, Verdict> memo;
    auto respects = [&](const PlusMap & h) {
        auto it = memo.find(h);
        if (it == memo.end())
            it = memo.emplace(h, is_family_type_respecting(h, k, depth, config).verdict).first;
        return it->second;
    };

    std::vector<std::vector<Structure>> members(static_cast<std::size_t>(std::max(size_bound, 0) + 1));
    for (int n = 0; n <= size_bound; ++n)
        for_each_structure(k.language, n, [&](const Structure & s) {
            if (family_member(k, s))
                members[static_cast<std::size_t>(n)].push_back(s);
        });
    const bool has_nodes = type_width(k.language) >= 1;

    for (int n2 = 1; n2 <= size_bound; ++n2)
        for (const auto & b2 : members[static_cast<std::size_t>(n2)]) {
            Structure b = initial_segment(b2, n2 - 1);
            VertexMap id(static_cast<std::size_t>(b.size()));
            std::iota(id.begin(), id.end(), 0);
            std::vector<int> drop_last(static_cast<std::size_t>(b2.size()), -1);
            std::iota(drop_last.begin(), drop_last.end() - 1, 0);
            std::vector<PlusNode> over_b, over_b2;
            if (has_nodes) {
                for (const auto & [node, ext] : detail::realizable_vertex_types(b, k))
                    over_b.push_back(node);
                for (const auto & [node, ext] : detail::realizable_vertex_types(b2, k))
                    over_b2.push_back(node);
            }
            for (int na = 0; na <= b.size(); ++na)
                for (const auto & a : members[static_cast<std::size_t>(na)]) {
                    std::vector<PlusNode> over_a;
                    if (has_nodes)
                        for (const auto & [node, ext] : detail::realizable_vertex_types(a, k))
                            over_a.push_back(node);
                    for (const auto & e : enumerate_embeddings(a, b)) {
                        PlusMap base_f{a, b, e, {}};
                        // choices for f(n) and, given f(n), for f2(n)
                        std::vector<std::vector<std::pair<PlusNode, PlusNode>>> choices;
                        for (const auto & n : over_a) {
                            std::vector<std::pair<PlusNode, PlusNode>> opts;
                            for (const auto & m : over_b) {
                                if (!(base_f.pullback(m) == n))
                                    continue;
                                for (const auto & m2 : over_b2)
                                    if (PlusMap::pullback_with(m2, drop_last) == m)
                                        opts.emplace_back(m, m2);
                            }
                            choices.push_back(std::move(opts));
                        }
                        std::vector<std::size_t> pick(choices.size(), 0);
                        if (std::any_of(choices.begin(), choices.end(), [](const auto & c) { return c.empty(); }))
                            continue;
                        while (true) {
                            if (++examined > config.budget)
                                throw BudgetExceeded("check_family_binary: more than " + std::to_string(config.budget) +
                                                     " candidate instances");
                            AmalgamationInstance inst{k, a, b, b2, base_f, PlusMap{a, b2, e, {}}, PlusMap{b, b2, id, {}}};
                            for (std::size_t i = 0; i < choices.size(); ++i) {
                                const auto & [m, m2] = choices[i][pick[i]];
                                inst.f.overrides[over_a[i]] = m;
                                inst.f2.overrides[over_a[i]] = m2;
                                inst.g.overrides[m] = m2;
                            }
                            Verdict vf = respects(inst.f);
                            Verdict vf2 = respects(inst.f2);
                            if (vf == Verdict::Fails || vf2 == Verdict::Fails || !inst.g.valid() ||
                                !detail::compose_agrees(inst.g, inst.f, inst.f2)) {
                                ++sweep.invalid;
                            }
                            else {
                                ++sweep.instances;
                                PlusMap g_prime = prop1_transfer(inst.f, inst.f2, inst.g, k);
                                Verdict v = Verdict::Fails;
                                if (detail::compose_agrees(g_prime, inst.f, inst.f2) && detail::is_initial_inclusion(g_prime.base_map))
                                    v = respects(g_prime);
                                if (vf != Verdict::Holds || vf2 != Verdict::Holds)
                                    v = v == Verdict::Fails ? v : Verdict::Inconclusive;
                                if (v == Verdict::Holds)
                                    ++sweep.holds;
                                else if (v == Verdict::Fails)
                                    ++sweep.fails;
                                else
                                    ++sweep.inconclusive;
                                if (v != Verdict::Holds && !sweep.first_problem)
                                    sweep.first_problem = inst;
                            }
                            // next choice vector
                            std::size_t i = 0;
                            while (i < pick.size() && ++pick[i] == choices[i].size())
                                pick[i++] = 0;
                            if (i == pick.size())
                                break;
                        }
                    }
                }
        }

    sweep.outcome.depth_used = depth;
    if (sweep.fails > 0) {
        sweep.outcome.verdict = Verdict::Fails;
        sweep.outcome.note = "transfer refuted on " + std::to_string(sweep.fails) + " instance(s)";
    }
    else if (sweep.inconclusive > 0) {
        sweep.outcome.verdict = Verdict::Inconclusive;
        sweep.outcome.note = std::to_string(sweep.inconclusive) + " instance(s) inconclusive";
    }
    else {
        sweep.outcome.verdict = Verdict::Holds;
    }
    return sweep;
}

/// Language {E, H} with E binary and H ternary.
inline Language eh_language() { return Language({{"E", 2}, {"H", 3}}); }

/// The four-vertex structure whose monomorphic copies are forbidden in the ternary example.
inline Structure bad_clique()
{
    Structure f(eh_language(), 4);
    for (auto t : std::vector<Tuple>{{1, 0}, {1, 2}, {1, 3}})
        f.add("E", t);
    f.add("H", {0, 2, 3});
    return f;
}

inline HereditaryFamily bad_clique_family()
{
    return HereditaryFamily{eh_language(), {bad_clique()}, FamilyMode::Monomorphism, true};
}

struct Counterexample {
    AmalgamationInstance instance;
    WeakType t_a, t_b, t_b_prime_type, t_b2, t_b2_prime_type; // T_A, T_B, T'_B, T_B', T'_B'
    AmalgamationOutcome outcome;
};

/// The explicit failure of type-respecting amalgamation in the language {E, H}.
inline Counterexample counterexample_instance()
{
    const Language lang = eh_language();
    const int t0 = type_vertex(0);
    const int t1 = type_vertex(1);
    const std::size_t e = 0;
    const std::size_t h = 1;

    Structure a(lang, 0);
    Structure b(lang, 1);
    Structure b2(lang, 2);
    // both orientations so that the forbidden edge from 1 to 0 is present
    b2.add(e, {0, 1});
    b2.add(e, {1, 0});

    Counterexample cx{};
    cx.t_a = WeakType{a, 2, {}};
    cx.t_b = WeakType{b, 2, {}};
    cx.t_b_prime_type = WeakType{b, 2, {{h, {0, t0, t1}}}};
    cx.t_b2 = WeakType{b2, 2, {{e, {1, t0}}}};
    cx.t_b2_prime_type = WeakType{b2, 2, {{e, {1, t0}}, {h, {0, t0, t1}}}};

    PlusMap f{a, b, {}, {}};
    f.overrides[cx.t_a.restrict_to(1)] = cx.t_b.restrict_to(1);
    f.overrides[cx.t_a.node()] = cx.t_b.node();
    PlusMap f2{a, b2, {}, {}};
    f2.overrides[cx.t_a.restrict_to(1)] = cx.t_b2.restrict_to(1);
    f2.overrides[cx.t_a.node()] = cx.t_b2.node();
    PlusMap g{b, b2, {0}, {}};
    g.overrides[cx.t_b.restrict_to(1)] = cx.t_b2.restrict_to(1);
    g.overrides[cx.t_b.node()] = cx.t_b2.node();
    g.overrides[cx.t_b_prime_type.node()] = cx.t_b2_prime_type.node();

    cx.instance = AmalgamationInstance{bad_clique_family(), a, b, b2, f, f2, g};
    return cx;
}

inline Counterexample checked_counterexample(int depth = 3)
{
    Counterexample cx = counterexample_instance();
    cx.outcome = check_instance(cx.instance, depth);
    return cx;
}

} // namespace typeamalg
