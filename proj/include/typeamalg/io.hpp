#pragma once

// JSON documents and DOT export.

#include "typeamalg/amalgamation.hpp"
#include "typeamalg/ramsey.hpp"

#include <json.hpp>

#include <fstream>

namespace typeamalg {

using Json = nlohmann::ordered_json;

inline constexpr int kDocumentVersion = 1;

namespace detail {

    [[noreturn]] inline void field_error(const std::string & path, const std::string & what)
    {
        throw InputError(path + ": " + what);
    }

    inline const Json & member(const Json & j, const std::string & key, const std::string & path)
    {
        if (!j.is_object())
            field_error(path, "expected an object");
        auto it = j.find(key);
        if (it == j.end())
            field_error(path, "missing field \"" + key + "\"");
        return *it;
    }

    inline int as_int(const Json & j, const std::string & path)
    {
        if (!j.is_number_integer())
            field_error(path, "expected an integer");
        auto v = j.get<long long>();
        if (v < INT32_MIN || v > INT32_MAX)
            field_error(path, "integer out of range");
        return static_cast<int>(v);
    }

    inline std::string vertex_token(int x)
    {
        return is_type_vertex(x) ? "t" + std::to_string(type_index(x)) : std::to_string(x);
    }

    inline int parse_vertex_token(const Json & j, const std::string & path)
    {
        if (j.is_number_integer())
            return as_int(j, path);
        if (!j.is_string())
            field_error(path, "expected a vertex number or a type vertex \"t<i>\"");
        auto s = j.get<std::string>();
        try {
            std::size_t used = 0;
            if (!s.empty() && s[0] == 't') {
                int i = std::stoi(s.substr(1), &used);
                if (used + 1 == s.size() && i >= 0)
                    return type_vertex(i);
            }
            else {
                int v = std::stoi(s, &used);
                if (used == s.size() && v >= 0)
                    return v;
            }
        }
        catch (const std::exception &) {
        }
        field_error(path, "malformed vertex \"" + s + "\"");
    }

} // namespace detail

inline Json to_json(const Language & lang)
{
    Json out = Json::array();
    for (const auto & r : lang.relations())
        out.push_back(Json{{"name", r.name}, {"arity", r.arity}});
    return out;
}

inline Language language_from_json(const Json & j, const std::string & path = "language")
{
    if (!j.is_array())
        detail::field_error(path, "expected a list of relation symbols");
    std::vector<Relation> rels;
    for (std::size_t i = 0; i < j.size(); ++i) {
        std::string p = path + "[" + std::to_string(i) + "]";
        const auto & name = detail::member(j[i], "name", p);
        if (!name.is_string())
            detail::field_error(p + ".name", "expected a string");
        rels.push_back({name.get<std::string>(), detail::as_int(detail::member(j[i], "arity", p), p + ".arity")});
    }
    try {
        return Language(rels);
    }
    catch (const InputError & e) {
        detail::field_error(path, e.what());
    }
}

inline Json to_json(const Structure & s, const std::string & name = {})
{
    Json out;
    out["version"] = kDocumentVersion;
    if (!name.empty())
        out["name"] = name;
    out["language"] = to_json(s.language());
    out["size"] = s.size();
    Json rels = Json::object();
    for (std::size_t r = 0; r < s.language().size(); ++r) {
        Json list = Json::array();
        for (const auto & t : s.tuples(r))
            list.push_back(t);
        rels[s.language()[r].name] = list;
    }
    out["relations"] = rels;
    return out;
}

/// Structure from a document; the language may be supplied by the caller when the document omits it.
inline Structure structure_from_json(const Json & j, const std::string & path = "structure",
                                     const std::optional<Language> & inherited = std::nullopt)
{
    if (!j.is_object())
        detail::field_error(path, "expected an object");
    if (auto it = j.find("version"); it != j.end() && detail::as_int(*it, path + ".version") != kDocumentVersion)
        detail::field_error(path + ".version", "unsupported document version");
    Language lang = j.contains("language") ? language_from_json(j["language"], path + ".language")
                    : inherited           ? *inherited
                                          : (detail::field_error(path, "missing field \"language\""), Language{});
    int size = detail::as_int(detail::member(j, "size", path), path + ".size");
    if (size < 0 || size > kDefaultMaxVertices)
        detail::field_error(path + ".size", "size must be between 0 and " + std::to_string(kDefaultMaxVertices));
    Structure s(lang, size);
    if (!j.contains("relations"))
        return s;
    const auto & rels = j["relations"];
    if (!rels.is_object())
        detail::field_error(path + ".relations", "expected an object");
    for (const auto & [name, list] : rels.items()) {
        std::string p = path + ".relations." + name;
        auto r = lang.index_of(name);
        if (!r)
            detail::field_error(p, "unknown relation symbol \"" + name + "\"");
        if (!list.is_array())
            detail::field_error(p, "expected a list of tuples");
        for (std::size_t i = 0; i < list.size(); ++i) {
            std::string tp = p + "[" + std::to_string(i) + "]";
            if (!list[i].is_array())
                detail::field_error(tp, "expected a tuple");
            Tuple t;
            for (std::size_t x = 0; x < list[i].size(); ++x)
                t.push_back(detail::as_int(list[i][x], tp + "[" + std::to_string(x) + "]"));
            if (static_cast<int>(t.size()) != lang[*r].arity)
                detail::field_error(tp, "arity mismatch: " + name + " has arity " + std::to_string(lang[*r].arity) +
                                            " but the tuple has " + std::to_string(t.size()) + " entries");
            for (int x : t)
                if (x < 0 || x >= size)
                    detail::field_error(tp, "vertex " + std::to_string(x) + " out of range for size " + std::to_string(size));
            s.add(*r, t);
        }
    }
    return s;
}

/// Parses JSON text, reporting syntax errors with line and column.
inline Json parse_json_text(const std::string & text, const std::string & source = "input")
{
    try {
        return Json::parse(text);
    }
    catch (const nlohmann::json::parse_error & e) {
        std::size_t line = 1, column = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            }
            else {
                ++column;
            }
        }
        throw InputError(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": malformed JSON");
    }
}

inline Structure parse_structure(const std::string & text, const std::string & source = "input")
{
    return structure_from_json(parse_json_text(text, source), source);
}

inline std::string serialize(const Structure & s, const std::string & name = {}) { return to_json(s, name).dump(2) + "\n"; }

inline Json read_json_file(const std::string & path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError(path + ": cannot open file");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_json_text(text, path);
}

inline Json to_json(const PatternSet & data, const Language & lang)
{
    Json rels = Json::object();
    for (std::size_t r = 0; r < lang.size(); ++r) {
        Json list = Json::array();
        for (const auto & [rr, p] : data) {
            if (rr != r)
                continue;
            Json t = Json::array();
            for (int x : p)
                t.push_back(detail::vertex_token(x));
            list.push_back(t);
        }
        if (!list.empty())
            rels[lang[r].name] = list;
    }
    return rels;
}

inline PatternSet patterns_from_json(const Json & j, const Language & lang, const std::string & path)
{
    PatternSet out;
    if (!j.is_object())
        detail::field_error(path, "expected an object of relation symbols");
    for (const auto & [name, list] : j.items()) {
        std::string p = path + "." + name;
        auto r = lang.index_of(name);
        if (!r)
            detail::field_error(p, "unknown relation symbol \"" + name + "\"");
        if (!list.is_array())
            detail::field_error(p, "expected a list of tuples");
        for (std::size_t i = 0; i < list.size(); ++i) {
            std::string tp = p + "[" + std::to_string(i) + "]";
            if (!list[i].is_array() || static_cast<int>(list[i].size()) != lang[*r].arity)
                detail::field_error(tp, "arity mismatch for " + name);
            Tuple t;
            for (std::size_t x = 0; x < list[i].size(); ++x)
                t.push_back(detail::parse_vertex_token(list[i][x], tp));
            out.emplace(*r, t);
        }
    }
    return out;
}

inline Json to_json(const PlusNode & n, const Language & lang)
{
    return Json{{"depth", n.depth}, {"relations", to_json(n.data, lang)}};
}

inline PlusNode node_from_json(const Json & j, const Structure & base, const std::string & path)
{
    PlusNode n;
    n.depth = detail::as_int(detail::member(j, "depth", path), path + ".depth");
    if (j.contains("relations"))
        n.data = patterns_from_json(j["relations"], base.language(), path + ".relations");
    int w = type_width(base.language());
    if (n.depth < 0 || n.depth > w)
        detail::field_error(path + ".depth", "depth must be between 0 and " + std::to_string(w));
    for (const auto & [r, p] : n.data) {
        if (!is_admissible(p) || pattern_depth(p) > n.depth)
            detail::field_error(path, "pattern is not admissible at this depth");
        for (int x : p)
            if (!is_type_vertex(x) && x >= base.size())
                detail::field_error(path, "base vertex out of range");
    }
    return n;
}

inline Json to_json(const WeakType & t)
{
    return Json{{"base", to_json(t.base)}, {"width", t.width}, {"relations", to_json(t.mixed, t.base.language())}};
}

inline Json to_json(const PlusMap & m, bool with_structures = true)
{
    Json out;
    if (with_structures) {
        out["source"] = to_json(m.source);
        out["target"] = to_json(m.target);
    }
    out["base_map"] = m.base_map;
    Json ov = Json::array();
    for (const auto & [from, to] : m.overrides)
        ov.push_back(Json{{"from", to_json(from, m.source.language())}, {"to", to_json(to, m.target.language())}});
    out["overrides"] = ov;
    return out;
}

/// A map document; source and target may be given by the caller (as inside an instance).
inline PlusMap plus_map_from_json(const Json & j, const std::string & path, const std::optional<Structure> & source = std::nullopt,
                                  const std::optional<Structure> & target = std::nullopt)
{
    Structure src = source ? *source : structure_from_json(detail::member(j, "source", path), path + ".source");
    Structure tgt = target ? *target : structure_from_json(detail::member(j, "target", path), path + ".target");
    PlusMap m{src, tgt, {}, {}};
    const auto & bm = detail::member(j, "base_map", path);
    if (!bm.is_array())
        detail::field_error(path + ".base_map", "expected a list of vertices");
    for (std::size_t i = 0; i < bm.size(); ++i)
        m.base_map.push_back(detail::as_int(bm[i], path + ".base_map[" + std::to_string(i) + "]"));
    if (static_cast<int>(m.base_map.size()) != src.size())
        detail::field_error(path + ".base_map", "length must equal the source size");
    for (int x : m.base_map)
        if (x < 0 || x >= tgt.size())
            detail::field_error(path + ".base_map", "vertex out of range for the target");
    if (j.contains("overrides")) {
        const auto & ov = j["overrides"];
        if (!ov.is_array())
            detail::field_error(path + ".overrides", "expected a list");
        for (std::size_t i = 0; i < ov.size(); ++i) {
            std::string p = path + ".overrides[" + std::to_string(i) + "]";
            m.overrides[node_from_json(detail::member(ov[i], "from", p), src, p + ".from")] =
                node_from_json(detail::member(ov[i], "to", p), tgt, p + ".to");
        }
    }
    if (auto why = m.violation(); !why.empty())
        detail::field_error(path, why);
    return m;
}

inline const char * to_string(FamilyMode m) { return m == FamilyMode::Embedding ? "embedding" : "monomorphism"; }

inline Json to_json(const HereditaryFamily & k)
{
    Json out;
    out["language"] = to_json(k.language);
    out["mode"] = to_string(k.mode);
    out["ordered"] = k.ordered;
    Json list = Json::array();
    for (const auto & f : k.forbidden)
        list.push_back(to_json(f));
    out["forbidden"] = list;
    return out;
}

/// Family document. With "kind": "graph" the forbidden graphs are listed by size and edge list
/// and the loop and one-way arc are forbidden as well.
inline HereditaryFamily family_from_json(const Json & j, const std::string & path = "family")
{
    if (!j.is_object())
        detail::field_error(path, "expected an object");
    if (j.value("kind", std::string{}) == "graph") {
        std::vector<Structure> graphs;
        const auto & list = detail::member(j, "forbidden", path);
        if (!list.is_array())
            detail::field_error(path + ".forbidden", "expected a list");
        for (std::size_t i = 0; i < list.size(); ++i)
            graphs.push_back(structure_from_json(list[i], path + ".forbidden[" + std::to_string(i) + "]", graph_language()));
        return graph_family(graphs);
    }
    Language lang = language_from_json(detail::member(j, "language", path), path + ".language");
    HereditaryFamily k{lang, {}, FamilyMode::Embedding, true};
    std::string mode = j.value("mode", std::string{"embedding"});
    if (mode == "monomorphism")
        k.mode = FamilyMode::Monomorphism;
    else if (mode != "embedding")
        detail::field_error(path + ".mode", "expected \"embedding\" or \"monomorphism\"");
    if (j.contains("ordered")) {
        if (!j["ordered"].is_boolean())
            detail::field_error(path + ".ordered", "expected a boolean");
        k.ordered = j["ordered"].get<bool>();
    }
    if (j.contains("forbidden")) {
        const auto & list = j["forbidden"];
        if (!list.is_array())
            detail::field_error(path + ".forbidden", "expected a list");
        for (std::size_t i = 0; i < list.size(); ++i) {
            auto f = structure_from_json(list[i], path + ".forbidden[" + std::to_string(i) + "]", lang);
            if (!(f.language() == lang))
                detail::field_error(path + ".forbidden[" + std::to_string(i) + "]", "language differs from the family");
            k.forbidden.push_back(f);
        }
    }
    return k;
}

inline Json to_json(const AmalgamationInstance & inst)
{
    return Json{{"version", kDocumentVersion},
                {"family", to_json(inst.family)},
                {"A", to_json(inst.a)},
                {"B", to_json(inst.b)},
                {"B2", to_json(inst.b2)},
                {"f", to_json(inst.f, false)},
                {"f2", to_json(inst.f2, false)},
                {"g", to_json(inst.g, false)}};
}

inline AmalgamationInstance instance_from_json(const Json & j, const std::string & path = "instance")
{
    auto k = family_from_json(detail::member(j, "family", path), path + ".family");
    auto a = structure_from_json(detail::member(j, "A", path), path + ".A", k.language);
    auto b = structure_from_json(detail::member(j, "B", path), path + ".B", k.language);
    auto b2 = structure_from_json(detail::member(j, "B2", path), path + ".B2", k.language);
    return AmalgamationInstance{k,
                                a,
                                b,
                                b2,
                                plus_map_from_json(detail::member(j, "f", path), path + ".f", a, b),
                                plus_map_from_json(detail::member(j, "f2", path), path + ".f2", a, b2),
                                plus_map_from_json(detail::member(j, "g", path), path + ".g", b, b2)};
}

inline Json to_json(const CheckOutcome & c)
{
    Json out;
    out["verdict"] = to_string(c.verdict);
    out["depth_used"] = c.depth_used;
    out["search_bound"] = c.search_bound;
    out["note"] = c.note;
    out["witness"] = c.witness ? to_json(*c.witness) : Json(nullptr);
    return out;
}

inline Json to_json(const Coloring & c)
{
    Json out;
    out["colors"] = c.color_count;
    out["domain"] = c.domain;
    out["assignment"] = c.assignment;
    if (!c.labels.empty())
        out["labels"] = c.labels;
    return out;
}

inline Coloring coloring_from_json(const Json & j, const std::string & path = "coloring")
{
    Coloring c;
    c.color_count = detail::as_int(detail::member(j, "colors", path), path + ".colors");
    try {
        c.domain = detail::member(j, "domain", path).get<std::vector<VertexMap>>();
        c.assignment = detail::member(j, "assignment", path).get<std::vector<int>>();
    }
    catch (const nlohmann::json::exception &) {
        detail::field_error(path, "domain and assignment must be integer lists");
    }
    if (c.domain.size() != c.assignment.size())
        detail::field_error(path, "assignment must colour every domain element");
    for (int x : c.assignment)
        if (x < 0 || x >= c.color_count)
            detail::field_error(path + ".assignment", "colour out of range");
    return c;
}

// DOT export

namespace detail {

    inline std::string dot_escape(const std::string & s)
    {
        std::string out;
        for (char ch : s) {
            if (ch == '"' || ch == '\\')
                out += '\\';
            out += ch;
        }
        return out;
    }

    inline std::string node_label(const PlusNode & n, const Language & lang)
    {
        return "d" + std::to_string(n.depth) + " " + to_json(n.data, lang).dump();
    }

} // namespace detail

inline std::string structure_dot(const Structure & s)
{
    std::ostringstream os;
    os << "digraph structure {\n";
    for (int v = 0; v < s.size(); ++v)
        os << "  v" << v << " [label=\"" << v << "\"];\n";
    for (std::size_t r = 0; r < s.language().size(); ++r)
        for (const auto & t : s.tuples(r)) {
            if (t.size() == 2) {
                os << "  v" << t[0] << " -> v" << t[1] << " [label=\"" << detail::dot_escape(s.language()[r].name) << "\"];\n";
                continue;
            }
            std::string label = s.language()[r].name + "(";
            for (std::size_t i = 0; i < t.size(); ++i)
                label += (i ? "," : "") + std::to_string(t[i]);
            label += ")";
            os << "  \"" << detail::dot_escape(label) << "\" [shape=box];\n";
            for (int x : t)
                os << "  \"" << detail::dot_escape(label) << "\" -> v" << x << " [arrowhead=none];\n";
        }
    os << "}\n";
    return os.str();
}

inline std::string type_tree_dot(const Structure & u)
{
    TypeTree tree(u);
    std::ostringstream os;
    os << "digraph type_tree {\n  root [label=\"level 0\"];\n";
    const auto & nodes = tree.nodes();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        std::string members;
        for (int m : nodes[i].members)
            members += (members.empty() ? "" : ",") + std::to_string(m);
        os << "  n" << i << " [label=\"level " << nodes[i].level << "\\n{" << members << "}\"];\n";
        if (tree.parent(i) >= 0)
            os << "  n" << tree.parent(i) << " -> n" << i << ";\n";
    }
    os << "}\n";
    return os.str();
}

inline std::string weak_type_tree_dot(const Structure & u)
{
    auto nodes = tree_of_weak_types(u);
    std::ostringstream os;
    os << "digraph weak_type_tree {\n";
    for (std::size_t i = 0; i < nodes.size(); ++i)
        os << "  n" << i << " [label=\"level " << nodes[i].level << "\\n"
           << detail::dot_escape(detail::node_label(nodes[i].node, u.language())) << "\"];\n";
    // covering edges of the tree order
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            if (i == j || !weak_tree_leq(nodes[i], nodes[j]))
                continue;
            bool covered = true;
            for (std::size_t m = 0; m < nodes.size() && covered; ++m)
                if (m != i && m != j && weak_tree_leq(nodes[i], nodes[m]) && weak_tree_leq(nodes[m], nodes[j]))
                    covered = false;
            if (covered)
                os << "  n" << i << " -> n" << j << ";\n";
        }
    os << "}\n";
    return os.str();
}

inline std::string plus_structure_dot(const PlusStructure & p)
{
    std::ostringstream os;
    os << "digraph plus_structure {\n";
    const auto & base = p.base();
    for (int v = 0; v < base.size(); ++v)
        os << "  v" << v << " [label=\"" << v << "\"];\n";
    for (int d = 1; d <= p.width(); ++d)
        for (const auto & n : p.nodes(d)) {
            int v = p.vertex_of(n);
            os << "  v" << v << " [shape=box,label=\"" << detail::dot_escape(detail::node_label(n, base.language())) << "\"];\n";
            if (d > 1)
                os << "  v" << p.parent_vertex(v) << " -> v" << v << " [style=dashed];\n";
        }
    auto tuples = p.relation_tuples();
    for (std::size_t r = 0; r < tuples.size(); ++r)
        for (const auto & t : tuples[r])
            if (t.size() == 2)
                os << "  v" << t[0] << " -> v" << t[1] << " [label=\"" << detail::dot_escape(base.language()[r].name) << "\"];\n";
    os << "}\n";
    return os.str();
}

} // namespace typeamalg
