// typeamalg: command-line front end for the structure, type, amalgamation and arrow checks.
//
// Exit codes: 0 holds/success, 1 fails, 2 inconclusive or refused, 64 input error.

#include "typeamalg/typeamalg.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <regex>

using namespace typeamalg;

namespace {

constexpr int kExitHolds = 0;
constexpr int kExitFails = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitInput = 64;

struct Options {
    bool json = false;
    int depth = 3;
    std::uint64_t budget = kDefaultArrowBudget;
    unsigned jobs = 1;
};

struct Report {
    std::string verdict = "OK";
    Json result = Json::object();
    std::vector<std::string> lines; // human-readable output
};

int exit_code(const std::string & verdict)
{
    if (verdict == "FAILS")
        return kExitFails;
    if (verdict == "INCONCLUSIVE" || verdict == "REFUSED")
        return kExitInconclusive;
    if (verdict == "ERROR")
        return kExitInput;
    return kExitHolds;
}

/// Accepts both "path" and "C=path".
std::string strip_role(const std::string & arg)
{
    static const std::regex role("^[A-Za-z][A-Za-z0-9]*=(.+)$");
    std::smatch m;
    if (std::regex_match(arg, m, role))
        return m[1];
    return arg;
}

Structure load_structure(const std::string & arg) { return structure_from_json(read_json_file(strip_role(arg)), strip_role(arg)); }

HereditaryFamily load_family(const std::string & path) { return family_from_json(read_json_file(path), path); }

std::vector<int> parse_list(const std::string & text, const std::string & what)
{
    std::vector<int> out;
    if (text.empty())
        return out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            int v = std::stoi(item, &used);
            if (used != item.size())
                throw std::invalid_argument(item);
            out.push_back(v);
        }
        catch (const std::exception &) {
            throw InputError(what + ": malformed integer list \"" + text + "\"");
        }
    }
    return out;
}

std::string tuple_text(const std::vector<int> & t)
{
    std::string s = "(";
    for (std::size_t i = 0; i < t.size(); ++i)
        s += (i ? "," : "") + std::to_string(t[i]);
    return s + ")";
}

std::string node_text(const PlusNode & n, const Language & lang) { return "depth " + std::to_string(n.depth) + " " + to_json(n.data, lang).dump(); }

void describe_outcome(Report & rep, const CheckOutcome & c)
{
    rep.verdict = to_string(c.verdict);
    rep.result["outcome"] = to_json(c);
    rep.lines.push_back(rep.verdict + (c.note.empty() ? "" : ": " + c.note));
    rep.lines.push_back("depth used " + std::to_string(c.depth_used) + ", conclusive bound " + std::to_string(c.search_bound));
    if (c.witness)
        rep.lines.push_back("witness extension: " + to_json(*c.witness).dump());
}

} // namespace

int main(int argc, char ** argv)
{
    Options opt;
    if (const char * env = std::getenv("TYPEAMALG_BUDGET")) {
        try {
            opt.budget = std::stoull(env);
        }
        catch (const std::exception &) {
            std::cerr << "TYPEAMALG_BUDGET: expected a non-negative integer\n";
            return kExitInput;
        }
    }
    opt.jobs = std::max(1U, std::thread::hardware_concurrency());

    CLI::App app{"Checks for enumerated structures, weak types and type-respecting amalgamation", "typeamalg"};
    app.fallthrough();
    app.require_subcommand(1);
    app.add_flag("--json", opt.json, "Emit a JSON run report");
    app.add_option("--depth", opt.depth, "Number of new vertices explored by bounded checks")->check(CLI::NonNegativeNumber);
    app.add_option("--budget", opt.budget, "Search ceiling for colouring enumeration (env TYPEAMALG_BUDGET)");
    app.add_option("--jobs", opt.jobs, "Worker threads for colouring search")->check(CLI::PositiveNumber);

    std::function<void(Report &)> action;
    auto on = [&](CLI::App * sub, std::function<void(Report &)> fn) { sub->callback([&action, fn] { action = fn; }); };

    // struct validate
    auto * st = app.add_subcommand("struct", "Structure documents");
    st->require_subcommand(1);
    std::string file_a, file_b, file_c, family_file;
    auto * st_validate = st->add_subcommand("validate", "Parse and validate a structure document");
    st_validate->add_option("file", file_a, "Structure document")->required();
    st_validate->add_option("--family", family_file, "Also test membership in a family");
    on(st_validate, [&](Report & rep) {
        auto s = load_structure(file_a);
        rep.result["structure"] = to_json(s);
        rep.lines.push_back("valid structure with " + std::to_string(s.size()) + " vertices and " +
                            std::to_string(s.tuple_count()) + " tuples");
        if (!family_file.empty()) {
            bool member = family_member(load_family(family_file), s);
            rep.result["member"] = member;
            rep.verdict = member ? "HOLDS" : "FAILS";
            rep.lines.push_back(member ? "member of the family" : "not a member of the family");
        }
    });

    // emb list
    auto * emb = app.add_subcommand("emb", "Embeddings");
    emb->require_subcommand(1);
    bool mono = false;
    auto * emb_list = emb->add_subcommand("list", "List embeddings A -> B in lexicographic order");
    emb_list->add_option("A", file_a, "Source structure")->required();
    emb_list->add_option("B", file_b, "Target structure")->required();
    emb_list->add_flag("--mono", mono, "Report whether an ordered monomorphism exists instead");
    on(emb_list, [&](Report & rep) {
        auto a = load_structure(file_a);
        auto b = load_structure(file_b);
        if (mono) {
            auto m = find_monomorphism(a, b, true);
            rep.verdict = m ? "HOLDS" : "FAILS";
            rep.result["monomorphism"] = m ? Json(*m) : Json(nullptr);
            rep.lines.push_back(m ? "monomorphism " + tuple_text(*m) : "no monomorphism");
            return;
        }
        auto all = enumerate_embeddings(a, b);
        rep.result["count"] = all.size();
        rep.result["embeddings"] = all;
        rep.lines.push_back(std::to_string(all.size()) + " embedding(s)");
        for (const auto & e : all)
            rep.lines.push_back("  " + tuple_text(e));
    });

    // types tree | types meets
    auto * types = app.add_subcommand("types", "Trees of 1-types");
    types->require_subcommand(1);
    std::string copy_text;
    auto * types_tree = types->add_subcommand("tree", "List the nodes of the tree of 1-types");
    types_tree->add_option("U", file_a, "Structure")->required();
    on(types_tree, [&](Report & rep) {
        auto u = load_structure(file_a);
        TypeTree tree(u);
        Json nodes = Json::array();
        for (std::size_t i = 0; i < tree.nodes().size(); ++i) {
            const auto & n = tree.nodes()[i];
            nodes.push_back(Json{{"level", n.level}, {"members", n.members}, {"parent", tree.parent(i)}});
            rep.lines.push_back("level " + std::to_string(n.level) + " " + tuple_text(n.members) + " parent " +
                                std::to_string(tree.parent(i)));
        }
        rep.result["nodes"] = nodes;
    });
    auto * types_meets = types->add_subcommand("meets", "Shape of the meet closure of a copy");
    types_meets->add_option("U", file_a, "Structure")->required();
    types_meets->add_option("--copy", copy_text, "Increasing vertex list, e.g. 0,2,3")->required();
    on(types_meets, [&](Report & rep) {
        auto u = load_structure(file_a);
        auto code = meet_closure_shape(u, parse_list(copy_text, "--copy"));
        rep.result["shape"] = code.str();
        rep.result["closure_size"] = code.nodes.size();
        rep.lines.push_back(std::to_string(code.nodes.size()) + " closure node(s): " + code.str());
    });

    // weaktypes enum | weaktypes of-tuple
    auto * wt = app.add_subcommand("weaktypes", "Weak types");
    wt->require_subcommand(1);
    std::size_t limit = kDefaultEnumerationLimit;
    int level = 0;
    std::string tuple_arg;
    auto * wt_enum = wt->add_subcommand("enum", "Enumerate the weak types extending a base");
    wt_enum->add_option("base", file_a, "Base structure")->required();
    wt_enum->add_option("--limit", limit, "Refuse beyond this many weak types");
    on(wt_enum, [&](Report & rep) {
        auto base = load_structure(file_a);
        auto all = enumerate_weak_types(base, limit);
        Json list = Json::array();
        for (const auto & t : all)
            list.push_back(to_json(t.mixed, base.language()));
        rep.result["count"] = all.size();
        rep.result["weak_types"] = list;
        rep.lines.push_back(std::to_string(all.size()) + " weak type(s)");
        for (const auto & t : all)
            rep.lines.push_back("  " + to_json(t.mixed, base.language()).dump());
    });
    auto * wt_tuple = wt->add_subcommand("of-tuple", "Weak type of an increasing tuple over an initial segment");
    wt_tuple->add_option("U", file_a, "Structure")->required();
    wt_tuple->add_option("--level", level, "Length of the initial segment")->required();
    wt_tuple->add_option("--tuple", tuple_arg, "Increasing vertices above the level, e.g. 3,4")->required();
    on(wt_tuple, [&](Report & rep) {
        auto u = load_structure(file_a);
        auto t = weak_type_of_tuple(u, level, parse_list(tuple_arg, "--tuple"));
        rep.result["weak_type"] = to_json(t);
        rep.lines.push_back(to_json(t.mixed, u.language()).dump());
    });

    // plus
    auto * plus = app.add_subcommand("plus", "Materialize the plus-structure of a small base");
    plus->add_option("base", file_a, "Base structure")->required();
    plus->add_option("--limit", limit, "Refuse beyond this many nodes");
    on(plus, [&](Report & rep) {
        auto base = load_structure(file_a);
        auto p = plus_structure(base, limit);
        Json vertices = Json::array();
        for (int v = 0; v < static_cast<int>(p.vertex_count()); ++v) {
            Json entry;
            entry["vertex"] = v;
            if (v < base.size()) {
                entry["base"] = v;
            }
            else {
                entry["successor"] = p.parent_vertex(v);
                entry["node"] = to_json(p.node_at(v), base.language());
            }
            vertices.push_back(entry);
        }
        rep.result["vertex_count"] = p.vertex_count();
        rep.result["vertices"] = vertices;
        rep.lines.push_back(std::to_string(p.vertex_count()) + " vertices (" + std::to_string(base.size()) + " base, " +
                            std::to_string(p.node_count()) + " type nodes)");
        for (int d = 1; d <= p.width(); ++d)
            for (const auto & n : p.nodes(d))
                rep.lines.push_back("  v" + std::to_string(p.vertex_of(n)) + " " + node_text(n, base.language()));
    });

    // respect check | respect family-check
    auto * respect = app.add_subcommand("respect", "Type-respecting embeddings");
    respect->require_subcommand(1);
    std::string map_text;
    auto * respect_check = respect->add_subcommand("check", "Whether a base embedding A -> B is type-respecting");
    respect_check->add_option("A", file_a, "Source structure")->required();
    respect_check->add_option("B", file_b, "Target structure")->required();
    respect_check->add_option("--map", map_text, "Images of the source vertices, e.g. 0,2")->required();
    on(respect_check, [&](Report & rep) {
        auto a = load_structure(file_a);
        auto b = load_structure(file_b);
        auto h = parse_list(map_text, "--map");
        if (static_cast<int>(h.size()) != a.size())
            throw InputError("--map: expected " + std::to_string(a.size()) + " images");
        for (int x : h)
            if (x < 0 || x >= b.size())
                throw InputError("--map: vertex out of range");
        auto bad = type_respecting_violation(a, b, h);
        rep.verdict = bad ? "FAILS" : "HOLDS";
        rep.result["violating_vertex"] = bad ? Json(*bad) : Json(nullptr);
        rep.lines.push_back(bad ? "not type-respecting at source vertex " + std::to_string(*bad) : "type-respecting");
    });
    auto * respect_family = respect->add_subcommand("family-check", "Bounded check that a plus-map is K-type-respecting");
    respect_family->add_option("map", file_a, "Plus-map document")->required();
    respect_family->add_option("--family", family_file, "Family document")->required();
    on(respect_family, [&](Report & rep) {
        auto h = plus_map_from_json(read_json_file(file_a), file_a);
        auto k = load_family(family_file);
        describe_outcome(rep, is_family_type_respecting(h, k, opt.depth));
    });

    // amalg check | amalg counterexample
    auto * amalg = app.add_subcommand("amalg", "Type-respecting amalgamation");
    amalg->require_subcommand(1);
    auto report_amalg = [](Report & rep, const AmalgamationOutcome & out) {
        describe_outcome(rep, out.outcome);
        rep.result["certificate"] = out.certificate ? to_json(*out.certificate, false) : Json(nullptr);
        rep.result["certificate_source"] = out.certificate_source;
        rep.result["log"] = out.log;
        for (const auto & l : out.log)
            rep.lines.push_back("  " + l);
    };
    auto * amalg_check = amalg->add_subcommand("check", "Search for g' on an amalgamation instance");
    amalg_check->add_option("instance", file_a, "Instance document")->required();
    on(amalg_check, [&](Report & rep) {
        auto inst = instance_from_json(read_json_file(file_a), file_a);
        report_amalg(rep, check_instance(inst, opt.depth));
    });
    auto * amalg_cx = amalg->add_subcommand("counterexample", "Rebuild and check the ternary failure of amalgamation");
    on(amalg_cx, [&](Report & rep) {
        auto cx = checked_counterexample(opt.depth);
        rep.result["instance"] = to_json(cx.instance);
        rep.result["weak_types"] = Json{{"T_A", to_json(cx.t_a)},
                                        {"T_B", to_json(cx.t_b)},
                                        {"T'_B", to_json(cx.t_b_prime_type)},
                                        {"T_B'", to_json(cx.t_b2)},
                                        {"T'_B'", to_json(cx.t_b2_prime_type)}};
        report_amalg(rep, cx.outcome);
    });

    // arrows
    auto * arrow = app.add_subcommand("arrows", "Arrow relation C -> (B)^A_{k,l}");
    int k = 2, l = 1;
    bool type_respecting = false, strict = false, no_symmetry = false;
    arrow->add_option("C", file_c, "Host structure (path or C=path)")->required();
    arrow->add_option("B", file_b, "Copy structure (path or B=path)")->required();
    arrow->add_option("A", file_a, "Coloured structure (path or A=path)")->required();
    arrow->add_option("-k", k, "Number of colours")->check(CLI::PositiveNumber);
    arrow->add_option("-l", l, "Allowed colours on a copy")->check(CLI::NonNegativeNumber);
    arrow->add_flag("--type-respecting", type_respecting, "Use the type-respecting relation");
    arrow->add_option("--family", family_file, "Family for the type-respecting relation");
    arrow->add_flag("--strict", strict, "Require copies of B to be K-type-respecting as well");
    arrow->add_flag("--no-symmetry", no_symmetry, "Do not reduce by colour permutations");
    on(arrow, [&](Report & rep) {
        auto c = load_structure(file_c);
        auto b = load_structure(file_b);
        auto a = load_structure(file_a);
        ArrowConfig cfg{opt.budget, !no_symmetry, opt.jobs};
        if (type_respecting) {
            if (family_file.empty())
                throw InputError("--type-respecting requires --family");
            auto res = arrows_type_respecting(c, b, a, k, l, load_family(family_file), opt.depth, strict, cfg);
            describe_outcome(rep, res.outcome);
            rep.result["domain_size"] = res.domain.size();
            rep.result["copies"] = res.copies;
            rep.result["witness_coloring"] = res.witness_coloring ? to_json(*res.witness_coloring) : Json(nullptr);
            return;
        }
        auto res = arrows(c, b, a, k, l, cfg);
        rep.verdict = res.holds ? "HOLDS" : "FAILS";
        rep.result["domain_size"] = res.domain_size;
        rep.result["copies"] = res.copies;
        rep.result["witness_coloring"] = res.witness_coloring ? to_json(*res.witness_coloring) : Json(nullptr);
        rep.lines.push_back(std::string(res.holds ? "arrow holds" : "arrow fails") + " (" + std::to_string(res.domain_size) +
                            " copies of A, " + std::to_string(res.copies) + " copies of B)");
        if (res.witness_coloring) {
            std::string s;
            for (std::size_t i = 0; i < res.witness_coloring->domain.size(); ++i)
                s += (i ? " " : "") + tuple_text(res.witness_coloring->domain[i]) + ":" +
                     std::to_string(res.witness_coloring->assignment[i]);
            rep.lines.push_back("defeating colouring " + s);
        }
    });

    // degree
    auto * degree = app.add_subcommand("degree", "Least l with C -> (C)^A_{k,l} (finite analogue only)");
    degree->add_option("C", file_c, "Structure")->required();
    degree->add_option("A", file_a, "Coloured structure")->required();
    degree->add_option("-k", k, "Number of colours")->check(CLI::PositiveNumber);
    on(degree, [&](Report & rep) {
        int d = finite_degree(load_structure(file_c), load_structure(file_a), k, ArrowConfig{opt.budget, true, opt.jobs});
        rep.result["degree"] = d;
        rep.lines.push_back("finite degree " + std::to_string(d));
    });

    // export dot
    auto * exp = app.add_subcommand("export", "Export for inspection");
    exp->require_subcommand(1);
    std::string kind;
    auto * dot = exp->add_subcommand("dot", "Graphviz rendering");
    dot->add_option("kind", kind, "structure | type-tree | weak-tree | plus")
        ->required()
        ->check(CLI::IsMember({"structure", "type-tree", "weak-tree", "plus"}));
    dot->add_option("file", file_a, "Structure document")->required();
    on(dot, [&](Report & rep) {
        auto s = load_structure(file_a);
        std::string text = kind == "structure"   ? structure_dot(s)
                           : kind == "type-tree" ? type_tree_dot(s)
                           : kind == "weak-tree" ? weak_type_tree_dot(s)
                                                 : plus_structure_dot(plus_structure(s));
        rep.result["dot"] = text;
        rep.lines.push_back(text);
    });

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp & e) {
        return app.exit(e);
    }
    catch (const CLI::ParseError & e) {
        app.exit(e);
        std::cerr << app.help();
        return kExitInput;
    }

    Report rep;
    auto start = std::chrono::steady_clock::now();
    try {
        action(rep);
    }
    catch (const InputError & e) {
        rep.verdict = "ERROR";
        rep.result = Json{{"error", e.what()}};
        rep.lines = {std::string("error: ") + e.what()};
    }
    catch (const BudgetExceeded & e) {
        rep.verdict = "REFUSED";
        rep.result = Json{{"error", e.what()}};
        rep.lines = {std::string("refused: ") + e.what()};
    }
    catch (const Unsupported & e) {
        rep.verdict = "REFUSED";
        rep.result = Json{{"error", e.what()}};
        rep.lines = {std::string("unsupported: ") + e.what()};
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (opt.json) {
        Json out;
        out["command"] = std::vector<std::string>(argv + 1, argv + argc);
        out["config"] = Json{{"depth", opt.depth}, {"budget", opt.budget}};
        out["verdict"] = rep.verdict;
        out["exit_code"] = exit_code(rep.verdict);
        out["result"] = rep.result;
        out["timing"] = Json{{"seconds", seconds}};
        std::cout << out.dump(2) << "\n";
    }
    else {
        auto & stream = rep.verdict == "ERROR" || rep.verdict == "REFUSED" ? std::cerr : std::cout;
        for (const auto & line : rep.lines)
            stream << line << "\n";
    }
    return exit_code(rep.verdict);
}
