#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace typeamalg;
using namespace testing_support;

namespace {

std::string parse_error(const std::string & text)
{
    try {
        parse_structure(text, "doc");
    } catch (const InputError & e) {
        return e.what();
    }
    return {};
}

std::string slurp(const std::filesystem::path & p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::filesystem::path> fixture_files()
{
    std::vector<std::filesystem::path> out;
    for (const auto & entry : std::filesystem::directory_iterator(TYPEAMALG_FIXTURES))
        if (entry.path().extension() == ".json")
            out.push_back(entry.path());
    std::sort(out.begin(), out.end());
    return out;
}

const std::string k3_text = R"({"version": 1, "language": [{"name": "E", "arity": 2}], "size": 3,
  "relations": {"E": [[0,1],[1,0],[0,2],[2,0],[1,2],[2,1]]}})";

} // namespace

TEST_CASE("a K3 document")
{
    auto s = parse_structure(k3_text);
    CHECK(s.size() == 3);
    CHECK(s.tuples(0).size() == 6);
    CHECK(s == complete_graph(3));
    CHECK(fixture("k3") == complete_graph(3));
}

TEST_CASE("the forbidden structure document lists exactly its tuples")
{
    auto f = fixture("bad_clique");
    CHECK(f.tuples(0) == std::set<Tuple>{{1, 0}, {1, 2}, {1, 3}});
    CHECK(f.tuples(1) == std::set<Tuple>{{0, 2, 3}});
}

TEST_CASE("parse errors carry a location")
{
    auto lang = R"("language": [{"name": "E", "arity": 2}])";
    auto doc = [&](const std::string & rel) {
        return std::string("{\"version\": 1, ") + lang + ", \"size\": 2, \"relations\": {" + rel + "}}";
    };
    CHECK_THAT(parse_error(doc(R"("E": [[0,1],[1,2]])")), Catch::Matchers::ContainsSubstring("E[1]"));
    CHECK_THAT(parse_error(doc(R"("E": [[0,1],[1,2]])")), Catch::Matchers::ContainsSubstring("vertex 2"));
    CHECK_THAT(parse_error(doc(R"("F": [[0,1]])")), Catch::Matchers::ContainsSubstring("\"F\""));
    CHECK_THAT(parse_error(doc(R"("E": [[0,1,1]])")), Catch::Matchers::ContainsSubstring("arity"));
    CHECK_THAT(parse_error("{\"version\": 1,\n \"size\": 2,,}"), Catch::Matchers::ContainsSubstring("doc:2:"));
    CHECK_THAT(parse_error(R"({"version": 7, "language": [], "size": 0, "relations": {}})"),
               Catch::Matchers::ContainsSubstring("version"));
    CHECK_FALSE(parse_error(doc(R"("E": [[0,1]])")).size());
}

TEST_CASE("serialization is canonical")
{
    auto s = parse_structure(k3_text);
    auto text = serialize(s);
    CHECK(parse_structure(text) == s);
    CHECK(serialize(parse_structure(text)) == text);
    // tuples come out sorted
    auto j = nlohmann::json::parse(text);
    CHECK(j["relations"]["E"][0] == nlohmann::json::array({0, 1}));
    CHECK(j["relations"]["E"][5] == nlohmann::json::array({2, 1}));
}

TEST_CASE("every fixture round-trips")
{
    auto files = fixture_files();
    REQUIRE(files.size() >= 10);
    for (const auto & p : files) {
        INFO(p.filename().string());
        auto j = read_json_file(p.string());
        std::string first, second;
        if (j.contains("f")) {
            auto inst = instance_from_json(j, p.string());
            first = to_json(inst).dump(2);
            second = to_json(instance_from_json(Json::parse(first))).dump(2);
            CHECK(instance_from_json(Json::parse(first)).g == inst.g);
        }
        else if (j.contains("source")) {
            auto m = plus_map_from_json(j, p.string());
            first = to_json(m).dump(2);
            second = to_json(plus_map_from_json(Json::parse(first), "map")).dump(2);
            CHECK(first + "\n" == slurp(p));
        }
        else if (j.contains("forbidden")) {
            auto k = family_from_json(j, p.string());
            first = to_json(k).dump(2);
            second = to_json(family_from_json(Json::parse(first))).dump(2);
        }
        else {
            auto s = structure_from_json(j, p.string());
            first = serialize(s, j.value("name", ""));
            second = serialize(parse_structure(first), j.value("name", ""));
            CHECK(parse_structure(first) == s);
            CHECK(first == slurp(p));
        }
        CHECK(first == second);
    }
}

TEST_CASE("weak types render type vertices as strings")
{
    auto cx = counterexample_instance();
    auto j = to_json(cx.t_b_prime_type.node(), eh_language());
    CHECK(j["relations"]["H"] == Json::parse(R"([["0","t0","t1"]])"));
    CHECK(j["depth"] == 2);
    CHECK(node_from_json(j, cx.t_b_prime_type.base, "node") == cx.t_b_prime_type.node());
    auto e = to_json(cx.t_b2.node(), eh_language());
    CHECK(e["relations"]["E"] == Json::parse(R"([["1","t0"]])"));
}

TEST_CASE("plus-maps and colourings round-trip")
{
    auto cx = counterexample_instance();
    auto g = cx.instance.g;
    CHECK(plus_map_from_json(to_json(g), "g") == g);
    CHECK(plus_map_from_json(to_json(g, false), "g", g.source, g.target) == g);

    auto five = arrows(complete_graph(5), complete_graph(3), complete_graph(2), 2, 1);
    REQUIRE(five.witness_coloring.has_value());
    auto back = coloring_from_json(to_json(*five.witness_coloring));
    CHECK(back.domain == five.witness_coloring->domain);
    CHECK(back.assignment == five.witness_coloring->assignment);
    CHECK(back.color_count == 2);
}

TEST_CASE("DOT exports")
{
    auto p = plus_structure(graph(1, {}));
    auto dot = plus_structure_dot(p);
    CHECK(dot.rfind("digraph", 0) == 0);
    for (int v = 0; v < 5; ++v)
        CHECK(dot.find("v" + std::to_string(v)) != std::string::npos);
    CHECK(structure_dot(complete_graph(3)).find("v0 -> v1") != std::string::npos);
    CHECK(type_tree_dot(path_graph(3)).rfind("digraph", 0) == 0);
    CHECK(weak_type_tree_dot(path_graph(3)).rfind("digraph", 0) == 0);
}
