#include "doctest.h"

#include "novflow/io.hpp"
#include "novflow/morse.hpp"
#include "support.hpp"

#include <random>

using namespace novflow;

namespace {

Document reparse(const Document& d) { return parse_document(serialize(d)); }

}  // namespace

TEST_CASE("minimal flow category document") {
    const auto d = parse_document(R"({"fmt": 1, "kind": "flow_category",
        "objects": [{"id": "a", "mu": 1, "energy": {"num": 1, "den": 2}},
                    {"id": "b", "mu": 0, "energy": 0}],
        "morphisms": [{"source": "a", "target": "b", "r": 0, "count": -3}]})");
    CHECK(d.kind() == "flow_category");
    const auto& f = std::get<FlowCategoryDesc>(d.payload);
    REQUIRE(f.objects.size() == 2);
    CHECK(f.objects[0].energy == Rational(1, 2));
    CHECK(*f.morphisms[0].count == -3);
    CHECK(reparse(d) == d);
}

TEST_CASE("schema and parse errors") {
    CHECK_THROWS_AS(parse_document(R"({"fmt": 1, "kind": "flow_category", "objects": [{"id": "a", "mu": 0,
        "energy": {"num": 1, "den": 0}}], "morphisms": []})"), SchemaError);
    CHECK_THROWS_AS(parse_document(R"({"fmt": 1, "kind": "flow_category", "objects": [{"id": "a", "mu": 0,
        "energy": "1/0"}], "morphisms": []})"), SchemaError);
    try {
        parse_document(R"({"fmt": 1, "kind": "flow_category", "objects": [{"id": "a", "mu": "x", "energy": 0}], "morphisms": []})");
        FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
        CHECK(std::string(e.what()).find("/objects/0/mu") != std::string::npos);
    }
    try {
        parse_document("{\"fmt\": 1,\n  \"kind\": ]");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).rfind("line 2, column 11", 0) == 0);
    }
    CHECK_THROWS_AS(parse_document(R"({"fmt": 2, "kind": "section"})"), SchemaError);
    CHECK_THROWS_AS(parse_document(R"({"fmt": 1, "kind": "cube"})"), SchemaError);
    CHECK_THROWS_AS(parse_document(R"([1, 2])"), SchemaError);
    CHECK_THROWS_AS(parse_document(R"({"fmt": 1, "kind": "section", "corner": 1, "free": 0,
        "components": [{"terms": [{"exp": [1, 0], "coeff": 1}]}]})"), SchemaError);
    CHECK_THROWS_AS(parse_document(R"({"fmt": 1, "kind": "novikov_matrix", "entries": [["1", "T"], ["2"]]})"), SchemaError);
    CHECK_THROWS_AS(parse_document(R"({"fmt": 1, "kind": "complex", "generators": [{"id": "a", "degree": 0},
        {"id": "b", "degree": 0}], "differential": {"entries": [[0, 1], [0, 0]]}})"), SchemaError);
}

TEST_CASE("Morse exports round-trip") {
    for (const auto& name : simplicial_names()) {
        INFO(name);
        const auto x = build_simplicial(name);
        const Document d{to_flow_category(morse_complex(x, discrete_gradient(x)))};
        const auto text = serialize(d);
        const auto back = parse_document(text);
        CHECK(back == d);
        CHECK(serialize(back) == text);
    }
}

TEST_CASE("every kind round-trips") {
    std::mt19937 rng(41);
    const auto tp = testing::random_two_part(rng);
    const auto c = assemble_complex(tp.category, 5);
    const auto m = NovikovMatrix(2, 2, {parse_novikov("2 + T^(1/2)"), parse_novikov("-T^(7/3)"), NovikovElement(),
                                        parse_novikov("123456789012345678901234567890*T^2")}, 3);
    const Poly x = Poly::variable(2, 0), y = Poly::variable(2, 1);
    const SectionOnBox s{1, 1, {x * y - Rational(1, 3) * y, Poly::constant(2, Rational(-7, 2))}};
    const FiniteGroupRep g(2, 1, {{{{1, 0}, {0, -1}}, {{-1}}}});
    auto bd = BoundaryData::from_section({1, 1, {y}});
    bd.group = g;
    const std::vector<Document> docs = {{m}, {c}, {tp.category}, {strat_square()}, {collar(strat_square())}, {s}, {g}, {bd}};
    for (const auto& d : docs) {
        INFO(d.kind());
        CHECK(reparse(d) == d);
    }
}
