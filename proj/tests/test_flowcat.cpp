#include "doctest.h"

#include "novflow/flowcat.hpp"
#include "support.hpp"

#include <algorithm>
#include <random>

using namespace novflow;
using namespace novflow::testing;

namespace {

bool has_code(const ValidationReport& r, const std::string& code) {
    return std::any_of(r.violations.begin(), r.violations.end(), [&](const Violation& v) { return v.code == code; });
}

FlowCategoryDesc two_objects(long long count) {
    FlowCategoryDesc f;
    f.objects = {obj("a", 1, 1), obj("b", 0, 0)};
    f.morphisms = {rigid("a", "b", count)};
    return f;
}

// x (mu 2) -> z (mu 1) -> y (mu 0), no second route: d^2(y) has x-coefficient 1.
FlowCategoryDesc broken_chain() {
    FlowCategoryDesc f;
    f.objects = {obj("x", 2, 2), obj("z", 1, 1), obj("y", 0, 0)};
    f.morphisms = {rigid("x", "z", 1), rigid("z", "y", 1), sized("x", "y", 1)};
    return f;
}

NovikovComplex complex_of(std::vector<ComplexGenerator> gens, std::vector<std::vector<long long>> d,
                          ExtRational t = ExtRational::infinity()) {
    return NovikovComplex(NovikovGroupDesc::trivial(), std::move(gens), NovikovMatrix::from_integers(d, t));
}

}  // namespace

TEST_CASE("compose_label_sets examples") {
    auto c = compose_label_sets(2, 3);
    CHECK(c.target_size == 6);
    CHECK(c.injection == std::vector<int>{1, 2, 4, 5, 6});
    CHECK(c.missing == 3);
    c = compose_label_sets(0, 0);
    CHECK(c.target_size == 1);
    CHECK(c.injection.empty());
    CHECK(c.missing == 1);
    CHECK_THROWS_AS(compose_label_sets(-1, 0), InvariantViolation);
}

TEST_CASE("compose_label_sets is associative and misses exactly one label") {
    for (int r1 = 0; r1 <= 5; ++r1)
        for (int r2 = 0; r2 <= 5; ++r2) {
            const auto c = compose_label_sets(r1, r2);
            std::vector<int> all(c.injection);
            all.push_back(c.missing);
            std::sort(all.begin(), all.end());
            for (int i = 0; i < c.target_size; ++i) CHECK(all[i] == i + 1);
            for (int r3 = 0; r3 <= 5; ++r3) {
                // ((r1 r2) r3) and (r1 (r2 r3)) as maps from [r1] u [r2] u [r3]
                const auto ab = compose_label_sets(r1, r2), ab_c = compose_label_sets(ab.target_size, r3);
                const auto bc = compose_label_sets(r2, r3), a_bc = compose_label_sets(r1, bc.target_size);
                std::vector<int> left, right;
                for (int x : ab.injection) left.push_back(ab_c.injection[x - 1]);
                for (int j = 0; j < r3; ++j) left.push_back(ab_c.injection[ab.target_size + j]);
                for (int i = 0; i < r1; ++i) right.push_back(a_bc.injection[i]);
                for (int x : bc.injection) right.push_back(a_bc.injection[r1 + x - 1]);
                CHECK(left == right);
            }
        }
}

TEST_CASE("validation reports each kind of violation") {
    CHECK(validate_category(two_objects(1)).valid());

    auto f = two_objects(1);
    f.morphisms[0].r = 1;
    CHECK(has_code(validate_category(f), "LabelSizeMismatch"));

    f = two_objects(1);
    f.morphisms.push_back(rigid("a", "a", 1));
    CHECK(has_code(validate_category(f), "IdentityNotUnit"));

    f = two_objects(1);
    f.morphisms.push_back({"a", "b", {}, LabelKind::unit, 0, std::nullopt});
    CHECK(has_code(validate_category(f), "DuplicateRecord"));

    f = two_objects(1);
    f.morphisms.push_back(rigid("a", "zz", 1));
    CHECK(has_code(validate_category(f), "UnknownObject"));

    f = two_objects(1);
    f.morphisms[0].g = {1};
    CHECK(has_code(validate_category(f), "GroupRankMismatch"));

    f = broken_chain();
    f.morphisms.pop_back();
    const auto rep = validate_category(f);
    REQUIRE(has_code(rep, "CompositionMissing"));
    CHECK(rep.violations.front().witness == std::vector<std::string>{"x", "z", "y"});

    f = two_objects(1);
    f.flags.e_positive = true;
    CHECK(validate_category(f).valid());
    f.objects[0].energy = 0;
    CHECK(has_code(validate_category(f), "EnergyNotPositive"));

    f = two_objects(1);
    f.objects.push_back(obj("a", 3, 0));
    CHECK(has_code(validate_category(f), "DuplicateObject"));
}

TEST_CASE("group elements enter through energy and grading") {
    FlowCategoryDesc f;
    f.group = NovikovGroupDesc::make({Rational(1, 2)}, {0});
    f.objects = {obj("x", 1, 0), obj("y", 0, 0)};
    f.morphisms = {rigid("x", "y", 3, {1}), rigid("x", "y", -1, {0})};
    const auto c = assemble_complex(f, 4);
    CHECK(c.full_differential()(0, 1) == parse_novikov("-1 + 3*T^(1/2) mod T^4"));

    // mu(g) = 2 shifts the label size; in Z/4 grading only even multiples of 2N = 4 are periodic
    f.group = NovikovGroupDesc::make({1}, {2});
    f.objects = {obj("x", 1, 0), obj("y", 0, 0)};
    f.morphisms = {sized("x", "y", 2, {1})};
    CHECK(has_code(validate_category(f), "GradingNotPeriodic"));
    f.morphisms = {rigid("x", "y", 1, {2})};
    f.morphisms[0].r = 4;
    CHECK(validate_category(f).valid());
}

TEST_CASE("assemble_complex examples") {
    const auto c = assemble_complex(two_objects(2), ExtRational::infinity());
    CHECK(c.generators() == std::vector<ComplexGenerator>{{"a", 1}, {"b", 0}});
    CHECK(c.full_differential()(0, 1) == NovikovElement::constant(2));
    CHECK(nov_homology(c).to_string() == nov_homology(complex_of({{"a", 1}, {"b", 0}}, {{0, 2}, {0, 0}})).to_string());

    auto f = two_objects(1);
    f.morphisms[0].count.reset();
    CHECK_THROWS_AS(assemble_complex(f, 3), MissingCount);
    f.morphisms[0].r = 5;
    CHECK_THROWS_AS(assemble_complex(f, 3), InvalidCategory);
}

TEST_CASE("d^2 failure is reported with its witness") {
    const auto rep = check_d_squared(broken_chain());
    CHECK_FALSE(rep.ok);
    REQUIRE(rep.witnesses.size() == 1);
    CHECK(rep.witnesses[0].x == "x");
    CHECK(rep.witnesses[0].y == "y");
    CHECK(rep.witnesses[0].value == NovikovElement::constant(1));
    CHECK_THROWS_AS(assemble_complex(broken_chain(), 5), DSquaredNonzero);

    // a second route with the opposite sign repairs it
    auto f = broken_chain();
    f.objects.push_back(obj("w", 1, 1));
    f.morphisms.push_back(rigid("x", "w", 1));
    f.morphisms.push_back(rigid("w", "y", -1));
    CHECK(check_d_squared(f).ok);
}

TEST_CASE("cone decomposition example") {
    const auto f = two_objects(1);
    const auto cone = cone_decompose(f, {"a"}, {"b"}, 5);
    CHECK(cone.f == NovikovMatrix::from_integers({{1}}, 5));
    CHECK(cone.chain_map);
    CHECK(cone.reassembles);
    CHECK_THROWS_AS(cone_decompose(f, {"b"}, {"a"}, 5), SplitInvalid);
    CHECK_THROWS_AS(cone_decompose(f, {"a"}, {}, 5), SplitInvalid);
    CHECK_THROWS_AS(cone_decompose(f, {"a", "b"}, {"b"}, 5), SplitInvalid);
}

TEST_CASE("cone decomposition of random two-part categories") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const auto tp = random_two_part(rng);
        REQUIRE(validate_category(tp.category).valid());
        const auto cone = cone_decompose(tp.category, tp.c1, tp.c2, 5);
        CHECK(cone.chain_map);
        CHECK(cone.reassembles);
    }
}

TEST_CASE("square decomposition example") {
    FlowCategoryDesc f;
    f.objects = {obj("w", 0, 0), obj("a", 1, 1), obj("b", 1, 1), obj("u", 1, 1), obj("v", 2, 2)};
    f.morphisms = {rigid("a", "w", 1), rigid("v", "a", 1), rigid("b", "w", 1), rigid("v", "b", 1),
                   rigid("u", "w", -2), rigid("v", "u", 1), sized("v", "w", 1)};
    const std::vector<std::string> classes[4] = {{"u", "v"}, {"a"}, {"b"}, {"w"}};
    const auto sq = square_decompose(f, classes, 5);
    CHECK(sq.extracted == NovikovMatrix::from_integers({{2}, {0}}, 5));
    CHECK(sq.extracted_verified);
    CHECK(sq.solved_verified);
    CHECK(sq.homotopy(1, 0).is_zero());  // degree forces H(v, w) = 0

    const std::vector<std::string> wrong[4] = {{"w"}, {"a"}, {"b"}, {"u", "v"}};
    CHECK_THROWS_AS(square_decompose(f, wrong, 5), SplitInvalid);
}

TEST_CASE("descent to the valuation ring") {
    FlowCategoryDesc f;
    f.objects = {obj("x", 1, 2), obj("y", 0, 1)};
    f.morphisms = {rigid("x", "y", 1)};
    const auto c = assemble_complex(f, 5);
    const auto d = descend_to_lambda0(c, {2, 1});
    CHECK(d.lambda0());
    CHECK(d.full_differential()(0, 1) == NovikovElement::monomial(1, 1, 6));
    CHECK(nov_homology(d) == nov_homology(c));

    try {
        descend_to_lambda0(c, {0, 1});
        FAIL("expected NegativeValuationEntry");
    } catch (const NegativeValuationEntry& e) {
        CHECK(std::string(e.what()).find("(x, y)") != std::string::npos);
    }
    CHECK_THROWS_AS(descend_to_lambda0(c, {0}), DimensionMismatch);
}

TEST_CASE("bifurcation moves") {
    // x, y in degree 0; z, w in degree 1
    const auto c = complex_of({{"x", 0}, {"y", 0}, {"z", 1}, {"w", 1}}, {{0, 0, 0, 0}, {0, 0, 0, 0}, {1, 2, 0, 0}, {0, 3, 0, 0}}, 5);
    const auto h = nov_homology(c);
    const auto m = bifurcation_move_c(c, 0, 1, -1, parse_novikov("1 + T"));
    CHECK(m.is_complex());
    CHECK(nov_homology(m) == h);
    CHECK_THROWS_AS(bifurcation_move_c(c, 0, 2, 1, NovikovElement::constant(1)), DegreeMismatch);
    CHECK_THROWS_AS(bifurcation_move_c(c, 0, 0, 1, NovikovElement::constant(1)), DegreeMismatch);

    const auto d = bifurcation_move_d(c, 2, parse_novikov("T"));
    CHECK(d.full_differential()(2, 0) == parse_novikov("1 - T + T^2 - T^3 + T^4 mod T^5"));
    CHECK(nov_homology(d) == h);
    CHECK_THROWS_AS(bifurcation_move_d(c, 2, parse_novikov("1 + T")), ValuationNotPositive);
    CHECK_THROWS_AS(bifurcation_move_d(c, 2, parse_novikov("T^(-1)")), ValuationNotPositive);
}

TEST_CASE("random bifurcation sequences preserve cohomology") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> coin(0, 1), small(-2, 2), expo(1, 3);
    for (int trial = 0; trial < 30; ++trial) {
        const auto tp = random_two_part(rng);
        auto c = assemble_complex(tp.category, 5);
        const auto h = nov_homology(c);
        for (int move = 0; move < 10; ++move) {
            const std::size_t p = rng() % c.size(), q = rng() % c.size();
            if (coin(rng)) {
                if (p == q || c.generators()[p].degree != c.generators()[q].degree) continue;
                c = bifurcation_move_c(c, p, q, coin(rng) ? 1 : -1,
                                       NovikovElement::from_terms({{small(rng), 0}, {small(rng), expo(rng)}}));
            } else {
                c = bifurcation_move_d(c, p, NovikovElement::monomial(small(rng), Rational(expo(rng), 2)));
            }
        }
        CHECK(c.is_complex());
        CHECK(nov_homology(c) == h);
    }
}

TEST_CASE("arnold_check example") {
    const auto rep = arnold_check(two_objects(2), 5);
    CHECK(rep.generators == 2);
    CHECK(rep.min_rank == 2);
    CHECK(rep.lemma_count == 1);
    CHECK(rep.bound_holds);
}
