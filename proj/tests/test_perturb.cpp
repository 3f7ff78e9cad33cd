#include "doctest.h"

#include "novflow/perturb.hpp"

#include <random>

using namespace novflow;

namespace {

Poly var(int n, int i) { return Poly::variable(n, i); }
Poly cst(int n, const Rational& c) { return Poly::constant(n, c); }

GroupElement flip1() { return {{{-1}}, {{1}}}; }

Rational random_rational(std::mt19937& rng, int lo, int hi, int den) {
    std::uniform_int_distribution<int> d(lo * den, hi * den);
    return Rational(d(rng), den);
}

// Random polynomial map with coefficients in [-1, 1] and degree <= d.
PolyMap random_map(std::mt19937& rng, int nvars, int comps, int d) {
    PolyMap p;
    for (int c = 0; c < comps; ++c) {
        Poly q(nvars);
        for (const auto& e : monomials_up_to(nvars, d))
            if (rng() % 3) q.add_term(e, random_rational(rng, -1, 1, 6));
        p.push_back(q);
    }
    return p;
}

PolyMap restrict_map(const PolyMap& p, const std::vector<bool>& keep) {
    PolyMap out;
    for (const auto& c : p) out.push_back(c.project(keep));
    return out;
}

}  // namespace

TEST_CASE("polynomial basics") {
    const Poly x = var(2, 0), y = var(2, 1);
    const Poly p = x * x * y - Rational(1, 2) * x + cst(2, 3);
    CHECK(p.degree() == 3);
    CHECK(p.to_string() == "x1^2*x2 - 1/2*x1 + 3");
    CHECK(p.evaluate(std::vector<Rational>{2, 5}) == 22);
    CHECK(p.derivative(0) == Rational(2) * x * y - cst(2, Rational(1, 2)));
    CHECK(p.restrict_to({true, false}).to_string() == "-1/2*x1 + 3");
    CHECK(p.project({false, true}) == cst(2, 3));
    CHECK((p - p).is_zero());
    CHECK(Poly(1).to_string() == "0");
    CHECK(monomials_up_to(2, 2).size() == 6);
    CHECK(monomials_up_to(3, 4).size() == 35);
}

TEST_CASE("reynolds_project examples") {
    const FiniteGroupRep sign(1, 1, {flip1()});
    CHECK(sign.order() == 2);
    CHECK(reynolds_project({var(1, 0)}, sign)[0].is_zero());
    CHECK(reynolds_project({var(1, 0) * var(1, 0)}, sign)[0] == var(1, 0) * var(1, 0));

    const auto triv = FiniteGroupRep::trivial(2, 1);
    const PolyMap p{var(2, 0) * var(2, 1) + cst(2, 1)};
    CHECK(reynolds_project(p, triv) == p);

    const FiniteGroupRep swap(2, 1, {{{{0, 1}, {1, 0}}, {{1}}}});
    CHECK(reynolds_project({var(2, 0)}, swap)[0] == Rational(1, 2) * (var(2, 0) + var(2, 1)));

    CHECK_THROWS_AS(FiniteGroupRep(1, 1, {{{{2}}, {{1}}}}), InvariantViolation);
    // rotation by a quarter turn in two coordinate planes, order 4; with a
    // flip of a third coordinate the group has order 8, adding another flip 16
    const RatMatrix rot{{0, -1, 0, 0}, {1, 0, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
    const RatMatrix f3{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, -1, 0}, {0, 0, 0, 1}};
    const RatMatrix f4{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, -1}};
    CHECK(FiniteGroupRep(4, 1, {{rot, {{1}}}, {f3, {{1}}}}).order() == 8);
    CHECK_THROWS_AS(FiniteGroupRep(4, 1, {{rot, {{1}}}, {f3, {{1}}}, {f4, {{1}}}}), OutOfScope);
}

TEST_CASE("reynolds_project is idempotent and equivariant") {
    std::mt19937 rng(11);
    const FiniteGroupRep swap_sign(2, 2, {{{{0, 1}, {1, 0}}, {{0, 1}, {1, 0}}}, {{{-1, 0}, {0, -1}}, {{-1, 0}, {0, 1}}}});
    CHECK(swap_sign.order() == 8);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = random_map(rng, 2, 2, 3);
        const auto q = reynolds_project(p, swap_sign);
        CHECK(reynolds_project(q, swap_sign) == q);
        CHECK(is_equivariant(q, swap_sign));
        // pointwise at rational points: q(g x) = g q(x)
        for (int pt = 0; pt < 50; ++pt) {
            const std::vector<Rational> x{random_rational(rng, -2, 2, 7), random_rational(rng, -2, 2, 7)};
            for (const auto& g : swap_sign.generators()) {
                std::vector<Rational> gx(2, 0), qx(2), qgx(2), gqx(2, 0);
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) gx[i] += g.v[i][j] * x[j];
                for (int i = 0; i < 2; ++i) {
                    qx[i] = q[i].evaluate(x);
                    qgx[i] = q[i].evaluate(gx);
                }
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) gqx[i] += g.w[i][j] * qx[j];
                CHECK(qgx == gqx);
            }
        }
    }
}

TEST_CASE("enumerate_equivariant_basis dimensions") {
    CHECK(enumerate_equivariant_basis(1, 1, 1, FiniteGroupRep::trivial(1, 1)).basis.size() == 2);
    const auto odd = enumerate_equivariant_basis(1, 1, 2, FiniteGroupRep(1, 1, {{{{-1}}, {{-1}}}}));
    REQUIRE(odd.basis.size() == 1);
    CHECK(odd.basis[0][0] == var(1, 0));
    const auto even = enumerate_equivariant_basis(1, 1, 2, FiniteGroupRep(1, 1, {flip1()}));
    CHECK(even.basis.size() == 2);
    for (const auto& b : even.basis) CHECK(is_equivariant(b, FiniteGroupRep(1, 1, {flip1()})));
    // trivial group: every monomial map
    CHECK(enumerate_equivariant_basis(2, 2, 2, FiniteGroupRep::trivial(2, 2)).basis.size() == 12);
}

TEST_CASE("extend_from_boundary examples") {
    BoundaryData one{1, 0, 1, {{StratumLabel::empty(1), {cst(1, 5)}}}, std::nullopt};
    CHECK(extend_from_boundary(one).map[0] == cst(1, 5));

    // f(x) on y = 0, g(y) on x = 0, f(0) = g(0) = c
    const Poly x = var(2, 0), y = var(2, 1);
    const Poly f = x * x + cst(2, 2), g = Rational(3) * y + cst(2, 2);
    BoundaryData two{2, 0, 1, {}, std::nullopt};
    two.faces[StratumLabel::of(2, {1})] = {f};
    two.faces[StratumLabel::of(2, {2})] = {g};
    two.faces[StratumLabel::empty(2)] = {cst(2, 2)};
    CHECK(extend_from_boundary(two).map[0] == f + g - cst(2, 2));

    BoundaryData zero{2, 1, 2, {}, std::nullopt};
    for (std::uint64_t b = 0; b < 3; ++b) zero.faces[{2, b}] = {Poly(3), Poly(3)};
    for (const auto& c : extend_from_boundary(zero).map) CHECK(c.is_zero());

    two.faces[StratumLabel::empty(2)] = {cst(2, 1)};
    CHECK_THROWS_AS(extend_from_boundary(two), IncompatibleBoundary);
    two.faces.erase(StratumLabel::empty(2));
    CHECK_THROWS_AS(extend_from_boundary(two), IncompatibleBoundary);

    BoundaryData odd{1, 1, 1, {{StratumLabel::empty(1), {var(2, 1) * var(2, 1)}}}, std::nullopt};
    odd.group = FiniteGroupRep(2, 1, {{{{1, 0}, {0, -1}}, {{-1}}}});
    CHECK_THROWS_AS(extend_from_boundary(odd), IncompatibleBoundary);
    odd.faces[StratumLabel::empty(1)] = {var(2, 1)};
    CHECK(is_equivariant(extend_from_boundary(odd).map, *odd.group));
}

TEST_CASE("extension reproduces compatible boundary data") {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        const int l = 1 + trial % 2, m = trial % 3;
        const SectionOnBox s{l, m, random_map(rng, l + m, 1 + trial % 2, 3)};
        const auto bd = BoundaryData::from_section(s);
        const auto e = extend_from_boundary(bd);
        for (const auto& [T, face] : bd.faces) {
            const auto keep = stratum_mask(T, m);
            CHECK(restrict_map(e.map, keep) == restrict_map(s.map, keep));
        }
        // extending the extension's own boundary data is a fixed point
        CHECK(extend_from_boundary(BoundaryData::from_section(e)).map == e.map);
    }
}

TEST_CASE("check_strong_transversality examples") {
    const auto r1 = check_strong_transversality({1, 0, {var(1, 0)}});
    CHECK_FALSE(r1.transverse);
    CHECK_FALSE(r1.strata[0].transverse);  // the corner point
    CHECK(r1.strata[1].transverse);

    const auto r2 = check_strong_transversality({1, 0, {var(1, 0) - cst(1, Rational(1, 2))}});
    CHECK(r2.transverse);
    REQUIRE(r2.strata[1].points.size() == 1);
    CHECK(r2.strata[1].points[0].x[0] == doctest::Approx(0.5));

    const Poly x = var(2, 0), y = var(2, 1);
    const auto r3 = check_strong_transversality({2, 0, {x - cst(2, Rational(1, 3)), y - cst(2, Rational(1, 2))}});
    CHECK(r3.transverse);
    REQUIRE(r3.strata[3].points.size() == 1);
    CHECK(r3.strata[3].points[0].x[0] == doctest::Approx(1.0 / 3));
    CHECK(r3.strata[3].points[0].sign == 1);

    // tangency of a circle to the wall y = 0
    const Poly circle = (x - cst(2, Rational(1, 2))) * (x - cst(2, Rational(1, 2))) + y * y - cst(2, Rational(1, 4));
    CHECK_FALSE(check_strong_transversality({2, 0, {circle}}).transverse);
    // a double root inside
    const Poly sq = (var(1, 0) - cst(1, Rational(1, 2))) * (var(1, 0) - cst(1, Rational(1, 2)));
    CHECK_FALSE(check_strong_transversality({1, 0, {sq}}).transverse);

    CHECK_THROWS_AS(check_strong_transversality({3, 0, {var(3, 0)}}), OutOfScope);
    CHECK_THROWS_AS(check_strong_transversality({1, 0, {var(1, 0), var(1, 0), var(1, 0)}}), OutOfScope);
}

TEST_CASE("count_signed_zeros examples") {
    const auto full1 = StratumLabel::full(1);
    const Poly x = var(1, 0);
    CHECK(count_signed_zeros({1, 0, {x - cst(1, Rational(1, 2))}}, full1) == 1);
    CHECK(count_signed_zeros({1, 0, {(x - cst(1, Rational(1, 4))) * (x - cst(1, Rational(3, 4)))}}, full1) == 0);
    CHECK(signed_zeros({1, 0, {(x - cst(1, Rational(1, 4))) * (x - cst(1, Rational(3, 4)))}}, full1).size() == 2);
    const Poly a = var(2, 0), b = var(2, 1);
    CHECK(count_signed_zeros({2, 0, {a - cst(2, Rational(1, 2)), b - cst(2, Rational(1, 2))}}, StratumLabel::full(2)) == 1);
    CHECK(count_signed_zeros({2, 0, {b - cst(2, Rational(1, 2)), a - cst(2, Rational(1, 2))}}, StratumLabel::full(2)) == -1);
    // free coordinates range over [-1, 1]
    CHECK(count_signed_zeros({0, 1, {Poly::variable(1, 0) * Poly::variable(1, 0) - cst(1, Rational(1, 4))}},
                             StratumLabel::empty(0)) == 0);
    CHECK_THROWS_AS(count_signed_zeros({1, 0, {(x - cst(1, Rational(1, 2))) * (x - cst(1, Rational(1, 2)))}}, full1),
                    NotTransverse);
    CHECK_THROWS_AS(count_signed_zeros({2, 0, {a}}, StratumLabel::full(2)), InvariantViolation);
}

TEST_CASE("signed counts match a sampling oracle in one variable") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 60; ++trial) {
        // distinct interior roots on a grid of 1/40
        const int degree = 1 + trial % 4;
        std::vector<int> grid;
        while (static_cast<int>(grid.size()) < degree) {
            const int g = 1 + static_cast<int>(rng() % 39);
            if (std::find(grid.begin(), grid.end(), g) == grid.end()) grid.push_back(g);
        }
        const Poly x = var(1, 0);
        Poly p = cst(1, rng() % 2 ? 1 : -1);
        for (int g : grid) p = p * (x - cst(1, Rational(g, 40)));
        // oracle: signed sign changes on a dense sample
        const int samples = 4000;
        int oracle = 0;
        double prev = p.evaluate(std::vector<double>{0.0});
        for (int i = 1; i <= samples; ++i) {
            const double v = p.evaluate(std::vector<double>{static_cast<double>(i) / samples});
            if (prev < 0 && v > 0) ++oracle;
            if (prev > 0 && v < 0) --oracle;
            if (v != 0) prev = v;
        }
        const auto zs = signed_zeros({1, 0, {p}}, StratumLabel::full(1));
        CHECK(zs.size() == grid.size());
        CHECK(count_signed_zeros({1, 0, {p}}, StratumLabel::full(1)) == oracle);
    }
}

TEST_CASE("boundary_consistency examples") {
    const Poly x = var(2, 0), y = var(2, 1);
    const auto r = boundary_consistency({2, 0, {x + y - cst(2, Rational(1, 2))}});
    CHECK(r.consistent);
    REQUIRE(r.curves.size() == 1);
    CHECK(r.curves[0].start_wall + r.curves[0].end_wall == 3);
    REQUIRE(r.walls.size() == 2);
    CHECK(r.walls[0].count == 1);
    CHECK(r.walls[0].endpoint_sum == 1);
    CHECK(r.walls[1].count == 1);
    CHECK(r.walls[1].endpoint_sum == -1);
    CHECK(r.outer_sum == 0);

    // the diagonal passes through the corner
    CHECK_THROWS_AS(boundary_consistency({2, 0, {x - y}}), NotTransverse);

    const auto none = boundary_consistency({2, 0, {x + y + cst(2, 1)}});
    CHECK(none.consistent);
    CHECK(none.curves.empty());

    // a curve from the wall to the outer face
    const auto out = boundary_consistency({2, 0, {y - cst(2, Rational(1, 2))}});
    CHECK(out.consistent);
    CHECK(out.outer_sum == -out.walls[0].endpoint_sum);
    CHECK(out.walls[0].count == 1);

    // one corner coordinate and a free one
    const Poly u = var(2, 0), v = var(2, 1);
    const auto arc = boundary_consistency({1, 1, {u + v * v - cst(2, Rational(1, 4))}});
    CHECK(arc.consistent);
    CHECK(arc.walls[0].count == 0);
    CHECK(arc.curves.size() == 1);

    CHECK(wall_orientation(2, 1) == 1);
    CHECK(wall_orientation(2, 2) == -1);
}

TEST_CASE("boundary_consistency on random sections") {
    std::mt19937 rng(29);
    struct Shape {
        int l, m;
    };
    const Shape shapes[] = {{2, 0}, {1, 1}, {2, 1}};
    int consistent = 0, attempts = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto shape = shapes[trial % 3];
        const int n = shape.l + shape.m;
        for (;;) {
            ++attempts;
            REQUIRE(attempts < 400);
            PolyMap p;
            for (int c = 0; c < n - 1; ++c) {
                Poly q = cst(n, random_rational(rng, -1, 1, 8));
                for (int i = 0; i < n; ++i) q = q + random_rational(rng, -2, 2, 8) * var(n, i);
                for (int i = 0; i < n; ++i)
                    for (int j = i; j < n; ++j) q = q + random_rational(rng, -1, 1, 16) * var(n, i) * var(n, j);
                p.push_back(q);
            }
            try {
                const auto r = boundary_consistency({shape.l, shape.m, p});
                consistent += r.consistent;
                for (const auto& w : r.walls) CHECK(w.endpoint_sum == w.expected_sum);
                break;
            } catch (const NotTransverse&) {
            }
        }
    }
    CHECK(consistent == 20);
}
