#include "doctest.h"

#include "novflow/strata.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <set>

using namespace novflow;

namespace {

StratumLabel L(int k, std::vector<int> e) { return StratumLabel::of(k, e); }

}  // namespace

TEST_CASE("h_of_S examples") {
    CHECK(h_of_S(L(4, {1, 3})) == LengthSeq{2, 2, 1});
    CHECK(h_of_S(L(2, {})) == LengthSeq{1, 1, 1});
    CHECK(h_of_S(L(3, {1, 2, 3})) == LengthSeq{4});
}

TEST_CASE("S_of_h examples") {
    CHECK(S_of_h({2, 2, 1}) == L(4, {1, 3}));
    CHECK(S_of_h({6}) == StratumLabel::full(5));
    CHECK(S_of_h({1, 1}) == L(1, {}));
    CHECK_THROWS_AS(S_of_h({}), InvariantViolation);
    CHECK_THROWS_AS(S_of_h({2, 0}), InvariantViolation);
}

TEST_CASE("h and S are inverse bijections for k <= 12") {
    for (int k = 0; k <= 12; ++k) {
        for (std::uint64_t b = 0; b < (std::uint64_t{1} << k); ++b) {
            const StratumLabel s{k, b};
            const auto h = h_of_S(s);
            int total = 0;
            for (int x : h) total += x;
            CHECK(total == k + 1);
            CHECK(S_of_h(h) == s);
            CHECK(h_of_S(S_of_h(h)) == h);
        }
    }
}

TEST_CASE("inclusion of labels is refinement of partitions") {
    for (int k = 0; k <= 6; ++k) {
        for (std::uint64_t a = 0; a < (std::uint64_t{1} << k); ++a) {
            for (std::uint64_t b = 0; b < (std::uint64_t{1} << k); ++b) {
                const StratumLabel s{k, a}, t{k, b};
                CHECK(s.subset_of(t) == refines(partition_blocks(s), partition_blocks(t)));
            }
        }
    }
}

TEST_CASE("compose_labels examples") {
    auto r = compose_labels({{2, L(1, {1})}, {3, L(2, {1, 2})}});
    CHECK(r.d == 5);
    CHECK(r.label == StratumLabel::full(4));
    r = compose_labels({{2, L(1, {})}, {2, L(1, {})}});
    CHECK(r.label == L(3, {2}));
    r = compose_labels({{4, L(3, {2})}});
    CHECK(r.label == L(3, {2}));
    CHECK_THROWS_AS(compose_labels({{2, L(2, {})}}), InvariantViolation);
}

TEST_CASE("compose_labels is associative") {
    // all sequences of parts with sum of d <= 8, every way of bracketing a
    // split into a left and right group
    std::vector<std::vector<LabelPart>> sequences;
    std::function<void(std::vector<LabelPart>&, int)> grow = [&](std::vector<LabelPart>& cur, int budget) {
        if (!cur.empty()) sequences.push_back(cur);
        for (int d = 1; d <= budget; ++d) {
            for (std::uint64_t b = 0; b < (std::uint64_t{1} << (d - 1)); ++b) {
                cur.push_back({d, {d - 1, b}});
                grow(cur, budget - d);
                cur.pop_back();
            }
        }
    };
    std::vector<LabelPart> cur;
    grow(cur, 8);
    std::size_t checked = 0;
    for (const auto& seq : sequences) {
        const auto flat = compose_labels(seq);
        for (std::size_t cut = 1; cut < seq.size(); ++cut) {
            std::vector<LabelPart> left(seq.begin(), seq.begin() + cut), right(seq.begin() + cut, seq.end());
            const auto nested = compose_labels({compose_labels(left), compose_labels(right)});
            CHECK(nested.d == flat.d);
            CHECK(nested.label == flat.label);
            ++checked;
        }
    }
    CHECK(checked > 1000);
}

TEST_CASE("restriction poset iso examples") {
    auto m = restriction_poset_iso(L(2, {}));
    CHECK(m.at(L(2, {1})) == L(2, {1}));
    CHECK(m.at(L(2, {2})) == L(2, {2}));
    m = restriction_poset_iso(L(3, {2}));
    CHECK(m.size() == 4);
    CHECK(m.at(L(3, {2})) == L(2, {}));
    CHECK(m.at(L(3, {1, 2})) == L(2, {1}));
    CHECK(m.at(L(3, {2, 3})) == L(2, {2}));
    CHECK(m.at(L(3, {1, 2, 3})) == L(2, {1, 2}));
    m = restriction_poset_iso(StratumLabel::full(3));
    CHECK(m.size() == 1);
    CHECK(m.begin()->second == StratumLabel::empty(0));
}

TEST_CASE("restriction poset iso is an order isomorphism") {
    for (int k = 0; k <= 6; ++k) {
        for (std::uint64_t s = 0; s < (std::uint64_t{1} << k); ++s) {
            const auto m = restriction_poset_iso({k, s});
            const int rest = k - std::popcount(s);
            CHECK(m.size() == (std::size_t{1} << rest));
            std::set<std::uint64_t> images;
            for (const auto& [t, r] : m) {
                CHECK(r.k == rest);
                images.insert(r.bits);
                for (const auto& [t2, r2] : m) CHECK(t.subset_of(t2) == r.subset_of(r2));
            }
            CHECK(images.size() == m.size());
        }
    }
}

TEST_CASE("space validation") {
    CHECK_THROWS_AS(CombStratSpace(1, {{"a", 0, L(1, {})}}, {}), InvariantViolation);
    CHECK_THROWS_AS(CombStratSpace(1, {{"a", 1, L(1, {1})}, {"a", 0, L(1, {})}}, {}), InvariantViolation);
    CHECK_THROWS_AS(CombStratSpace(1, {{"a", 0, L(1, {1})}, {"b", 1, L(1, {})}}, {{"b", "a", 1}}),
                    InvariantViolation);
    CHECK_THROWS_AS(CombStratSpace(1, {{"a", 1, L(1, {1})}}, {{"a", "zz", 1}}), InvariantViolation);
    CHECK(strat_square().boundary_squares_to_zero());
}

TEST_CASE("euler characteristic examples") {
    CHECK(euler_char(strat_point()) == 1);
    CHECK(euler_char(strat_interval()) == 1);
    CHECK(euler_char(strat_square()) == 1);
}

namespace {

void check_double(const CombStratSpace& x) {
    const auto d = double_space(x);
    CHECK(d.space.boundary_squares_to_zero() == x.boundary_squares_to_zero());
    // copy count 2^|S(c)|
    for (const auto& c : x.cells())
        CHECK(std::count(d.base.begin(), d.base.end(), c.id) == (1 << c.label.size()));
    // group action: identity, composition, dimension
    const std::size_t n = d.space.cells().size();
    for (std::uint64_t g = 0; g < d.action.size(); ++g) {
        for (std::uint64_t h = 0; h < d.action.size(); ++h)
            for (std::size_t i = 0; i < n; ++i) CHECK(d.action[g][d.action[h][i]] == d.action[g ^ h][i]);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(d.space.cells()[d.action[g][i]].dim == d.space.cells()[i].dim);
    }
    for (std::size_t i = 0; i < n; ++i) CHECK(d.action[0][i] == i);
    // free on the top stratum copies
    const auto top = StratumLabel::full(x.k());
    for (std::size_t i = 0; i < n; ++i) {
        if (x.cell(d.base[i]).label != top) continue;
        for (std::uint64_t g = 1; g < d.action.size(); ++g) CHECK(d.action[g][i] != i);
    }
    // fixed locus of the flip in direction j: copies of cells of X([k] \ {j})
    for (int j = 1; j <= x.k(); ++j) {
        StratumLabel wall = top;
        wall.bits &= ~(std::uint64_t{1} << (j - 1));
        std::size_t expected = 0;
        for (std::size_t i = 0; i < n; ++i) expected += x.cell(d.base[i]).label.subset_of(wall);
        const auto fixed = d.fixed_cells(std::uint64_t{1} << (j - 1));
        CHECK(fixed.size() == expected);
        for (std::size_t i : fixed) CHECK(x.cell(d.base[i]).label.subset_of(wall));
    }
}

}  // namespace

TEST_CASE("double examples") {
    const auto p = double_space(strat_point());
    CHECK(p.space.cells().size() == 1);
    CHECK(p.action.size() == 1);

    const auto i = double_space(strat_interval());
    CHECK(i.space.cells().size() == 4);
    CHECK(euler_char(i.space) == 0);

    const auto s = double_space(strat_square());
    std::size_t by_dim[3] = {};
    for (const auto& c : s.space.cells()) ++by_dim[c.dim];
    CHECK(by_dim[2] == 4);
    CHECK(by_dim[1] == 8);
    CHECK(by_dim[0] == 4);
    CHECK(euler_char(s.space) == 0);

    check_double(strat_point());
    check_double(strat_interval());
    check_double(strat_square());
    check_double(product(strat_square(), strat_interval()));
}

TEST_CASE("collar examples") {
    const auto p = collar(strat_point());
    REQUIRE(p.cells().size() == 1);
    CHECK(p.cells()[0].dim == 0);
    CHECK(p.faces().empty());

    const auto i = collar(strat_interval());
    CHECK(euler_char(i) == 1);
    CHECK(i.stratum_count(L(1, {})) == 2);
    CHECK(i.boundary_squares_to_zero());

    const auto s = collar(strat_square());
    CHECK(euler_char(s) == 1);
    CHECK(s.stratum_count(L(2, {})) == 4);
    CHECK(s.boundary_squares_to_zero());
}

TEST_CASE("collar preserves strata at t = 0 and the Euler characteristic") {
    for (const auto& x : {strat_point(), strat_interval(), strat_square(),
                          product(strat_interval(), strat_square())}) {
        const auto c = collar(x);
        CHECK(euler_char(c) == euler_char(x));
        CHECK(c.boundary_squares_to_zero());
        for (std::uint64_t s = 0; s < (std::uint64_t{1} << x.k()); ++s) {
            const StratumLabel S{x.k(), s};
            // cells (c, S, all at0) form Coll(X)(S) = X(S) x 0
            std::size_t at_zero = 0;
            for (const auto& cell : c.cells()) {
                const auto bar = cell.id.rfind('|');
                const auto mid = cell.id.rfind('|', bar - 1);
                if (cell.id.substr(mid + 1, bar - mid - 1) != S.to_string()) continue;
                if (cell.id.find('F', bar) != std::string::npos) continue;
                CHECK(cell.label == S);
                ++at_zero;
            }
            CHECK(at_zero == x.closed_stratum_count(S));
            CHECK(c.stratum_count(StratumLabel::empty(x.k())) == x.stratum_count(StratumLabel::empty(x.k())));
        }
    }
}

TEST_CASE("product examples") {
    const auto sq = strat_square();
    CHECK(product(strat_point(), sq).cells().size() == sq.cells().size());
    CHECK(euler_char(product(strat_point(), sq)) == euler_char(sq));

    const auto ii = product(strat_interval(), strat_interval());
    CHECK(ii.k() == 2);
    CHECK(ii.cells().size() == 9);
    CHECK(ii.stratum_count(StratumLabel::full(2)) == 1);
    CHECK(ii.stratum_count(L(2, {1})) == 2);
    CHECK(ii.stratum_count(L(2, {2})) == 2);
    CHECK(ii.stratum_count(L(2, {})) == 4);
    CHECK(ii.boundary_squares_to_zero());

    CHECK(euler_char(product(strat_interval(), sq)) == 1);
}

TEST_CASE("product is multiplicative on Euler characteristic") {
    const std::vector<CombStratSpace> spaces = {strat_point(), strat_interval(), strat_square(),
                                                double_space(strat_square()).space,
                                                double_space(strat_interval()).space};
    for (const auto& x : spaces)
        for (const auto& y : spaces) {
            const auto p = product(x, y);
            CHECK(euler_char(p) == euler_char(x) * euler_char(y));
            CHECK(p.boundary_squares_to_zero());
        }
}
