#include "novflow/flowcat.hpp"

#include <map>
#include <set>
#include <tuple>

namespace novflow {

LabelComposition compose_label_sets(int r1, int r2) {
    if (r1 < 0 || r2 < 0) throw InvariantViolation("label-set sizes must be nonnegative");
    LabelComposition out;
    out.target_size = r1 + r2 + 1;
    out.missing = r1 + 1;
    for (int i = 1; i <= r1; ++i) out.injection.push_back(i);
    for (int j = 1; j <= r2; ++j) out.injection.push_back(j + r1 + 1);
    return out;
}

std::optional<std::size_t> FlowCategoryDesc::index_of(const std::string& id) const {
    for (std::size_t i = 0; i < objects.size(); ++i)
        if (objects[i].id == id) return i;
    return std::nullopt;
}

Rational FlowCategoryDesc::energy_of(const MorphismRecord& m) const {
    return group.energy_of(m.g) + objects.at(*index_of(m.source)).energy - objects.at(*index_of(m.target)).energy;
}

long long FlowCategoryDesc::expected_label_size(const MorphismRecord& m) const {
    return group.grading_of(m.g) + objects.at(*index_of(m.source)).mu - objects.at(*index_of(m.target)).mu - 1;
}

namespace {

std::string g_text(const std::vector<long long>& g) {
    std::string s = "(";
    for (std::size_t i = 0; i < g.size(); ++i) s += (i ? "," : "") + std::to_string(g[i]);
    return s + ")";
}

std::string record_text(const MorphismRecord& m) { return m.source + " -" + g_text(m.g) + "-> " + m.target; }

bool is_zero_g(const std::vector<long long>& g) {
    for (long long v : g)
        if (v != 0) return false;
    return true;
}

std::vector<long long> add_g(const std::vector<long long>& a, const std::vector<long long>& b) {
    std::vector<long long> out(a);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
    return out;
}

using RecordKey = std::tuple<std::string, std::string, std::vector<long long>>;

}  // namespace

ValidationReport validate_category(const FlowCategoryDesc& f) {
    ValidationReport rep;
    auto add = [&](std::string code, std::string msg, std::vector<std::string> witness) {
        rep.violations.push_back({std::move(code), std::move(msg), std::move(witness)});
    };

    if (auto err = f.group.check(); !err.empty()) add("InvalidGroup", err, {});
    std::set<std::string> ids;
    for (const auto& o : f.objects)
        if (!ids.insert(o.id).second) add("DuplicateObject", "object id repeated: " + o.id, {o.id});

    const long long modulus = f.group.modulus();
    std::map<RecordKey, const MorphismRecord*> seen;
    std::vector<const MorphismRecord*> usable;
    for (const auto& m : f.morphisms) {
        const std::string what = record_text(m);
        if (!ids.count(m.source) || !ids.count(m.target)) {
            add("UnknownObject", "record references an unknown object: " + what, {m.source, m.target});
            continue;
        }
        if (m.g.size() != f.group.rank) {
            add("GroupRankMismatch", "group element of rank " + std::to_string(m.g.size()) + " in " + what,
                {m.source, m.target});
            continue;
        }
        const RecordKey key{m.source, m.target, m.g};
        if (auto it = seen.find(key); it != seen.end()) {
            add("DuplicateRecord",
                *it->second == m ? "record listed twice: " + what : "conflicting records for one orbit: " + what,
                {m.source, m.target});
            continue;
        }
        seen.emplace(key, &m);

        const bool identity = m.source == m.target && is_zero_g(m.g);
        if (identity != (m.kind == LabelKind::unit)) {
            add(identity ? "IdentityNotUnit" : "UnitNotIdentity",
                identity ? "endomorphisms of an object must be the unit: " + what
                         : "unit morphism between distinct lifts: " + what,
                {m.source, m.target});
            continue;
        }
        if (m.kind != LabelKind::sized) continue;

        const long long expected = f.expected_label_size(m);
        if (m.r != expected) {
            add("LabelSizeMismatch",
                "label-set size " + std::to_string(m.r) + " but gradings give " + std::to_string(expected) +
                    " for " + what,
                {m.source, m.target});
            continue;
        }
        if (modulus > 0 && normalize_degree(f.group.grading_of(m.g), modulus) != 0)
            add("GradingNotPeriodic", "mu(g) is not a multiple of 2N in " + what, {m.source, m.target});
        if (f.flags.e_positive && f.energy_of(m) <= 0)
            add("EnergyNotPositive", "energy " + to_string(f.energy_of(m)) + " <= 0 for " + what,
                {m.source, m.target});
        usable.push_back(&m);
    }

    // A composable pair needs a composite record; label sizes then agree
    // with r1 + r2 + 1 automatically.
    for (const auto* a : usable)
        for (const auto* b : usable) {
            if (a->target != b->source) continue;
            const RecordKey key{a->source, b->target, add_g(a->g, b->g)};
            auto it = seen.find(key);
            if (it == seen.end() || it->second->kind == LabelKind::bullet)
                add("CompositionMissing",
                    "no morphism space for the composite of " + record_text(*a) + " and " + record_text(*b),
                    {a->source, a->target, b->target});
        }
    return rep;
}

NovikovComplex assemble_unchecked(const FlowCategoryDesc& f, const ExtRational& truncation) {
    const auto rep = validate_category(f);
    if (!rep.valid()) {
        const auto& v = rep.violations.front();
        throw InvalidCategory(v.code + ": " + v.message);
    }
    const std::size_t n = f.objects.size();
    const long long modulus = f.group.modulus();
    std::vector<ComplexGenerator> gens;
    gens.reserve(n);
    for (const auto& o : f.objects) gens.push_back({o.id, normalize_degree(o.mu, modulus)});

    std::vector<NovikovElement> entries(n * n, NovikovElement(truncation));
    for (const auto& m : f.morphisms) {
        if (m.kind != LabelKind::sized || m.r != 0) continue;
        if (!m.count) throw MissingCount("rigid morphism space without a count: " + record_text(m));
        const std::size_t x = *f.index_of(m.source), y = *f.index_of(m.target);
        auto& e = entries[x * n + y];
        e = nov_add(e, NovikovElement::monomial(*m.count, f.group.energy_of(m.g), truncation));
    }
    return NovikovComplex(f.group, std::move(gens), NovikovMatrix(n, n, std::move(entries), truncation));
}

D2Report check_d_squared(const FlowCategoryDesc& f, const ExtRational& truncation) {
    const auto c = assemble_unchecked(f, truncation);
    const auto sq = c.d_squared();
    D2Report rep;
    for (std::size_t i = 0; i < sq.rows(); ++i)
        for (std::size_t j = 0; j < sq.cols(); ++j)
            if (!sq(i, j).is_zero()) {
                rep.ok = false;
                rep.witnesses.push_back({c.generators()[i].id, c.generators()[j].id, sq(i, j)});
            }
    return rep;
}

NovikovComplex assemble_complex(const FlowCategoryDesc& f, const ExtRational& truncation) {
    auto c = assemble_unchecked(f, truncation);
    const auto sq = c.d_squared();
    for (std::size_t i = 0; i < sq.rows(); ++i)
        for (std::size_t j = 0; j < sq.cols(); ++j)
            if (!sq(i, j).is_zero())
                throw DSquaredNonzero("coefficient of " + c.generators()[i].id + " in d(d(" + c.generators()[j].id +
                                      ")) is " + sq(i, j).to_string());
    return c;
}

namespace {

NovikovMatrix block(const NovikovMatrix& d, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
    std::vector<NovikovElement> e;
    e.reserve(rows.size() * cols.size());
    for (std::size_t r : rows)
        for (std::size_t c : cols) e.push_back(d(r, c));
    return NovikovMatrix(rows.size(), cols.size(), std::move(e), d.truncation());
}

NovikovMatrix negate(const NovikovMatrix& m) {
    std::vector<NovikovElement> e;
    for (const auto& x : m.entries()) e.push_back(-x);
    return NovikovMatrix(m.rows(), m.cols(), std::move(e), m.truncation());
}

// Class index of every object, or SplitInvalid when the lists do not
// partition the objects.
std::vector<int> classify(const FlowCategoryDesc& f, const std::vector<const std::vector<std::string>*>& lists) {
    std::vector<int> cls(f.objects.size(), -1);
    for (std::size_t c = 0; c < lists.size(); ++c)
        for (const auto& id : *lists[c]) {
            auto i = f.index_of(id);
            if (!i) throw SplitInvalid("unknown object in split: " + id);
            if (cls[*i] != -1) throw SplitInvalid("object listed twice in split: " + id);
            cls[*i] = static_cast<int>(c);
        }
    for (std::size_t i = 0; i < cls.size(); ++i)
        if (cls[i] == -1) throw SplitInvalid("object missing from split: " + f.objects[i].id);
    return cls;
}

std::vector<std::size_t> indices(const FlowCategoryDesc& f, const std::vector<std::string>& ids) {
    std::vector<std::size_t> out;
    for (const auto& id : ids) out.push_back(*f.index_of(id));
    return out;
}

}  // namespace

ConeDecomposition cone_decompose(const FlowCategoryDesc& f, const std::vector<std::string>& c1,
                                 const std::vector<std::string>& c2, const ExtRational& truncation) {
    const auto cls = classify(f, {&c1, &c2});
    for (const auto& m : f.morphisms) {
        if (m.kind == LabelKind::bullet) continue;
        auto s = f.index_of(m.source), t = f.index_of(m.target);
        if (s && t && cls[*s] == 1 && cls[*t] == 0)
            throw SplitInvalid("morphism from C2 to C1: " + record_text(m));
    }
    const auto c = assemble_complex(f, truncation);
    const auto& d = c.full_differential();
    const auto i1 = indices(f, c1), i2 = indices(f, c2);

    ConeDecomposition out;
    out.c1 = c1;
    out.c2 = c2;
    out.d1 = block(d, i1, i1);
    out.d2 = block(d, i2, i2);
    out.f = block(d, i1, i2);
    const auto t = d.truncation();
    const auto d2_shift = negate(out.d2);
    out.chain_map = equal_mod(out.f * d2_shift, out.d1 * out.f, t);

    // cone on (C2[1], C1): [[-d_{C2[1]}, 0], [f, d1]]
    std::vector<std::size_t> order(i2);
    order.insert(order.end(), i1.begin(), i1.end());
    const std::size_t n2 = i2.size(), n = order.size();
    bool same = true;
    for (std::size_t r = 0; r < n && same; ++r)
        for (std::size_t col = 0; col < n && same; ++col) {
            NovikovElement cone(t);
            if (r < n2 && col < n2) cone = -d2_shift(r, col);
            else if (r >= n2 && col < n2) cone = out.f(r - n2, col);
            else if (r >= n2 && col >= n2) cone = out.d1(r - n2, col - n2);
            same = equal_mod(cone, d(order[r], order[col]), t);
        }
    out.reassembles = same;
    return out;
}

SquareDecomposition square_decompose(const FlowCategoryDesc& f, const std::vector<std::string> classes[4],
                                     const ExtRational& truncation) {
    const auto cls = classify(f, {&classes[0], &classes[1], &classes[2], &classes[3]});
    // allowed[source][target]
    static constexpr bool allowed[4][4] = {
        {true, true, true, true}, {false, true, false, true}, {false, false, true, true}, {false, false, false, true}};
    for (const auto& m : f.morphisms) {
        if (m.kind == LabelKind::bullet) continue;
        auto s = f.index_of(m.source), t = f.index_of(m.target);
        if (s && t && !allowed[cls[*s]][cls[*t]])
            throw SplitInvalid("morphism from C" + std::to_string(cls[*s] + 1) + " to C" +
                               std::to_string(cls[*t] + 1) + ": " + record_text(m));
    }
    const auto c = assemble_complex(f, truncation);
    const auto& d = c.full_differential();
    const ExtRational t = d.truncation();
    std::vector<std::size_t> idx[4];
    SquareDecomposition out;
    for (int k = 0; k < 4; ++k) {
        idx[k] = indices(f, classes[k]);
        out.classes[k] = classes[k];
        out.d[k] = block(d, idx[k], idx[k]);
    }
    out.f12 = block(d, idx[0], idx[1]);
    out.f13 = block(d, idx[0], idx[2]);
    out.f24 = block(d, idx[1], idx[3]);
    out.f34 = block(d, idx[2], idx[3]);
    out.h14 = block(d, idx[0], idx[3]);
    out.extracted = negate(out.h14);

    const auto target = out.f12 * out.f24 + out.f13 * out.f34;
    const auto& d1 = out.d[0];
    const auto& d4 = out.d[3];
    const std::size_t a = idx[0].size(), b = idx[3].size();
    auto degree = [&](std::size_t i) { return c.generators()[i].degree; };
    const long long modulus = c.modulus();

    // unknown H(i, j) only where deg(C1_i) == deg(C4_j) + 1
    std::vector<std::pair<std::size_t, std::size_t>> unknowns;
    for (std::size_t i = 0; i < a; ++i)
        for (std::size_t j = 0; j < b; ++j)
            if (degree(idx[0][i]) == normalize_degree(degree(idx[3][j]) + 1, modulus)) unknowns.push_back({i, j});

    auto assemble_h = [&](const std::vector<NovikovElement>& x) {
        std::vector<NovikovElement> e(a * b, NovikovElement(t));
        for (std::size_t u = 0; u < unknowns.size(); ++u) e[unknowns[u].first * b + unknowns[u].second] = x[u];
        return NovikovMatrix(a, b, std::move(e), t);
    };

    if (a * b == 0) {
        out.homotopy = NovikovMatrix(a, b, t);
    } else {
        // (d1 H + H d4)(p, q) = sum_k d1(p, k) H(k, q) + sum_k H(p, k) d4(k, q)
        std::vector<NovikovElement> coeff(a * b * unknowns.size(), NovikovElement(t));
        std::vector<NovikovElement> rhs;
        for (std::size_t p = 0; p < a; ++p)
            for (std::size_t q = 0; q < b; ++q) {
                const std::size_t row = p * b + q;
                for (std::size_t u = 0; u < unknowns.size(); ++u) {
                    const auto [k, l] = unknowns[u];
                    NovikovElement v(t);
                    if (l == q) v = nov_add(v, d1(p, k));
                    if (k == p) v = nov_add(v, d4(l, q));
                    coeff[row * unknowns.size() + u] = v;
                }
                rhs.push_back(target(p, q));
            }
        std::optional<std::vector<NovikovElement>> sol;
        if (unknowns.empty()) {
            if (target.is_zero()) sol.emplace();
        } else {
            sol = nov_linear_solve(NovikovMatrix(a * b, unknowns.size(), std::move(coeff), t), rhs);
        }
        if (!sol) throw NoHomotopyAtTruncation("f12 f24 + f13 f34 = d1 H + H d4 has no solution at truncation " +
                                               to_string(t));
        out.homotopy = assemble_h(*sol);
    }
    auto holds = [&](const NovikovMatrix& h) { return equal_mod(d1 * h + h * d4, target, t); };
    out.solved_verified = holds(out.homotopy);
    out.extracted_verified = holds(out.extracted);
    return out;
}

NovikovComplex descend_to_lambda0(const NovikovComplex& c, const std::vector<Rational>& energy) {
    const std::size_t n = c.size();
    if (energy.size() != n) throw DimensionMismatch("one energy per generator is required");
    const auto& d = c.full_differential();
    std::vector<NovikovElement> e;
    e.reserve(n * n);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y) {
            auto v = d(x, y).shifted(energy[x] - energy[y]);
            if (!v.is_zero() && v.valuation() < ExtRational(0))
                throw NegativeValuationEntry("entry (" + c.generators()[x].id + ", " + c.generators()[y].id +
                                             ") has valuation " + to_string(v.valuation()) + " after rebasing");
            e.push_back(std::move(v));
        }
    // entries forbidden by the grading stay exactly zero and do not limit precision
    ExtRational t = ExtRational::infinity();
    bool any = false;
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y) {
            if (c.generators()[x].degree != normalize_degree(c.generators()[y].degree + 1, c.modulus())) {
                e[x * n + y] = NovikovElement();
                continue;
            }
            t = min(t, e[x * n + y].truncation());
            any = true;
        }
    if (!any) t = c.truncation();
    return c.with_differential(NovikovMatrix(n, n, std::move(e), t), true);
}

NovikovComplex bifurcation_move_c(const NovikovComplex& c, std::size_t p, std::size_t q, int sign,
                                  const NovikovElement& weight) {
    const std::size_t n = c.size();
    if (p >= n || q >= n) throw DimensionMismatch("generator index out of range");
    if (p == q) throw DegreeMismatch("move c needs two distinct generators");
    if (c.generators()[p].degree != c.generators()[q].degree)
        throw DegreeMismatch("generators " + c.generators()[p].id + " and " + c.generators()[q].id +
                             " have different degrees");
    if (weight.valuation_bound() < ExtRational(0)) throw ValuationNotPositive("weight has negative valuation");
    if (sign != 1 && sign != -1) throw InvariantViolation("sign must be +1 or -1");
    const auto sw = sign > 0 ? weight : -weight;
    std::vector<NovikovElement> e = c.full_differential().entries();
    for (std::size_t i = 0; i < n; ++i) e[i * n + p] = nov_add(e[i * n + p], nov_mul(sw, e[i * n + q]));
    for (std::size_t j = 0; j < n; ++j) e[q * n + j] = nov_sub(e[q * n + j], nov_mul(sw, e[p * n + j]));
    return c.with_differential(NovikovMatrix(n, n, std::move(e), c.truncation()), c.lambda0());
}

NovikovComplex bifurcation_move_d(const NovikovComplex& c, std::size_t p, const NovikovElement& u) {
    const std::size_t n = c.size();
    if (p >= n) throw DimensionMismatch("generator index out of range");
    if (!(u.valuation_bound() > ExtRational(0))) throw ValuationNotPositive("u must have positive valuation");
    const auto t = c.truncation();
    const auto unit = nov_add(NovikovElement::constant(1, t), u.truncated(t));
    const auto inv = nov_invert(unit);
    std::vector<NovikovElement> e = c.full_differential().entries();
    for (std::size_t i = 0; i < n; ++i) e[i * n + p] = nov_mul(e[i * n + p], unit);
    for (std::size_t j = 0; j < n; ++j) e[p * n + j] = nov_mul(inv, e[p * n + j]);
    return c.with_differential(NovikovMatrix(n, n, std::move(e), t), c.lambda0());
}

ArnoldReport arnold_check(const FlowCategoryDesc& f, const ExtRational& truncation) {
    const auto c = assemble_complex(f, truncation);
    ArnoldReport rep;
    rep.generators = c.size();
    rep.cohomology = nov_homology(c);
    const auto mr = min_rank_report(rep.cohomology, f.group.N);
    rep.min_rank = mr.per_degree_bound;
    rep.lemma_count = mr.lemma_count;
    rep.bound_holds = rep.generators >= rep.min_rank;
    return rep;
}

}  // namespace novflow
