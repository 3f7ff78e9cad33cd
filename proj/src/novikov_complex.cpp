#include "novflow/novikov.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace novflow {

NovikovGroupDesc NovikovGroupDesc::make(std::vector<Rational> energy, std::vector<long long> grading) {
    if (energy.size() != grading.size())
        throw DimensionMismatch("energy and grading vectors differ in length");
    NovikovGroupDesc g;
    g.rank = energy.size();
    g.energy = std::move(energy);
    g.grading = std::move(grading);
    for (long long m : g.grading) g.N = std::gcd(g.N, m < 0 ? -m : m);
    return g;
}

Rational NovikovGroupDesc::energy_of(const std::vector<long long>& g) const {
    if (g.size() != rank) throw DimensionMismatch("group element has wrong rank");
    Rational e = 0;
    for (std::size_t i = 0; i < rank; ++i) e += energy[i] * g[i];
    return e;
}

long long NovikovGroupDesc::grading_of(const std::vector<long long>& g) const {
    if (g.size() != rank) throw DimensionMismatch("group element has wrong rank");
    long long m = 0;
    for (std::size_t i = 0; i < rank; ++i) m += grading[i] * g[i];
    return m;
}

std::string NovikovGroupDesc::check() const {
    if (energy.size() != rank || grading.size() != rank) return "energy/grading length differs from rank";
    long long n = 0;
    for (long long m : grading) n = std::gcd(n, m < 0 ? -m : m);
    if (n != N) return "N = " + std::to_string(N) + " but gcd of gradings is " + std::to_string(n);
    return {};
}

long long normalize_degree(long long degree, long long modulus) {
    if (modulus <= 0) return degree;
    long long r = degree % modulus;
    return r < 0 ? r + modulus : r;
}

GradedCohomology GradedCohomology::compact() const {
    GradedCohomology out;
    out.modulus = modulus;
    for (const auto& [k, h] : degrees)
        if (h.free_rank != 0 || !h.torsion.empty()) out.degrees.emplace(k, h);
    return out;
}

bool operator==(const GradedCohomology& a, const GradedCohomology& b) {
    const auto ca = a.compact();
    const auto cb = b.compact();
    return ca.modulus == cb.modulus && ca.degrees == cb.degrees;
}

std::string GradedCohomology::to_string() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, h] : degrees) {
        os << (first ? "" : ", ") << "H^" << k << " = ";
        first = false;
        bool any = false;
        if (h.free_rank) {
            os << "L^" << h.free_rank;
            any = true;
        }
        for (const auto& t : h.torsion) {
            os << (any ? " + " : "") << "L/" << t.str();
            any = true;
        }
        if (!any) os << "0";
    }
    if (modulus) os << " (mod " << modulus << ")";
    return os.str();
}

NovikovComplex::NovikovComplex(NovikovGroupDesc group, std::vector<ComplexGenerator> generators,
                               NovikovMatrix differential, bool lambda0)
    : group_(std::move(group)), generators_(std::move(generators)),
      differential_(std::move(differential)), lambda0_(lambda0) {
    const std::size_t n = generators_.size();
    if (differential_.rows() != n || differential_.cols() != n)
        throw DimensionMismatch("differential must be " + std::to_string(n) + "x" + std::to_string(n));
    const long long mod = modulus();
    for (auto& g : generators_) g.degree = normalize_degree(g.degree, mod);
    std::set<std::string> ids;
    for (const auto& g : generators_)
        if (!ids.insert(g.id).second) throw DimensionMismatch("duplicate generator id '" + g.id + "'");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (differential_(i, j).is_zero()) continue;
            if (generators_[i].degree != normalize_degree(generators_[j].degree + 1, mod))
                throw DegreeMismatch("entry d(" + generators_[j].id + ") -> " + generators_[i].id +
                                     " does not raise degree by one");
        }
    }
    if (lambda0_ && !differential_.is_lambda0())
        throw NegativeValuationEntry("complex flagged over the valuation ring has a negative-valuation entry");
}

std::optional<std::size_t> NovikovComplex::index_of(std::string_view id) const {
    for (std::size_t i = 0; i < generators_.size(); ++i)
        if (generators_[i].id == id) return i;
    return std::nullopt;
}

std::vector<long long> NovikovComplex::degrees() const {
    const long long mod = modulus();
    std::vector<long long> out;
    if (mod > 0) {
        for (long long k = 0; k < mod; ++k) out.push_back(k);
        return out;
    }
    if (generators_.empty()) return out;
    auto [lo, hi] = std::minmax_element(generators_.begin(), generators_.end(),
                                        [](const auto& a, const auto& b) { return a.degree < b.degree; });
    for (long long k = lo->degree; k <= hi->degree; ++k) out.push_back(k);
    return out;
}

std::vector<std::size_t> NovikovComplex::generators_in_degree(long long degree) const {
    const long long d = normalize_degree(degree, modulus());
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < generators_.size(); ++i)
        if (generators_[i].degree == d) out.push_back(i);
    return out;
}

NovikovMatrix NovikovComplex::differential(long long k) const {
    const auto src = generators_in_degree(k);
    const auto dst = generators_in_degree(k + 1);
    std::vector<NovikovElement> e;
    e.reserve(src.size() * dst.size());
    for (std::size_t r : dst)
        for (std::size_t c : src) e.push_back(differential_(r, c));
    return NovikovMatrix(dst.size(), src.size(), std::move(e), differential_.truncation());
}

NovikovMatrix NovikovComplex::d_squared() const { return differential_ * differential_; }

bool NovikovComplex::is_complex() const { return d_squared().is_zero(); }

NovikovComplex NovikovComplex::with_differential(NovikovMatrix d, bool lambda0) const {
    return NovikovComplex(group_, generators_, std::move(d), lambda0);
}

GradedCohomology nov_homology(const NovikovComplex& complex) {
    const auto dd = complex.d_squared();
    for (std::size_t i = 0; i < dd.rows(); ++i)
        for (std::size_t j = 0; j < dd.cols(); ++j)
            if (!dd(i, j).is_zero())
                throw NotAComplex("d^2 != 0: coefficient of " + complex.generators()[i].id + " in d^2(" +
                                  complex.generators()[j].id + ") is " + dd(i, j).to_string());

    const long long mod = complex.modulus();
    const auto degrees = complex.degrees();
    // rank and torsion of d_k : C^k -> C^{k+1}
    std::map<long long, std::pair<std::size_t, std::vector<Integer>>> blocks;
    for (long long k : degrees) {
        const auto d = complex.differential(k);
        if (d.rows() == 0 || d.cols() == 0) {
            blocks[k] = {0, {}};
            continue;
        }
        const auto diag = nov_diagonalize(d);
        std::vector<Integer> torsion;
        for (const auto& f : diag.invariant_factors())
            if (f > 1) torsion.push_back(f);
        blocks[k] = {diag.rank, std::move(torsion)};
    }
    auto block = [&](long long k) -> std::pair<std::size_t, std::vector<Integer>> {
        auto it = blocks.find(normalize_degree(k, mod));
        return it == blocks.end() ? std::pair<std::size_t, std::vector<Integer>>{0, {}} : it->second;
    };

    GradedCohomology h;
    h.modulus = mod;
    for (long long k : degrees) {
        const std::size_t n = complex.generators_in_degree(k).size();
        const auto [rank_out, torsion_out] = block(k);
        const auto [rank_in, torsion_in] = block(k - 1);
        DegreeCohomology dc;
        dc.free_rank = n - rank_out - rank_in;
        dc.torsion = torsion_in;
        h.degrees[k] = std::move(dc);
    }
    return h;
}

MinRankReport min_rank_report(const GradedCohomology& h, long long N) {
    if (N < 0) throw DimensionMismatch("N must be nonnegative");
    if (h.modulus != 2 * N)
        throw DimensionMismatch("cohomology modulus " + std::to_string(h.modulus) + " does not match 2N = " +
                                std::to_string(2 * N));
    const long long mod = 2 * N;
    auto torsion_count = [&](long long k) -> std::size_t {
        auto it = h.degrees.find(normalize_degree(k, mod));
        return it == h.degrees.end() ? 0 : it->second.torsion.size();
    };

    std::vector<long long> ks;
    if (mod > 0) {
        for (long long k = 0; k < mod; ++k) ks.push_back(k);
    } else if (!h.degrees.empty()) {
        for (long long k = h.degrees.begin()->first; k <= h.degrees.rbegin()->first + 1; ++k) ks.push_back(k);
    }

    MinRankReport report;
    for (long long k : ks) {
        auto it = h.degrees.find(k);
        const std::size_t free = it == h.degrees.end() ? 0 : it->second.free_rank;
        report.per_degree_bound += free + torsion_count(k) + torsion_count(k - 1);
    }
    for (const auto& [k, dc] : h.degrees) report.lemma_count += dc.free_rank + dc.torsion.size();

    // Realizing complex: a free generator per free summand, and for each
    // torsion summand L/t in degree k a pair (k-1) --t--> k.
    std::vector<ComplexGenerator> gens;
    std::vector<std::tuple<std::size_t, std::size_t, Integer>> arrows;  // (target, source, t)
    for (const auto& [k, dc] : h.degrees) {
        for (std::size_t i = 0; i < dc.free_rank; ++i)
            gens.push_back({"f" + std::to_string(k) + "_" + std::to_string(i), k});
        for (std::size_t i = 0; i < dc.torsion.size(); ++i) {
            const std::string tag = std::to_string(k) + "_" + std::to_string(i);
            gens.push_back({"s" + tag, normalize_degree(k - 1, mod)});
            gens.push_back({"t" + tag, k});
            arrows.emplace_back(gens.size() - 1, gens.size() - 2, dc.torsion[i]);
        }
    }
    NovikovMatrix d(gens.size(), gens.size());
    for (const auto& [r, c, t] : arrows) d = d.with_entry(r, c, NovikovElement::constant(t));
    const auto group = N == 0 ? NovikovGroupDesc::trivial()
                              : NovikovGroupDesc::make({Rational(0)}, {N});
    report.realizing = NovikovComplex(group, std::move(gens), std::move(d));
    report.verified = report.realizing.size() == report.per_degree_bound &&
                      nov_homology(report.realizing) == h;
    return report;
}

std::size_t min_rank(const GradedCohomology& h, long long N) { return min_rank_report(h, N).per_degree_bound; }

}  // namespace novflow
