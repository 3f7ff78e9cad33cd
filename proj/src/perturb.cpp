#include "novflow/perturb.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace novflow {

// ---------------------------------------------------------------- Poly

Poly Poly::constant(int nvars, const Rational& c) {
    Poly p(nvars);
    p.add_term(Exponent(nvars, 0), c);
    return p;
}

Poly Poly::variable(int nvars, int i) {
    Exponent e(nvars, 0);
    e.at(i) = 1;
    return monomial(e, 1);
}

Poly Poly::monomial(const Exponent& e, const Rational& c) {
    Poly p(static_cast<int>(e.size()));
    p.add_term(e, c);
    return p;
}

void Poly::add_term(const Exponent& e, const Rational& c) {
    if (static_cast<int>(e.size()) != nvars_) throw InvariantViolation("exponent has the wrong number of variables");
    for (int x : e)
        if (x < 0) throw InvariantViolation("negative exponent");
    if (c == 0) return;
    auto [it, inserted] = terms_.emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

int Poly::degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) {
        int s = 0;
        for (int x : e) s += x;
        d = std::max(d, s);
    }
    return d;
}

Rational Poly::evaluate(const std::vector<Rational>& x) const {
    Rational sum = 0;
    for (const auto& [e, c] : terms_) {
        Rational t = c;
        for (int i = 0; i < nvars_; ++i)
            for (int k = 0; k < e[i]; ++k) t *= x[i];
        sum += t;
    }
    return sum;
}

double Poly::evaluate(const std::vector<double>& x) const {
    double sum = 0;
    for (const auto& [e, c] : terms_) {
        double t = to_double(c);
        for (int i = 0; i < nvars_; ++i) t *= std::pow(x[i], e[i]);
        sum += t;
    }
    return sum;
}

Poly Poly::derivative(int i) const {
    Poly out(nvars_);
    for (const auto& [e, c] : terms_) {
        if (e[i] == 0) continue;
        Exponent f = e;
        --f[i];
        out.add_term(f, c * e[i]);
    }
    return out;
}

Poly Poly::compose(const std::vector<Poly>& subs) const {
    if (static_cast<int>(subs.size()) != nvars_) throw InvariantViolation("compose needs one substitute per variable");
    const int n = subs.empty() ? 0 : subs[0].nvars();
    // powers[i][k] = subs[i]^k
    std::vector<std::vector<Poly>> powers(nvars_);
    for (int i = 0; i < nvars_; ++i) powers[i].push_back(constant(n, 1));
    Poly out(n);
    for (const auto& [e, c] : terms_) {
        Poly t = constant(n, c);
        for (int i = 0; i < nvars_; ++i) {
            while (static_cast<int>(powers[i].size()) <= e[i]) powers[i].push_back(powers[i].back() * subs[i]);
            if (e[i]) t = t * powers[i][e[i]];
        }
        out = out + t;
    }
    return out;
}

Poly Poly::restrict_to(const std::vector<bool>& keep) const {
    int n = 0;
    for (bool k : keep) n += k;
    Poly out(n);
    for (const auto& [e, c] : terms_) {
        Exponent f;
        bool vanishes = false;
        for (int i = 0; i < nvars_; ++i) {
            if (keep[i]) f.push_back(e[i]);
            else if (e[i] > 0) vanishes = true;
        }
        if (!vanishes) out.add_term(f, c);
    }
    return out;
}

Poly Poly::project(const std::vector<bool>& keep) const {
    Poly out(nvars_);
    for (const auto& [e, c] : terms_) {
        bool vanishes = false;
        for (int i = 0; i < nvars_; ++i)
            if (!keep[i] && e[i] > 0) vanishes = true;
        if (!vanishes) out.add_term(e, c);
    }
    return out;
}

std::string Poly::to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    // highest degree first
    std::vector<std::pair<Exponent, Rational>> ts(terms_.begin(), terms_.end());
    std::stable_sort(ts.begin(), ts.end(), [](const auto& a, const auto& b) {
        int da = 0, db = 0;
        for (int x : a.first) da += x;
        for (int x : b.first) db += x;
        return da > db;
    });
    for (const auto& [e, c] : ts) {
        Rational mag = c < 0 ? Rational(-c) : c;
        if (s.empty()) s += c < 0 ? "-" : "";
        else s += c < 0 ? " - " : " + ";
        std::string mono;
        for (int i = 0; i < nvars_; ++i) {
            if (e[i] == 0) continue;
            if (!mono.empty()) mono += "*";
            mono += "x" + std::to_string(i + 1);
            if (e[i] > 1) mono += "^" + std::to_string(e[i]);
        }
        if (mono.empty()) s += novflow::to_string(mag);
        else if (mag == 1) s += mono;
        else s += novflow::to_string(mag) + "*" + mono;
    }
    return s;
}

namespace {

void same_vars(const Poly& a, const Poly& b) {
    if (a.nvars() != b.nvars()) throw InvariantViolation("polynomials in different numbers of variables");
}

}  // namespace

Poly operator+(const Poly& a, const Poly& b) {
    same_vars(a, b);
    Poly out = a;
    for (const auto& [e, c] : b.terms_) out.add_term(e, c);
    return out;
}

Poly operator-(const Poly& a, const Poly& b) {
    same_vars(a, b);
    Poly out = a;
    for (const auto& [e, c] : b.terms_) out.add_term(e, -c);
    return out;
}

Poly operator*(const Poly& a, const Poly& b) {
    same_vars(a, b);
    Poly out(a.nvars_);
    for (const auto& [ea, ca] : a.terms_)
        for (const auto& [eb, cb] : b.terms_) {
            Exponent e(ea);
            for (std::size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
            out.add_term(e, ca * cb);
        }
    return out;
}

Poly operator*(const Rational& c, const Poly& a) {
    Poly out(a.nvars_);
    for (const auto& [e, x] : a.terms_) out.add_term(e, c * x);
    return out;
}

std::vector<Exponent> monomials_up_to(int nvars, int d) {
    std::vector<Exponent> out;
    Exponent cur(nvars, 0);
    std::function<void(int, int)> rec = [&](int i, int left) {
        if (i == nvars) {
            out.push_back(cur);
            return;
        }
        for (int k = left; k >= 0; --k) {
            cur[i] = k;
            rec(i + 1, left - k);
        }
        cur[i] = 0;
    };
    for (int total = 0; total <= d; ++total) {
        // exactly `total`: recurse and keep those summing to total
        const std::size_t before = out.size();
        rec(0, total);
        out.erase(std::remove_if(out.begin() + static_cast<std::ptrdiff_t>(before), out.end(),
                                 [&](const Exponent& e) {
                                     int s = 0;
                                     for (int x : e) s += x;
                                     return s != total;
                                 }),
                  out.end());
    }
    return out;
}

// ---------------------------------------------------------------- groups

namespace {

RatMatrix identity(int n) {
    RatMatrix m(n, std::vector<Rational>(n, 0));
    for (int i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

RatMatrix mat_mul(const RatMatrix& a, const RatMatrix& b) {
    const std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
    RatMatrix out(n, std::vector<Rational>(m, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < k; ++l)
            if (a[i][l] != 0)
                for (std::size_t j = 0; j < m; ++j) out[i][j] += a[i][l] * b[l][j];
    return out;
}

RatMatrix transpose(const RatMatrix& a) {
    const std::size_t n = a.size(), m = a.empty() ? 0 : a[0].size();
    RatMatrix out(m, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) out[j][i] = a[i][j];
    return out;
}

void check_orthogonal(const RatMatrix& a, int n, const char* what) {
    if (static_cast<int>(a.size()) != n) throw InvariantViolation(std::string(what) + " matrix has the wrong size");
    for (const auto& row : a)
        if (static_cast<int>(row.size()) != n) throw InvariantViolation(std::string(what) + " matrix is not square");
    if (mat_mul(a, transpose(a)) != identity(n)) throw InvariantViolation(std::string(what) + " matrix is not orthogonal");
}

}  // namespace

FiniteGroupRep::FiniteGroupRep(int nV, int nW, std::vector<GroupElement> generators)
    : nV_(nV), nW_(nW), generators_(std::move(generators)) {
    for (const auto& g : generators_) {
        check_orthogonal(g.v, nV, "V");
        check_orthogonal(g.w, nW, "W");
    }
    elements_.push_back({identity(nV), identity(nW)});
    for (std::size_t i = 0; i < elements_.size(); ++i)
        for (const auto& g : generators_) {
            GroupElement h{mat_mul(g.v, elements_[i].v), mat_mul(g.w, elements_[i].w)};
            if (std::find(elements_.begin(), elements_.end(), h) != elements_.end()) continue;
            elements_.push_back(std::move(h));
            if (elements_.size() > 8) throw OutOfScope("group has more than 8 elements");
        }
}

FiniteGroupRep FiniteGroupRep::trivial(int nV, int nW) { return FiniteGroupRep(nV, nW, {}); }

PolyMap act(const GroupElement& g, const PolyMap& p) {
    const int nV = static_cast<int>(g.v.size());
    std::vector<Poly> subs;
    for (int i = 0; i < nV; ++i) {
        Poly s(nV);
        for (int j = 0; j < nV; ++j) s = s + g.v[i][j] * Poly::variable(nV, j);
        subs.push_back(std::move(s));
    }
    PolyMap composed;
    for (const auto& c : p) composed.push_back(c.compose(subs));
    // g_W^{-1} = g_W^T
    PolyMap out;
    for (std::size_t i = 0; i < g.w.size(); ++i) {
        Poly s(nV);
        for (std::size_t j = 0; j < g.w.size(); ++j) s = s + g.w[j][i] * composed[j];
        out.push_back(std::move(s));
    }
    return out;
}

namespace {

void check_map(const PolyMap& p, const FiniteGroupRep& rep) {
    if (static_cast<int>(p.size()) != rep.nW()) throw InvariantViolation("map has the wrong number of components");
    for (const auto& c : p)
        if (c.nvars() != rep.nV()) throw InvariantViolation("map has the wrong number of variables");
}

}  // namespace

PolyMap reynolds_project(const PolyMap& p, const FiniteGroupRep& rep) {
    check_map(p, rep);
    PolyMap sum(p.size(), Poly(rep.nV()));
    for (const auto& g : rep.elements()) {
        const auto q = act(g, p);
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = sum[i] + q[i];
    }
    const Rational scale(1, static_cast<long long>(rep.order()));
    for (auto& c : sum) c = scale * c;
    return sum;
}

bool is_equivariant(const PolyMap& p, const FiniteGroupRep& rep) {
    check_map(p, rep);
    for (const auto& g : rep.generators())
        if (act(g, p) != p) return false;
    return true;
}

EquivariantPolySpace enumerate_equivariant_basis(int nV, int nW, int d, const FiniteGroupRep& rep) {
    if (d < 0) throw InvariantViolation("degree must be nonnegative");
    if (rep.nV() != nV || rep.nW() != nW) throw InvariantViolation("representation does not match V and W");
    const auto monos = monomials_up_to(nV, d);
    const std::size_t cols = monos.size() * static_cast<std::size_t>(nW);
    auto column = [&](int w, const Exponent& e) {
        const auto it = std::find(monos.begin(), monos.end(), e);
        return static_cast<std::size_t>(w) * monos.size() + static_cast<std::size_t>(it - monos.begin());
    };
    // rows: averaged monomial maps as coefficient vectors
    std::vector<std::vector<Rational>> rows;
    for (int w = 0; w < nW; ++w)
        for (const auto& e : monos) {
            PolyMap p(nW, Poly(nV));
            p[w] = Poly::monomial(e, 1);
            const auto q = reynolds_project(p, rep);
            std::vector<Rational> row(cols, 0);
            for (int k = 0; k < nW; ++k)
                for (const auto& [f, c] : q[k].terms()) row[column(k, f)] = c;
            rows.push_back(std::move(row));
        }
    // reduced row echelon form
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
        std::size_t piv = r;
        while (piv < rows.size() && rows[piv][c] == 0) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[r], rows[piv]);
        const Rational inv = 1 / rows[r][c];
        for (auto& x : rows[r]) x *= inv;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == r || rows[i][c] == 0) continue;
            const Rational f = rows[i][c];
            for (std::size_t j = 0; j < cols; ++j) rows[i][j] -= f * rows[r][j];
        }
        ++r;
    }
    EquivariantPolySpace out{nV, nW, d, {}};
    for (std::size_t i = 0; i < r; ++i) {
        PolyMap p(nW, Poly(nV));
        for (std::size_t j = 0; j < cols; ++j)
            if (rows[i][j] != 0) p[j / monos.size()].add_term(monos[j % monos.size()], rows[i][j]);
        out.basis.push_back(std::move(p));
    }
    return out;
}

// ---------------------------------------------------------------- extension

void SectionOnBox::check() const {
    if (corner < 0 || free < 0) throw InvariantViolation("negative dimension");
    if (corner > 2) throw OutOfScope("more than 2 corner coordinates");
    if (corner + free > 4) throw OutOfScope("total dimension above 4");
    for (const auto& c : map) {
        if (c.nvars() != corner + free) throw InvariantViolation("component has the wrong number of variables");
        if (c.degree() > 4) throw OutOfScope("polynomial degree above 4");
    }
}

std::vector<bool> stratum_mask(const StratumLabel& T, int free) {
    std::vector<bool> keep;
    for (int i = 1; i <= T.k; ++i) keep.push_back(T.contains(i));
    keep.insert(keep.end(), static_cast<std::size_t>(free), true);
    return keep;
}

namespace {

PolyMap project_map(const PolyMap& p, const std::vector<bool>& keep) {
    PolyMap out;
    for (const auto& c : p) out.push_back(c.project(keep));
    return out;
}

std::vector<StratumLabel> proper_faces(int l) {
    std::vector<StratumLabel> out;
    for (std::uint64_t b = 0; b + 1 < (std::uint64_t{1} << l); ++b) out.push_back({l, b});
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });
    return out;
}

}  // namespace

BoundaryData BoundaryData::from_section(const SectionOnBox& s) {
    BoundaryData bd{s.corner, s.free, s.codim(), {}, std::nullopt};
    for (const auto& T : proper_faces(s.corner)) bd.faces[T] = project_map(s.map, stratum_mask(T, s.free));
    return bd;
}

void check_compatible(const BoundaryData& bd) {
    SectionOnBox shape{bd.corner, bd.free, {}};
    shape.check();
    const int n = bd.corner + bd.free;
    const auto faces = proper_faces(bd.corner);
    for (const auto& T : faces) {
        auto it = bd.faces.find(T);
        if (it == bd.faces.end()) throw IncompatibleBoundary("missing boundary data on face " + T.to_string());
        if (static_cast<int>(it->second.size()) != bd.codim)
            throw IncompatibleBoundary("face " + T.to_string() + " has the wrong number of components");
        for (const auto& c : it->second) {
            if (c.nvars() != n) throw IncompatibleBoundary("face " + T.to_string() + " has the wrong variable count");
            if (c.degree() > 4) throw OutOfScope("polynomial degree above 4");
        }
        if (bd.group && !is_equivariant(project_map(it->second, stratum_mask(T, bd.free)), *bd.group))
            throw IncompatibleBoundary("boundary data on face " + T.to_string() + " is not equivariant");
    }
    for (std::size_t a = 0; a < faces.size(); ++a)
        for (std::size_t b = a + 1; b < faces.size(); ++b) {
            const StratumLabel meet{bd.corner, faces[a].bits & faces[b].bits};
            const auto keep = stratum_mask(meet, bd.free);
            if (project_map(bd.faces.at(faces[a]), keep) != project_map(bd.faces.at(faces[b]), keep))
                throw IncompatibleBoundary("faces " + faces[a].to_string() + " and " + faces[b].to_string() +
                                           " disagree on " + meet.to_string());
        }
    if (bd.group) {
        if (bd.group->nV() != n || bd.group->nW() != bd.codim)
            throw InvariantViolation("group representation does not match the chart");
        // trivial on the corner coordinates
        for (const auto& g : bd.group->generators())
            for (int i = 0; i < bd.corner; ++i)
                for (int j = 0; j < n; ++j)
                    if (g.v[i][j] != (i == j ? 1 : 0) || g.v[j][i] != (i == j ? 1 : 0))
                        throw InvariantViolation("group must act trivially on the corner coordinates");
    }
}

SectionOnBox extend_from_boundary(const BoundaryData& bd) {
    check_compatible(bd);
    const int n = bd.corner + bd.free;
    SectionOnBox out{bd.corner, bd.free, PolyMap(static_cast<std::size_t>(bd.codim), Poly(n))};
    for (const auto& T : proper_faces(bd.corner)) {
        const auto keep = stratum_mask(T, bd.free);
        const auto target = project_map(bd.faces.at(T), keep);
        const auto current = project_map(out.map, keep);
        for (std::size_t i = 0; i < out.map.size(); ++i) out.map[i] = out.map[i] + (target[i] - current[i]);
    }
    return out;
}

// ---------------------------------------------------------------- numerics

namespace {

struct Interval {
    double lo, hi;
};

Interval ipow(Interval x, int k) {
    if (k == 0) return {1, 1};
    const double a = std::pow(x.lo, k), b = std::pow(x.hi, k);
    if (k % 2 == 1 || x.lo >= 0) return {std::min(a, b), std::max(a, b)};
    if (x.hi <= 0) return {std::min(a, b), std::max(a, b)};
    return {0, std::max(a, b)};
}

Interval imul(Interval a, Interval b) {
    const double p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
    return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
}

// Double-precision copy of a polynomial for evaluation.
struct DPoly {
    std::vector<std::pair<Exponent, double>> terms;

    explicit DPoly(const Poly& p) {
        for (const auto& [e, c] : p.terms()) terms.push_back({e, to_double(c)});
    }

    double eval(const std::vector<double>& x) const {
        double s = 0;
        for (const auto& [e, c] : terms) {
            double t = c;
            for (std::size_t i = 0; i < e.size(); ++i)
                if (e[i]) t *= std::pow(x[i], e[i]);
            s += t;
        }
        return s;
    }

    Interval eval(const std::vector<Interval>& box) const {
        Interval s{0, 0};
        double mag = 0;
        for (const auto& [e, c] : terms) {
            Interval t{c, c};
            for (std::size_t i = 0; i < e.size(); ++i)
                if (e[i]) t = imul(t, ipow(box[i], e[i]));
            s.lo += t.lo;
            s.hi += t.hi;
            mag += std::max(std::abs(t.lo), std::abs(t.hi));
        }
        // outward slack for rounding
        const double slack = 1e-12 * (1 + mag);
        return {s.lo - slack, s.hi + slack};
    }
};

// Polynomial system with its Jacobian on a box.
struct System {
    int n = 0;
    std::vector<DPoly> f;
    std::vector<std::vector<DPoly>> jac;
    std::vector<double> lo, hi;

    System(const PolyMap& p, int nvars, std::vector<double> lo_, std::vector<double> hi_)
        : n(nvars), lo(std::move(lo_)), hi(std::move(hi_)) {
        for (const auto& c : p) {
            f.emplace_back(c);
            std::vector<DPoly> row;
            for (int i = 0; i < n; ++i) row.emplace_back(c.derivative(i));
            jac.push_back(std::move(row));
        }
    }

    Eigen::VectorXd value(const std::vector<double>& x) const {
        Eigen::VectorXd v(static_cast<Eigen::Index>(f.size()));
        for (std::size_t i = 0; i < f.size(); ++i) v(static_cast<Eigen::Index>(i)) = f[i].eval(x);
        return v;
    }

    Eigen::MatrixXd jacobian(const std::vector<double>& x) const {
        Eigen::MatrixXd m(static_cast<Eigen::Index>(f.size()), n);
        for (std::size_t i = 0; i < f.size(); ++i)
            for (int j = 0; j < n; ++j) m(static_cast<Eigen::Index>(i), j) = jac[i][j].eval(x);
        return m;
    }

    // Range of f_i over the box: naive form intersected with the mean-value form.
    bool excludes_zero(const std::vector<Interval>& box) const {
        std::vector<double> mid(n);
        for (int j = 0; j < n; ++j) mid[j] = 0.5 * (box[j].lo + box[j].hi);
        for (std::size_t i = 0; i < f.size(); ++i) {
            const Interval naive = f[i].eval(box);
            if (naive.lo > 0 || naive.hi < 0) return true;
            const double c = f[i].eval(mid);
            Interval mv{c, c};
            for (int j = 0; j < n; ++j) {
                const Interval d = jac[i][j].eval(box);
                const Interval t = imul(d, {box[j].lo - mid[j], box[j].hi - mid[j]});
                mv.lo += t.lo;
                mv.hi += t.hi;
            }
            const double slack = 1e-12 * (1 + std::abs(c));
            if (mv.lo - slack > 0 || mv.hi + slack < 0) return true;
        }
        return false;
    }
};

constexpr double kResidual = 1e-12;
constexpr double kMerge = 1e-8;
constexpr double kMinWidth = 1.0 / 2048;
constexpr std::size_t kBoxBudget = 400000;

std::optional<std::vector<double>> newton(const System& s, std::vector<double> x) {
    for (int it = 0; it < 60; ++it) {
        const auto v = s.value(x);
        if (v.lpNorm<Eigen::Infinity>() < kResidual) return x;
        const auto j = s.jacobian(x);
        const Eigen::VectorXd step = j.completeOrthogonalDecomposition().solve(-v);
        if (!step.allFinite()) return std::nullopt;
        for (int i = 0; i < s.n; ++i) x[i] += step(i);
        if (step.lpNorm<Eigen::Infinity>() > 10) return std::nullopt;
    }
    if (s.value(x).lpNorm<Eigen::Infinity>() < kResidual) return x;
    return std::nullopt;
}

std::vector<std::vector<double>> find_zeros(const System& s) {
    std::vector<std::vector<double>> roots;
    if (s.n == 0) return roots;
    std::vector<std::vector<Interval>> stack;
    std::vector<Interval> root_box;
    for (int j = 0; j < s.n; ++j) root_box.push_back({s.lo[j], s.hi[j]});
    stack.push_back(root_box);
    std::size_t processed = 0;
    while (!stack.empty()) {
        auto box = std::move(stack.back());
        stack.pop_back();
        if (++processed > kBoxBudget) throw BudgetExceeded("zero isolation exceeded the subdivision budget");
        if (s.excludes_zero(box)) continue;
        int widest = 0;
        for (int j = 1; j < s.n; ++j)
            if (box[j].hi - box[j].lo > box[widest].hi - box[widest].lo) widest = j;
        if (box[widest].hi - box[widest].lo <= kMinWidth) {
            std::vector<double> mid(s.n);
            for (int j = 0; j < s.n; ++j) mid[j] = 0.5 * (box[j].lo + box[j].hi);
            auto r = newton(s, mid);
            if (!r) continue;
            bool inside = true;
            for (int j = 0; j < s.n; ++j) {
                if ((*r)[j] < s.lo[j] - kMerge || (*r)[j] > s.hi[j] + kMerge) inside = false;
                (*r)[j] = std::clamp((*r)[j], s.lo[j], s.hi[j]);
            }
            if (!inside) continue;
            bool dup = false;
            for (const auto& q : roots) {
                double dist = 0;
                for (int j = 0; j < s.n; ++j) dist = std::max(dist, std::abs(q[j] - (*r)[j]));
                if (dist < kMerge) dup = true;
            }
            if (!dup) roots.push_back(*r);
            continue;
        }
        const double m = 0.5 * (box[widest].lo + box[widest].hi);
        auto left = box, right = box;
        left[widest].hi = m;
        right[widest].lo = m;
        stack.push_back(std::move(left));
        stack.push_back(std::move(right));
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

double dist(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

struct Restricted {
    StratumLabel T;
    int dim = 0;
    int corner_vars = 0;  // |T|; the first corner_vars variables are corner coordinates
    PolyMap map;
    std::vector<double> lo, hi;
};

Restricted restrict_section(const SectionOnBox& s, const StratumLabel& T) {
    Restricted r;
    r.T = T;
    r.corner_vars = T.size();
    r.dim = r.corner_vars + s.free;
    const auto keep = stratum_mask(T, s.free);
    for (const auto& c : s.map) r.map.push_back(c.restrict_to(keep));
    for (int j = 0; j < r.dim; ++j) {
        r.lo.push_back(j < r.corner_vars ? 0.0 : -1.0);
        r.hi.push_back(1.0);
    }
    return r;
}

bool in_open_stratum(const Restricted& r, const std::vector<double>& x) {
    for (int j = 0; j < r.corner_vars; ++j)
        if (x[j] <= kMerge) return false;
    return true;
}

ZeroPoint describe(const System& s, const std::vector<double>& x, double tol) {
    ZeroPoint z;
    z.x = x;
    const auto j = s.jacobian(x);
    if (j.rows() == 0 || j.cols() == 0) {
        z.rank = 0;
        z.min_singular = 0;
        return z;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(j);
    const auto& sv = svd.singularValues();
    for (Eigen::Index i = 0; i < sv.size(); ++i) z.rank += sv(i) > tol;
    z.min_singular = sv(sv.size() - 1);
    if (j.rows() == j.cols() && z.rank == static_cast<std::size_t>(j.rows())) z.sign = j.determinant() > 0 ? 1 : -1;
    return z;
}

// c x c minors of the Jacobian of p, exactly.
PolyMap jacobian_minors(const PolyMap& p, int n) {
    const int c = static_cast<int>(p.size());
    std::vector<std::vector<Poly>> jac(c);
    for (int i = 0; i < c; ++i)
        for (int j = 0; j < n; ++j) jac[i].push_back(p[i].derivative(j));
    std::function<Poly(const std::vector<int>&, int, std::vector<bool>&)> det =
        [&](const std::vector<int>& cols, int row, std::vector<bool>& used) -> Poly {
        if (row == c) return Poly::constant(n, 1);
        Poly sum(n);
        int sign = 1;
        for (std::size_t k = 0; k < cols.size(); ++k) {
            if (used[k]) continue;
            used[k] = true;
            const Poly term = jac[row][cols[k]] * det(cols, row + 1, used);
            used[k] = false;
            sum = sign > 0 ? sum + term : sum - term;
            sign = -sign;
        }
        return sum;
    };
    PolyMap out;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        std::vector<int> cols;
        for (int j = 0; j < n; ++j)
            if (mask >> j & 1) cols.push_back(j);
        if (static_cast<int>(cols.size()) != c) continue;
        std::vector<bool> used(cols.size(), false);
        out.push_back(det(cols, 0, used));
    }
    return out;
}

StratumReport analyze(const SectionOnBox& s, const StratumLabel& T, double tol) {
    const auto r = restrict_section(s, T);
    StratumReport rep;
    rep.stratum = T;
    rep.dimension = r.dim;
    rep.codim = s.codim();
    const int c = rep.codim;
    if (c == 0) return rep;
    if (r.dim == 0) {
        // a point: exact evaluation
        bool zero = true;
        for (const auto& p : r.map) zero = zero && p.evaluate(std::vector<Rational>{}) == 0;
        if (zero) {
            rep.points.push_back({{}, 0, 0, 0});
            rep.transverse = false;
        }
        return rep;
    }
    const System plain(r.map, r.dim, r.lo, r.hi);
    if (c > r.dim) {
        // every zero is degenerate
        for (const auto& x : find_zeros(plain)) {
            if (!in_open_stratum(r, x)) continue;
            rep.points.push_back(describe(plain, x, tol));
            rep.transverse = false;
        }
        return rep;
    }
    // zeros where the Jacobian drops rank, found as common zeros with its c x c minors
    PolyMap bad = r.map;
    for (auto& m : jacobian_minors(r.map, r.dim)) bad.push_back(std::move(m));
    std::vector<std::vector<double>> singular;
    for (const auto& x : find_zeros(System(bad, r.dim, r.lo, r.hi)))
        if (in_open_stratum(r, x)) singular.push_back(x);
    rep.transverse = singular.empty();
    if (c < r.dim) {
        for (const auto& x : singular) rep.points.push_back(describe(plain, x, tol));
        return rep;
    }
    for (const auto& x : find_zeros(plain)) {
        if (!in_open_stratum(r, x)) continue;
        auto z = describe(plain, x, tol);
        for (const auto& y : singular)
            if (dist(x, y) < 1e-5) z.sign = 0;
        if (z.rank < static_cast<std::size_t>(c)) {
            z.sign = 0;
            rep.transverse = false;
        }
        rep.points.push_back(std::move(z));
    }
    for (const auto& y : singular)
        if (std::none_of(rep.points.begin(), rep.points.end(), [&](const ZeroPoint& z) { return dist(z.x, y) < 1e-5; }))
            rep.points.push_back(describe(plain, y, tol));
    return rep;
}

}  // namespace

TransversalityReport check_strong_transversality(const SectionOnBox& s, double tol) {
    s.check();
    if (s.codim() > s.dimension() + 1) throw OutOfScope("codimension exceeds dimension + 1");
    TransversalityReport rep;
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << s.corner); ++b) {
        rep.strata.push_back(analyze(s, {s.corner, b}, tol));
        rep.transverse = rep.transverse && rep.strata.back().transverse;
    }
    return rep;
}

std::vector<ZeroPoint> signed_zeros(const SectionOnBox& s, const StratumLabel& T, double tol) {
    s.check();
    if (T.k != s.corner) throw InvariantViolation("stratum label over the wrong corner");
    const int dim = T.size() + s.free;
    if (dim != s.codim()) throw InvariantViolation("stratum dimension differs from the codimension");
    if (dim == 0) return {ZeroPoint{{}, 0, 0, 1}};
    auto rep = analyze(s, T, tol);
    for (const auto& z : rep.points)
        if (z.sign == 0 || !rep.transverse)
            throw NotTransverse("degenerate zero on stratum " + T.to_string() + " (smallest singular value " +
                                std::to_string(z.min_singular) + ")");
    return rep.points;
}

long long count_signed_zeros(const SectionOnBox& s, const StratumLabel& T, double tol) {
    long long sum = 0;
    for (const auto& z : signed_zeros(s, T, tol)) sum += z.sign;
    return sum;
}

int wall_orientation(int n, int j) { return (n + j) % 2 == 0 ? -1 : 1; }

namespace {

// Unit kernel vector of the (n-1) x n Jacobian with det [J ; v] > 0.
Eigen::VectorXd oriented_kernel(const Eigen::MatrixXd& j) {
    const Eigen::Index n = j.cols();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(j, Eigen::ComputeFullV);
    Eigen::VectorXd v = svd.matrixV().col(n - 1);
    Eigen::MatrixXd m(n, n);
    m.topRows(n - 1) = j;
    m.row(n - 1) = v.transpose();
    if (m.determinant() < 0) v = -v;
    return v;
}

// Newton for F = 0 with x_i = b added.
std::optional<std::vector<double>> newton_on_face(const System& s, std::vector<double> x, int i, double b) {
    for (int it = 0; it < 60; ++it) {
        Eigen::VectorXd v(s.f.size() + 1);
        v.head(static_cast<Eigen::Index>(s.f.size())) = s.value(x);
        v(static_cast<Eigen::Index>(s.f.size())) = x[i] - b;
        if (v.lpNorm<Eigen::Infinity>() < kResidual) return x;
        Eigen::MatrixXd j(s.f.size() + 1, s.n);
        j.topRows(static_cast<Eigen::Index>(s.f.size())) = s.jacobian(x);
        j.row(static_cast<Eigen::Index>(s.f.size())).setZero();
        j(static_cast<Eigen::Index>(s.f.size()), i) = 1;
        const Eigen::VectorXd step = j.colPivHouseholderQr().solve(-v);
        if (!step.allFinite() || step.lpNorm<Eigen::Infinity>() > 1) return std::nullopt;
        for (int k = 0; k < s.n; ++k) x[k] += step(k);
    }
    return std::nullopt;
}

struct WallZero {
    int wall;                // 1-based corner index
    std::vector<double> x;   // full coordinates
    int sign;                // sign det of the wall Jacobian
    bool visited = false;
};

struct TraceEnd {
    std::vector<double> x;
    int coord;   // coordinate that hit its bound
    double bound;
    Eigen::VectorXd direction;
    std::size_t steps;
};

TraceEnd trace(const System& s, std::vector<double> y, Eigen::VectorXd tau) {
    const int n = s.n;
    double h = 0.02;
    constexpr double hmax = 0.05, hmin = 1e-10;
    for (std::size_t steps = 1; steps < 200000; ++steps) {
        std::vector<double> pred(y);
        for (int i = 0; i < n; ++i) pred[i] += h * tau(i);
        auto corr = newton(s, pred);
        bool ok = corr && dist(*corr, pred) < 0.5 * h;
        Eigen::VectorXd tnew;
        if (ok) {
            tnew = oriented_kernel(s.jacobian(*corr));
            if (tnew.dot(tau) < 0) tnew = -tnew;
            ok = tnew.dot(tau) > std::cos(0.3);
        }
        if (!ok) {
            h *= 0.5;
            if (h < hmin) throw CurveTrackingFailure("step size underflow while following a zero curve");
            continue;
        }
        // earliest bound crossed between y and corr
        int coord = -1;
        double frac = 2, bound = 0;
        for (int i = 0; i < n; ++i) {
            const double z = (*corr)[i];
            double b;
            if (z < s.lo[i]) b = s.lo[i];
            else if (z > s.hi[i]) b = s.hi[i];
            else continue;
            const double t = (b - y[i]) / (z - y[i]);
            if (t < frac) {
                frac = t;
                coord = i;
                bound = b;
            }
        }
        if (coord >= 0) {
            std::vector<double> start(y);
            for (int i = 0; i < n; ++i) start[i] += frac * ((*corr)[i] - y[i]);
            auto end = newton_on_face(s, start, coord, bound);
            bool inside = end.has_value();
            if (end)
                for (int i = 0; i < n; ++i)
                    if ((*end)[i] < s.lo[i] - 1e-9 || (*end)[i] > s.hi[i] + 1e-9) inside = false;
            if (!inside) {
                h *= 0.5;
                if (h < hmin) throw CurveTrackingFailure("could not locate where a zero curve leaves the box");
                continue;
            }
            (*end)[coord] = bound;
            return {*end, coord, bound, tnew, steps};
        }
        y = *corr;
        tau = tnew;
        h = std::min(h * 1.3, hmax);
    }
    throw CurveTrackingFailure("zero curve did not reach the boundary");
}

}  // namespace

BoundaryReport boundary_consistency(const SectionOnBox& s, double tol) {
    s.check();
    const int n = s.dimension();
    if (s.codim() != n - 1) throw InvariantViolation("boundary consistency needs a one-dimensional zero set");
    const auto tr = check_strong_transversality(s, tol);
    for (const auto& st : tr.strata)
        if (!st.transverse) throw NotTransverse("section is not transverse on stratum " + st.stratum.to_string());

    const StratumLabel top = StratumLabel::full(s.corner);
    std::vector<WallZero> zeros;
    BoundaryReport rep;
    for (int j = 1; j <= s.corner; ++j) {
        StratumLabel wall = top;
        wall.bits &= ~(std::uint64_t{1} << (j - 1));
        WallReport wr;
        wr.wall = wall;
        for (const auto& z : signed_zeros(s, wall, tol)) {
            std::vector<double> x(z.x);
            x.insert(x.begin() + (j - 1), 0.0);
            zeros.push_back({j, std::move(x), z.sign});
            wr.count += z.sign;
        }
        wr.expected_sum = wall_orientation(n, j) * wr.count;
        rep.walls.push_back(wr);
    }

    std::vector<double> lo, hi;
    for (int i = 0; i < n; ++i) {
        lo.push_back(i < s.corner ? 0.0 : -1.0);
        hi.push_back(1.0);
    }
    const System sys(s.map, n, lo, hi);
    bool signs_match = true;

    for (std::size_t zi = 0; zi < zeros.size(); ++zi) {
        if (zeros[zi].visited) continue;
        auto& z = zeros[zi];
        z.visited = true;
        const int p = z.wall - 1;
        auto polished = newton_on_face(sys, z.x, p, 0.0);
        if (!polished) throw CurveTrackingFailure("wall zero does not lie on the zero curve");
        const Eigen::VectorXd v = oriented_kernel(sys.jacobian(*polished));
        if (std::abs(v(p)) < 1e-12) throw CurveTrackingFailure("zero curve is tangent to a wall");
        const Eigen::VectorXd tau = v(p) > 0 ? v : Eigen::VectorXd(-v);
        const int o = v.dot(tau) > 0 ? 1 : -1;  // orientation agrees with the direction of travel

        CurveTrace ct;
        ct.start = *polished;
        ct.start_wall = z.wall;
        ct.start_sign = -o;
        const auto end = trace(sys, *polished, tau);
        ct.end = end.x;
        ct.steps = end.steps;
        // orientation carried along the curve must agree with the one at the end
        const Eigen::VectorXd vend = oriented_kernel(sys.jacobian(end.x));
        if ((vend.dot(end.direction) > 0 ? 1 : -1) != o)
            throw CurveTrackingFailure("curve orientation flipped while tracking");
        ct.end_sign = o;
        rep.walls[z.wall - 1].endpoint_sum += ct.start_sign;
        if (ct.start_sign != wall_orientation(n, z.wall) * z.sign) signs_match = false;

        if (end.coord < s.corner && end.bound == 0.0) {
            ct.end_wall = end.coord + 1;
            auto match = std::find_if(zeros.begin(), zeros.end(), [&](const WallZero& w) {
                return w.wall == ct.end_wall && dist(w.x, end.x) < 1e-6;
            });
            if (match == zeros.end()) throw CurveTrackingFailure("zero curve ends at a wall point that is not a wall zero");
            if (match->visited) throw CurveTrackingFailure("two zero curves end at the same wall zero");
            match->visited = true;
            rep.walls[ct.end_wall - 1].endpoint_sum += ct.end_sign;
            if (ct.end_sign != wall_orientation(n, ct.end_wall) * match->sign) signs_match = false;
        } else {
            rep.outer_sum += ct.end_sign;
        }
        rep.curves.push_back(std::move(ct));
    }

    long long total = rep.outer_sum;
    bool walls_ok = true;
    for (auto& w : rep.walls) {
        w.consistent = w.endpoint_sum == w.expected_sum;
        walls_ok = walls_ok && w.consistent;
        total += w.endpoint_sum;
    }
    // curves that start and end on the outer faces are not traced; they add zero
    rep.consistent = walls_ok && signs_match && total == 0;
    return rep;
}

}  // namespace novflow
