#include "novflow/morse.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace novflow {

SimplicialComplex::SimplicialComplex(int vertex_count, std::vector<Simplex> maximal)
    : vertex_count_(vertex_count) {
    std::vector<std::set<Simplex>> by_dim;
    for (auto& s : maximal) {
        std::sort(s.begin(), s.end());
        if (s.empty()) throw InvariantViolation("empty simplex");
        if (std::adjacent_find(s.begin(), s.end()) != s.end()) throw InvariantViolation("repeated vertex in simplex");
        if (s.front() < 0 || s.back() >= vertex_count) throw InvariantViolation("vertex out of range");
        if (by_dim.size() < s.size()) by_dim.resize(s.size());
        const unsigned n = static_cast<unsigned>(s.size());
        for (unsigned mask = 1; mask < (1u << n); ++mask) {
            Simplex face;
            for (unsigned i = 0; i < n; ++i)
                if (mask >> i & 1) face.push_back(s[i]);
            by_dim[face.size() - 1].insert(face);
        }
    }
    std::sort(maximal.begin(), maximal.end());
    if (std::adjacent_find(maximal.begin(), maximal.end()) != maximal.end())
        throw InvariantViolation("maximal simplices repeated");
    maximal_ = std::move(maximal);
    for (auto& s : by_dim) cells_.emplace_back(s.begin(), s.end());
}

const std::vector<Simplex>& SimplicialComplex::cells(int k) const {
    static const std::vector<Simplex> none;
    if (k < 0 || k >= static_cast<int>(cells_.size())) return none;
    return cells_[k];
}

std::size_t SimplicialComplex::index_of(const Simplex& s) const {
    const auto& c = cells(static_cast<int>(s.size()) - 1);
    auto it = std::lower_bound(c.begin(), c.end(), s);
    if (it == c.end() || *it != s) throw InvariantViolation("simplex not in complex: " + cell_id(s));
    return static_cast<std::size_t>(it - c.begin());
}

long long SimplicialComplex::euler_char() const {
    long long chi = 0;
    for (int k = 0; k <= dimension(); ++k) chi += (k % 2 ? -1 : 1) * static_cast<long long>(cells(k).size());
    return chi;
}

const std::vector<std::string>& simplicial_names() {
    static const std::vector<std::string> names = {"point", "interval", "circle", "sphere2", "torus", "rp2", "klein"};
    return names;
}

SimplicialComplex build_simplicial(std::string_view name) {
    if (name == "point") return SimplicialComplex(1, {{0}});
    if (name == "interval") return SimplicialComplex(2, {{0, 1}});
    if (name == "circle") return SimplicialComplex(3, {{0, 1}, {1, 2}, {0, 2}});
    if (name == "sphere2") return SimplicialComplex(4, {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}});
    if (name == "torus") {
        std::vector<Simplex> t;
        for (int i = 0; i < 7; ++i) {
            t.push_back({i, (i + 1) % 7, (i + 3) % 7});
            t.push_back({i, (i + 2) % 7, (i + 3) % 7});
        }
        return SimplicialComplex(7, std::move(t));
    }
    if (name == "rp2")
        return SimplicialComplex(6, {{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 4, 5}, {0, 1, 5},
                                     {1, 2, 4}, {2, 3, 5}, {1, 3, 4}, {2, 4, 5}, {1, 3, 5}});
    if (name == "klein")
        return SimplicialComplex(
            12, {{0, 1, 5},  {0, 1, 11}, {0, 3, 4},  {0, 3, 8},   {0, 4, 5},  {0, 8, 11}, {1, 2, 6},  {1, 2, 10},
                 {1, 5, 6},  {1, 10, 11}, {2, 3, 7}, {2, 3, 9},   {2, 6, 7},  {2, 9, 10}, {3, 4, 7},  {3, 8, 9},
                 {4, 5, 9},  {4, 7, 8},  {4, 8, 9},  {5, 6, 10},  {5, 9, 10}, {6, 7, 11}, {6, 10, 11}, {7, 8, 11}});
    throw InvariantViolation("unknown space: " + std::string(name));
}

std::vector<Integer> smith_invariants(IntMatrix m) {
    const std::size_t rows = m.size(), cols = rows ? m[0].size() : 0;
    std::vector<Integer> diag;
    for (std::size_t t = 0; t < std::min(rows, cols); ++t) {
        // pivot: smallest nonzero absolute value in the lower-right block
        auto find_pivot = [&](std::size_t& pr, std::size_t& pc) {
            bool found = false;
            for (std::size_t i = t; i < rows; ++i)
                for (std::size_t j = t; j < cols; ++j)
                    if (m[i][j] != 0 && (!found || abs(m[i][j]) < abs(m[pr][pc]))) {
                        pr = i;
                        pc = j;
                        found = true;
                    }
            return found;
        };
        std::size_t pr = t, pc = t;
        if (!find_pivot(pr, pc)) break;
        for (;;) {
            std::swap(m[t], m[pr]);
            for (auto& row : m) std::swap(row[t], row[pc]);
            bool clean = true;
            for (std::size_t i = t + 1; i < rows; ++i) {
                const Integer q = m[i][t] / m[t][t];
                if (q != 0)
                    for (std::size_t j = t; j < cols; ++j) m[i][j] -= q * m[t][j];
                clean = clean && m[i][t] == 0;
            }
            for (std::size_t j = t + 1; j < cols; ++j) {
                const Integer q = m[t][j] / m[t][t];
                if (q != 0)
                    for (std::size_t i = t; i < rows; ++i) m[i][j] -= q * m[i][t];
                clean = clean && m[t][j] == 0;
            }
            if (clean) {
                // the pivot must divide the rest of the block
                std::size_t bad = rows;
                for (std::size_t i = t + 1; i < rows && bad == rows; ++i)
                    for (std::size_t j = t + 1; j < cols; ++j)
                        if (m[i][j] % m[t][t] != 0) {
                            bad = i;
                            break;
                        }
                if (bad == rows) break;
                for (std::size_t j = t; j < cols; ++j) m[t][j] += m[bad][j];
            }
            pr = t;
            pc = t;
            find_pivot(pr, pc);
        }
        diag.push_back(abs(m[t][t]));
    }
    return diag;
}

IntMatrix boundary_matrix(const SimplicialComplex& x, int k) {
    const auto& lower = x.cells(k - 1);
    const auto& upper = x.cells(k);
    IntMatrix m(lower.size(), std::vector<Integer>(upper.size(), 0));
    if (k <= 0) return m;
    for (std::size_t j = 0; j < upper.size(); ++j)
        for (std::size_t i = 0; i < upper[j].size(); ++i) {
            Simplex face = upper[j];
            face.erase(face.begin() + static_cast<std::ptrdiff_t>(i));
            m[x.index_of(face)][j] = i % 2 ? -1 : 1;
        }
    return m;
}

namespace {

// H_k from cell counts and boundaries d_k : C_k -> C_{k-1}.
GradedCohomology homology_of(const std::vector<std::size_t>& n, const std::vector<IntMatrix>& d) {
    const std::size_t top = n.size();
    std::vector<std::vector<Integer>> inv(top + 1);
    for (std::size_t k = 1; k < top; ++k) inv[k] = smith_invariants(d[k]);
    GradedCohomology h;
    for (std::size_t k = 0; k < top; ++k) {
        DegreeCohomology dc;
        dc.free_rank = n[k] - inv[k].size() - inv[k + 1].size();
        for (const auto& f : inv[k + 1])
            if (f > 1) dc.torsion.push_back(f);
        h.degrees[static_cast<long long>(k)] = dc;
    }
    return h;
}

}  // namespace

GradedCohomology simplicial_homology(const SimplicialComplex& x) {
    std::vector<std::size_t> n;
    std::vector<IntMatrix> d;
    for (int k = 0; k <= x.dimension(); ++k) {
        n.push_back(x.cells(k).size());
        d.push_back(boundary_matrix(x, k));
    }
    return homology_of(n, d);
}

GradedCohomology cohomology_from_homology(const GradedCohomology& h) {
    GradedCohomology out;
    out.modulus = h.modulus;
    for (const auto& [k, dc] : h.degrees) {
        out.degrees[k].free_rank = dc.free_rank;
        if (!dc.torsion.empty()) out.degrees[k + 1].torsion = dc.torsion;
    }
    return out;
}

namespace {

struct Hasse {
    std::vector<std::size_t> offset;  // global index of the first k-cell
    std::size_t total = 0;
};

Hasse hasse_of(const SimplicialComplex& x) {
    Hasse h;
    for (int k = 0; k <= x.dimension(); ++k) {
        h.offset.push_back(h.total);
        h.total += x.cells(k).size();
    }
    return h;
}

std::vector<Simplex> facets(const Simplex& s) {
    std::vector<Simplex> out;
    if (s.size() < 2) return out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        Simplex f = s;
        f.erase(f.begin() + static_cast<std::ptrdiff_t>(i));
        out.push_back(std::move(f));
    }
    return out;
}

// partner[i]: global index of the matched cell, or npos
constexpr std::size_t npos = static_cast<std::size_t>(-1);

bool acyclic(const SimplicialComplex& x, const Hasse& h, const std::vector<std::size_t>& partner) {
    std::vector<std::vector<std::size_t>> adj(h.total);
    std::vector<std::size_t> indeg(h.total, 0);
    for (int k = 1; k <= x.dimension(); ++k)
        for (std::size_t j = 0; j < x.cells(k).size(); ++j) {
            const std::size_t tau = h.offset[k] + j;
            for (const auto& f : facets(x.cells(k)[j])) {
                const std::size_t sigma = h.offset[k - 1] + x.index_of(f);
                if (partner[sigma] == tau) adj[sigma].push_back(tau);
                else adj[tau].push_back(sigma);
            }
        }
    for (const auto& a : adj)
        for (std::size_t b : a) ++indeg[b];
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < h.total; ++i)
        if (indeg[i] == 0) stack.push_back(i);
    std::size_t seen = 0;
    while (!stack.empty()) {
        const std::size_t v = stack.back();
        stack.pop_back();
        ++seen;
        for (std::size_t b : adj[v])
            if (--indeg[b] == 0) stack.push_back(b);
    }
    return seen == h.total;
}

std::size_t global_index(const SimplicialComplex& x, const Hasse& h, const Simplex& s) {
    return h.offset[s.size() - 1] + x.index_of(s);
}

// Partner array of a matching, or nullopt when it is not a matching on the
// Hasse diagram.
std::optional<std::vector<std::size_t>> partners(const SimplicialComplex& x, const Hasse& h,
                                                 const DiscreteGradient& v) {
    std::vector<std::size_t> p(h.total, npos);
    for (const auto& [s, t] : v.matching) {
        if (t.size() != s.size() + 1 || !std::includes(t.begin(), t.end(), s.begin(), s.end())) return std::nullopt;
        std::size_t a, b;
        try {
            a = global_index(x, h, s);
            b = global_index(x, h, t);
        } catch (const InvariantViolation&) {
            return std::nullopt;
        }
        if (p[a] != npos || p[b] != npos) return std::nullopt;
        p[a] = b;
        p[b] = a;
    }
    return p;
}

}  // namespace

bool is_acyclic_matching(const SimplicialComplex& x, const DiscreteGradient& v) {
    const auto h = hasse_of(x);
    const auto p = partners(x, h, v);
    return p && acyclic(x, h, *p);
}

DiscreteGradient discrete_gradient(const SimplicialComplex& x, std::string_view strategy) {
    if (strategy != "greedy_lex") throw InvariantViolation("unknown matching strategy: " + std::string(strategy));
    const auto h = hasse_of(x);
    std::vector<std::size_t> partner(h.total, npos);
    // cofacets of every cell, in lexicographic order
    std::vector<std::vector<std::size_t>> cofacets(h.total);
    for (int k = 1; k <= x.dimension(); ++k)
        for (std::size_t j = 0; j < x.cells(k).size(); ++j)
            for (const auto& f : facets(x.cells(k)[j])) cofacets[global_index(x, h, f)].push_back(h.offset[k] + j);

    DiscreteGradient v;
    for (int k = 0; k < x.dimension(); ++k)
        for (std::size_t i = 0; i < x.cells(k).size(); ++i) {
            const std::size_t s = h.offset[k] + i;
            if (partner[s] != npos) continue;
            for (std::size_t t : cofacets[s]) {
                if (partner[t] != npos) continue;
                partner[s] = t;
                partner[t] = s;
                if (acyclic(x, h, partner)) {
                    v.matching.push_back({x.cells(k)[i], x.cells(k + 1)[t - h.offset[k + 1]]});
                    break;
                }
                partner[s] = partner[t] = npos;
            }
        }
    return v;
}

std::vector<Simplex> critical_cells(const SimplicialComplex& x, const DiscreteGradient& v) {
    std::set<Simplex> matched;
    for (const auto& [s, t] : v.matching) {
        matched.insert(s);
        matched.insert(t);
    }
    std::vector<Simplex> out;
    for (int k = 0; k <= x.dimension(); ++k)
        for (const auto& c : x.cells(k))
            if (!matched.count(c)) out.push_back(c);
    return out;
}

std::vector<Simplex> MorseComplexZ::critical_in(int k) const {
    std::vector<Simplex> out;
    for (const auto& c : critical)
        if (static_cast<int>(c.size()) - 1 == k) out.push_back(c);
    return out;
}

MorseComplexZ morse_complex(const SimplicialComplex& x, const DiscreteGradient& v) {
    const auto h = hasse_of(x);
    const auto p = partners(x, h, v);
    if (!p || !acyclic(x, h, *p)) throw InvariantViolation("not an acyclic matching");
    const auto& partner = *p;

    MorseComplexZ m;
    m.critical = critical_cells(x, v);
    const int dim = x.dimension();
    m.boundary.resize(dim + 1);
    m.reach.resize(dim + 1);

    // up(c): the k-cell matched with the (k-1)-cell c, or npos
    auto up = [&](int k, std::size_t c) -> std::size_t {
        const std::size_t q = partner[h.offset[k - 1] + c];
        if (q == npos || q < h.offset[k] || q >= h.offset[k] + x.cells(k).size()) return npos;
        return q - h.offset[k];
    };

    for (int k = 1; k <= dim; ++k) {
        const auto& lower = x.cells(k - 1);
        const auto d = boundary_matrix(x, k);
        const auto crit_hi = m.critical_in(k), crit_lo = m.critical_in(k - 1);
        m.boundary[k].assign(crit_lo.size(), std::vector<Integer>(crit_hi.size(), 0));
        m.reach[k].assign(crit_lo.size(), std::vector<bool>(crit_hi.size(), false));

        // gradient steps a -> a' when a' is a facet of up(a), a' != a; topological order
        const std::size_t n = lower.size();
        std::vector<std::vector<std::size_t>> next(n);
        std::vector<std::size_t> indeg(n, 0);
        for (std::size_t a = 0; a < n; ++a) {
            const std::size_t b = up(k, a);
            if (b == npos) continue;
            for (std::size_t r = 0; r < n; ++r)
                if (r != a && d[r][b] != 0) {
                    next[a].push_back(r);
                    ++indeg[r];
                }
        }
        std::vector<std::size_t> order, stack;
        for (std::size_t a = 0; a < n; ++a)
            if (indeg[a] == 0) stack.push_back(a);
        while (!stack.empty()) {
            const std::size_t a = stack.back();
            stack.pop_back();
            order.push_back(a);
            for (std::size_t r : next[a])
                if (--indeg[r] == 0) stack.push_back(r);
        }

        for (std::size_t j = 0; j < crit_hi.size(); ++j) {
            const std::size_t sigma = x.index_of(crit_hi[j]);
            std::vector<Integer> c(n);
            std::vector<bool> reached(n, false);
            for (std::size_t r = 0; r < n; ++r) {
                c[r] = d[r][sigma];
                reached[r] = d[r][sigma] != 0;
            }
            // flow: c -= (c_a / [b : a]) d(b) removes a in favour of the other facets of b
            for (std::size_t a : order) {
                const std::size_t b = up(k, a);
                if (b == npos) continue;
                if (c[a] != 0) {
                    const Integer lambda = c[a] * d[a][b];
                    for (std::size_t r = 0; r < n; ++r)
                        if (d[r][b] != 0) c[r] -= lambda * d[r][b];
                }
                if (reached[a])
                    for (std::size_t r : next[a]) reached[r] = true;
            }
            for (std::size_t i = 0; i < crit_lo.size(); ++i) {
                const std::size_t tau = x.index_of(crit_lo[i]);
                m.boundary[k][i][j] = c[tau];
                m.reach[k][i][j] = reached[tau];
            }
        }
    }
    return m;
}

GradedCohomology morse_homology(const MorseComplexZ& m) {
    std::vector<std::size_t> n;
    for (int k = 0; k <= m.dimension(); ++k) n.push_back(m.critical_in(k).size());
    return homology_of(n, m.boundary);
}

std::string cell_id(const Simplex& s) {
    std::string id = "c";
    for (std::size_t i = 0; i < s.size(); ++i) id += (i ? "_" : "") + std::to_string(s[i]);
    return id;
}

FlowCategoryDesc to_flow_category(const MorseComplexZ& m, const NovikovGroupDesc& group) {
    FlowCategoryDesc f;
    f.group = group;
    f.flags.e_positive = true;
    const int dim = m.dimension();
    std::vector<std::vector<Simplex>> crit(dim + 1);
    for (int k = 0; k <= dim; ++k) crit[k] = m.critical_in(k);
    for (int k = 0; k <= dim; ++k)
        for (const auto& c : crit[k]) f.objects.push_back({cell_id(c), k, Rational(k)});
    const std::vector<long long> zero(group.rank, 0);
    for (const auto& o : f.objects) f.morphisms.push_back({o.id, o.id, zero, LabelKind::unit, 0, std::nullopt});

    // joined[j][k](a, b): a chain of gradient paths from critical k-cell a down to critical (k-j)-cell b
    for (int k = 1; k <= dim; ++k) {
        std::vector<std::vector<bool>> joined(crit[k].size(), std::vector<bool>(crit[k - 1].size()));
        for (std::size_t a = 0; a < crit[k].size(); ++a)
            for (std::size_t b = 0; b < crit[k - 1].size(); ++b) {
                joined[a][b] = m.reach[k][b][a];
                if (joined[a][b])
                    f.morphisms.push_back({cell_id(crit[k][a]), cell_id(crit[k - 1][b]), zero, LabelKind::sized, 0,
                                           m.boundary[k][b][a]});
            }
        for (int j = 2; j <= k; ++j) {
            std::vector<std::vector<bool>> longer(crit[k].size(), std::vector<bool>(crit[k - j].size()));
            for (std::size_t a = 0; a < crit[k].size(); ++a)
                for (std::size_t mid = 0; mid < crit[k - j + 1].size(); ++mid) {
                    if (!joined[a][mid]) continue;
                    for (std::size_t b = 0; b < crit[k - j].size(); ++b)
                        if (m.reach[k - j + 1][b][mid]) longer[a][b] = true;
                }
            joined = std::move(longer);
            for (std::size_t a = 0; a < crit[k].size(); ++a)
                for (std::size_t b = 0; b < crit[k - j].size(); ++b)
                    if (joined[a][b])
                        f.morphisms.push_back({cell_id(crit[k][a]), cell_id(crit[k - j][b]), zero, LabelKind::sized,
                                               j - 1, std::nullopt});
        }
    }
    return f;
}

ArnoldDemoReport arnold_demo(std::string_view name) {
    const auto x = build_simplicial(name);
    const auto m = morse_complex(x, discrete_gradient(x));
    const auto rep = arnold_check(to_flow_category(m), ExtRational::infinity());
    ArnoldDemoReport out;
    out.name = std::string(name);
    out.critical = rep.generators;
    out.min_rank = rep.min_rank;
    out.bound_holds = rep.bound_holds;
    out.cohomology = rep.cohomology;
    out.oracle_agrees = rep.cohomology == cohomology_from_homology(simplicial_homology(x));
    return out;
}

}  // namespace novflow
