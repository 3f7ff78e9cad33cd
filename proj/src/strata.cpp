#include "novflow/strata.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <sstream>

namespace novflow {

namespace {

void check_k(int k) {
    if (k < 0 || k > StratumLabel::kMaxK)
        throw InvariantViolation("k = " + std::to_string(k) + " outside [0, " +
                                 std::to_string(StratumLabel::kMaxK) + "]");
}

std::uint64_t full_mask(int k) { return k >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << k) - 1; }

// Submasks of `mask` in increasing order.
std::vector<std::uint64_t> submasks(std::uint64_t mask) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t s = mask;; s = (s - 1) & mask) {
        out.push_back(s);
        if (s == 0) break;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

}  // namespace

StratumLabel StratumLabel::of(int k, const std::vector<int>& elements) {
    check_k(k);
    StratumLabel s{k, 0};
    for (int i : elements) {
        if (i < 1 || i > k)
            throw InvariantViolation("label element " + std::to_string(i) + " outside [1, " + std::to_string(k) +
                                     "]");
        s.bits |= std::uint64_t{1} << (i - 1);
    }
    return s;
}

StratumLabel StratumLabel::full(int k) {
    check_k(k);
    return {k, full_mask(k)};
}

int StratumLabel::size() const { return std::popcount(bits); }

std::vector<int> StratumLabel::elements() const {
    std::vector<int> out;
    for (int i = 1; i <= k; ++i)
        if (contains(i)) out.push_back(i);
    return out;
}

std::vector<int> StratumLabel::complement() const {
    std::vector<int> out;
    for (int i = 1; i <= k; ++i)
        if (!contains(i)) out.push_back(i);
    return out;
}

std::string StratumLabel::to_string() const {
    std::string out = "{";
    for (int i : elements()) out += (out.size() > 1 ? "," : "") + std::to_string(i);
    return out + "}";
}

LengthSeq h_of_S(const StratumLabel& label) {
    LengthSeq h;
    int prev = 0;
    for (int s : label.complement()) {
        h.push_back(s - prev);
        prev = s;
    }
    h.push_back(label.k + 1 - prev);
    return h;
}

StratumLabel S_of_h(const LengthSeq& h) {
    if (h.empty()) throw InvariantViolation("empty length sequence");
    int total = 0;
    for (int x : h) {
        if (x <= 0) throw InvariantViolation("length sequence entries must be positive");
        total += x;
    }
    const int k = total - 1;
    StratumLabel s = StratumLabel::full(k);
    int pos = 0;
    for (std::size_t j = 0; j + 1 < h.size(); ++j) {
        pos += h[j];
        s.bits &= ~(std::uint64_t{1} << (pos - 1));
    }
    return s;
}

std::vector<std::pair<int, int>> partition_blocks(const StratumLabel& label) {
    std::vector<std::pair<int, int>> out;
    int first = 1;
    for (int len : h_of_S(label)) {
        out.emplace_back(first, first + len - 1);
        first += len;
    }
    return out;
}

bool refines(const std::vector<std::pair<int, int>>& finer, const std::vector<std::pair<int, int>>& coarser) {
    return std::all_of(finer.begin(), finer.end(), [&](const auto& b) {
        return std::any_of(coarser.begin(), coarser.end(),
                           [&](const auto& c) { return c.first <= b.first && b.second <= c.second; });
    });
}

LabelPart compose_labels(const std::vector<LabelPart>& parts) {
    if (parts.empty()) throw InvariantViolation("compose_labels needs at least one part");
    int d = 0;
    for (const auto& p : parts) {
        if (p.d < 1 || p.label.k != p.d - 1)
            throw InvariantViolation("part label over [" + std::to_string(p.label.k) + "] does not match d = " +
                                     std::to_string(p.d));
        d += p.d;
    }
    check_k(d - 1);
    LabelPart out{d, StratumLabel::empty(d - 1)};
    int offset = 0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        out.label.bits |= parts[i].label.bits << offset;
        offset += parts[i].d;
        if (i + 1 < parts.size()) out.label.bits |= std::uint64_t{1} << (offset - 1);
    }
    return out;
}

StratumLabel restriction_poset_map(const StratumLabel& S, const StratumLabel& T) {
    if (S.k != T.k || !S.subset_of(T))
        throw InvariantViolation("restriction map needs " + S.to_string() + " <= " + T.to_string());
    const auto comp = S.complement();
    StratumLabel out = StratumLabel::empty(static_cast<int>(comp.size()));
    for (std::size_t j = 0; j < comp.size(); ++j)
        if (T.contains(comp[j])) out.bits |= std::uint64_t{1} << j;
    return out;
}

std::map<StratumLabel, StratumLabel> restriction_poset_iso(const StratumLabel& S) {
    if (S.k - S.size() > 20) throw InvariantViolation("restriction poset too large");
    std::map<StratumLabel, StratumLabel> out;
    const std::uint64_t free = full_mask(S.k) & ~S.bits;
    for (std::uint64_t extra : submasks(free)) {
        const StratumLabel T{S.k, S.bits | extra};
        out.emplace(T, restriction_poset_map(S, T));
    }
    return out;
}

// ---------------------------------------------------------------------------

CombStratSpace::CombStratSpace(int k, std::vector<StratCell> cells, std::vector<StratFace> faces)
    : k_(k), cells_(std::move(cells)), faces_(std::move(faces)) {
    check_k(k);
    bool has_top = false;
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        const auto& c = cells_[i];
        if (!index_.emplace(c.id, i).second) throw InvariantViolation("duplicate cell id '" + c.id + "'");
        if (c.dim < 0) throw InvariantViolation("cell '" + c.id + "' has negative dimension");
        if (c.label.k != k || (c.label.bits & ~full_mask(k)) != 0)
            throw InvariantViolation("cell '" + c.id + "' label " + c.label.to_string() + " is not over [" +
                                     std::to_string(k) + "]");
        has_top = has_top || c.label.bits == full_mask(k);
    }
    if (!has_top) throw InvariantViolation("no cell in the top stratum " + StratumLabel::full(k).to_string());
    for (const auto& f : faces_) {
        auto ci = index_.find(f.cell), fi = index_.find(f.face);
        if (ci == index_.end() || fi == index_.end())
            throw InvariantViolation("face relation " + f.cell + " > " + f.face + " names an unknown cell");
        const auto& c = cells_[ci->second];
        const auto& fc = cells_[fi->second];
        if (!fc.label.subset_of(c.label))
            throw InvariantViolation("face '" + fc.id + "' label " + fc.label.to_string() +
                                     " is not contained in label " + c.label.to_string() + " of '" + c.id + "'");
        if (fc.dim >= c.dim)
            throw InvariantViolation("face '" + fc.id + "' does not have smaller dimension than '" + c.id + "'");
    }
}

std::size_t CombStratSpace::index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw InvariantViolation("unknown cell '" + id + "'");
    return it->second;
}

std::size_t CombStratSpace::stratum_count(const StratumLabel& S) const {
    return std::count_if(cells_.begin(), cells_.end(), [&](const auto& c) { return c.label == S; });
}

std::size_t CombStratSpace::closed_stratum_count(const StratumLabel& S) const {
    return std::count_if(cells_.begin(), cells_.end(), [&](const auto& c) { return c.label.subset_of(S); });
}

bool CombStratSpace::boundary_squares_to_zero() const {
    std::vector<std::vector<std::pair<std::size_t, long long>>> down(cells_.size());
    for (const auto& f : faces_) down[index_.at(f.cell)].emplace_back(index_.at(f.face), f.incidence);
    for (std::size_t c = 0; c < cells_.size(); ++c) {
        std::map<std::size_t, long long> acc;
        for (const auto& [f, a] : down[c])
            for (const auto& [g, b] : down[f]) acc[g] += a * b;
        for (const auto& [g, v] : acc)
            if (v != 0) return false;
    }
    return true;
}

long long euler_char(const CombStratSpace& x) {
    long long chi = 0;
    for (const auto& c : x.cells()) chi += c.dim % 2 ? -1 : 1;
    return chi;
}

CombStratSpace strat_point() { return CombStratSpace(0, {{"p", 0, StratumLabel::empty(0)}}, {}); }

CombStratSpace strat_interval() {
    const auto top = StratumLabel::full(1), corner = StratumLabel::empty(1);
    return CombStratSpace(1, {{"e", 1, top}, {"v0", 0, corner}, {"v1", 0, corner}},
                          {{"e", "v1", 1}, {"e", "v0", -1}});
}

CombStratSpace strat_square() {
    // [0,1]^2; direction 1 is x, direction 2 is y. The edges y=0, y=1 have x
    // free (label {1}); x=0, x=1 have y free (label {2}).
    const auto top = StratumLabel::full(2), c = StratumLabel::empty(2);
    const auto l1 = StratumLabel::of(2, {1}), l2 = StratumLabel::of(2, {2});
    std::vector<StratCell> cells = {{"f", 2, top},  {"b", 1, l1},   {"t", 1, l1},   {"l", 1, l2},
                                    {"r", 1, l2},   {"v00", 0, c},  {"v10", 0, c},  {"v01", 0, c},
                                    {"v11", 0, c}};
    std::vector<StratFace> faces = {
        {"f", "b", 1},     {"f", "r", 1},      {"f", "t", -1},     {"f", "l", -1},
        {"b", "v10", 1},   {"b", "v00", -1},   {"t", "v11", 1},    {"t", "v01", -1},
        {"l", "v01", 1},   {"l", "v00", -1},   {"r", "v11", 1},    {"r", "v10", -1},
    };
    return CombStratSpace(2, std::move(cells), std::move(faces));
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> DoubledSpace::fixed_cells(std::uint64_t g) const {
    std::vector<std::size_t> out;
    const auto& perm = action.at(g);
    for (std::size_t i = 0; i < perm.size(); ++i)
        if (perm[i] == i) out.push_back(i);
    return out;
}

namespace {

std::string copy_tag(std::uint64_t g, int k) {
    std::string s;
    for (int j = 0; j < k; ++j) s += (g >> j & 1) ? '1' : '0';
    return s;
}

}  // namespace

DoubledSpace double_space(const CombStratSpace& x) {
    const int k = x.k();
    if (k > 20) throw InvariantViolation("doubling supports k <= 20");
    DoubledSpace out;
    out.k = k;
    std::vector<StratCell> cells;
    std::map<std::pair<std::size_t, std::uint64_t>, std::size_t> where;
    for (std::size_t i = 0; i < x.cells().size(); ++i) {
        const auto& c = x.cells()[i];
        for (std::uint64_t g : submasks(c.label.bits)) {
            where[{i, g}] = cells.size();
            cells.push_back({c.id + "#" + copy_tag(g, k), c.dim, StratumLabel::empty(0)});
            out.base.push_back(c.id);
            out.copy.push_back(g);
        }
    }
    std::vector<StratFace> faces;
    for (const auto& f : x.faces()) {
        const std::size_t ci = x.index_of(f.cell), fi = x.index_of(f.face);
        const std::uint64_t face_bits = x.cells()[fi].label.bits;
        for (std::uint64_t g : submasks(x.cells()[ci].label.bits))
            faces.push_back({cells[where.at({ci, g})].id, cells[where.at({fi, g & face_bits})].id, f.incidence});
    }
    out.action.assign(std::size_t{1} << k, std::vector<std::size_t>(cells.size()));
    for (std::uint64_t h = 0; h < out.action.size(); ++h) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const std::size_t base = x.index_of(out.base[i]);
            out.action[h][i] = where.at({base, (out.copy[i] ^ h) & x.cells()[base].label.bits});
        }
    }
    out.space = CombStratSpace(0, std::move(cells), std::move(faces));
    return out;
}

namespace {

// phi over the complement of S, one char per complement coordinate:
// '0' = at0, 'F' = free.
std::string collar_id(const std::string& c, const StratumLabel& S, const std::string& phi) {
    return c + "|" + S.to_string() + "|" + phi;
}

}  // namespace

CombStratSpace collar(const CombStratSpace& x) {
    const int k = x.k();
    if (k > 16) throw InvariantViolation("collaring supports k <= 16");
    std::vector<StratCell> cells;
    std::vector<StratFace> faces;
    std::vector<std::vector<std::pair<std::size_t, int>>> down(x.cells().size());
    for (const auto& f : x.faces()) down[x.index_of(f.cell)].emplace_back(x.index_of(f.face), f.incidence);

    for (std::uint64_t s = 0; s <= full_mask(k); ++s) {
        const StratumLabel S{k, s};
        const auto comp = S.complement();
        const std::size_t m = comp.size();
        for (std::size_t ci = 0; ci < x.cells().size(); ++ci) {
            const auto& c = x.cells()[ci];
            if (!c.label.subset_of(S)) continue;
            for (std::uint64_t freebits = 0; freebits < (std::uint64_t{1} << m); ++freebits) {
                std::string phi(m, '0');
                StratumLabel label = S;
                int nfree = 0;
                for (std::size_t j = 0; j < m; ++j) {
                    if (freebits >> j & 1) {
                        phi[j] = 'F';
                        label.bits |= std::uint64_t{1} << (comp[j] - 1);
                        ++nfree;
                    }
                }
                const std::string id = collar_id(c.id, S, phi);
                cells.push_back({id, c.dim + nfree, label});
                // faces of c times the cube face
                for (const auto& [fi, inc] : down[ci])
                    faces.push_back({id, collar_id(x.cells()[fi].id, S, phi), inc});
                // cube faces: free coordinate -> at0, or -> at1 glued into S u {j}
                int position = 0;
                for (std::size_t j = 0; j < m; ++j) {
                    if (phi[j] != 'F') continue;
                    const int sign = (c.dim + position) % 2 ? -1 : 1;
                    ++position;
                    std::string at0 = phi;
                    at0[j] = '0';
                    faces.push_back({id, collar_id(c.id, S, at0), -sign});
                    std::string at1 = phi;
                    at1.erase(j, 1);
                    StratumLabel bigger = S;
                    bigger.bits |= std::uint64_t{1} << (comp[j] - 1);
                    faces.push_back({id, collar_id(c.id, bigger, at1), sign});
                }
            }
        }
    }
    return CombStratSpace(k, std::move(cells), std::move(faces));
}

CombStratSpace product(const CombStratSpace& x, const CombStratSpace& y) {
    const int k = x.k() + y.k();
    check_k(k);
    auto id = [](const std::string& a, const std::string& b) { return a + "*" + b; };
    std::vector<StratCell> cells;
    for (const auto& a : x.cells())
        for (const auto& b : y.cells())
            cells.push_back({id(a.id, b.id), a.dim + b.dim, {k, a.label.bits | b.label.bits << x.k()}});
    std::vector<StratFace> faces;
    for (const auto& f : x.faces())
        for (const auto& b : y.cells()) faces.push_back({id(f.cell, b.id), id(f.face, b.id), f.incidence});
    for (const auto& a : x.cells()) {
        const int sign = a.dim % 2 ? -1 : 1;
        for (const auto& f : y.faces()) faces.push_back({id(a.id, f.cell), id(a.id, f.face), sign * f.incidence});
    }
    return CombStratSpace(k, std::move(cells), std::move(faces));
}

}  // namespace novflow
