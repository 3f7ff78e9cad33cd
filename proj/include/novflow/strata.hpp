#pragma once

// Combinatorics of <k>-stratifications. A stratum is labelled by a subset
// S of [k] = {1..k}: the directions that are free there. S = [k] is the open
// top stratum, S = {} the deepest corner.

#include "novflow/errors.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace novflow {

struct StratumLabel {
    int k = 0;
    std::uint64_t bits = 0;  // bit i-1 set <=> i in S

    static constexpr int kMaxK = 63;

    /// Throws InvariantViolation when some element is outside [k].
    static StratumLabel of(int k, const std::vector<int>& elements);
    static StratumLabel full(int k);
    static StratumLabel empty(int k) { return {k, 0}; }

    bool contains(int i) const { return i >= 1 && i <= k && (bits >> (i - 1) & 1); }
    int size() const;
    std::vector<int> elements() const;
    /// [k] \ S in increasing order.
    std::vector<int> complement() const;
    bool subset_of(const StratumLabel& other) const { return (bits & ~other.bits) == 0; }
    std::string to_string() const;  // "{1,3}"

    friend bool operator==(const StratumLabel&, const StratumLabel&) = default;
    friend auto operator<=>(const StratumLabel&, const StratumLabel&) = default;
};

using LengthSeq = std::vector<int>;

LengthSeq h_of_S(const StratumLabel& label);
/// Throws InvariantViolation on an empty sequence or a nonpositive entry.
StratumLabel S_of_h(const LengthSeq& h);

/// Blocks of the partition of [k+1] into consecutive runs of lengths h(S),
/// as inclusive (first, last) pairs.
std::vector<std::pair<int, int>> partition_blocks(const StratumLabel& label);
/// Every block of `finer` lies inside a block of `coarser`.
bool refines(const std::vector<std::pair<int, int>>& finer, const std::vector<std::pair<int, int>>& coarser);

struct LabelPart {
    int d = 1;           // the part lives over [d-1]
    StratumLabel label;  // label.k == d - 1
};

/// S1 u {d1} u (S2 + d1) u {d1 + d2} u ... over [d - 1], d = sum of d_i.
LabelPart compose_labels(const std::vector<LabelPart>& parts);

/// r_S: {T >= S} -> 2^[k - |S|], r_S(T) = {j : s'_j in T} where s'_j are the
/// complement elements of S in increasing order.
StratumLabel restriction_poset_map(const StratumLabel& S, const StratumLabel& T);
/// The whole map, keyed by T in increasing bit order.
std::map<StratumLabel, StratumLabel> restriction_poset_iso(const StratumLabel& S);

struct StratCell {
    std::string id;
    int dim = 0;
    StratumLabel label;

    friend bool operator==(const StratCell&, const StratCell&) = default;
};

struct StratFace {
    std::string cell;
    std::string face;
    int incidence = 0;

    friend bool operator==(const StratFace&, const StratFace&) = default;
};

/// Finite cell complex whose cells carry stratum labels.
class CombStratSpace {
public:
    CombStratSpace() = default;
    /// Validates: ids unique, labels over [k], faces reference known cells
    /// with label(face) <= label(cell) and dim(face) < dim(cell), and some
    /// cell lies in the top stratum. Throws InvariantViolation.
    CombStratSpace(int k, std::vector<StratCell> cells, std::vector<StratFace> faces);

    int k() const { return k_; }
    const std::vector<StratCell>& cells() const { return cells_; }
    const std::vector<StratFace>& faces() const { return faces_; }
    std::size_t index_of(const std::string& id) const;
    const StratCell& cell(const std::string& id) const { return cells_[index_of(id)]; }

    /// Number of cells with label exactly S.
    std::size_t stratum_count(const StratumLabel& S) const;
    /// Number of cells with label contained in S.
    std::size_t closed_stratum_count(const StratumLabel& S) const;
    /// The incidences define a chain complex: d o d = 0.
    bool boundary_squares_to_zero() const;

    friend bool operator==(const CombStratSpace&, const CombStratSpace&) = default;

private:
    int k_ = 0;
    std::vector<StratCell> cells_;
    std::vector<StratFace> faces_;
    std::map<std::string, std::size_t> index_;
};

long long euler_char(const CombStratSpace& x);

/// Built-in examples: point (k=0), interval (k=1), square (k=2).
CombStratSpace strat_point();
CombStratSpace strat_interval();
CombStratSpace strat_square();

struct DoubledSpace {
    CombStratSpace space;            // k = 0
    int k = 0;                       // rank of the acting group (Z/2)^k
    std::vector<std::string> base;   // base cell id of each output cell
    std::vector<std::uint64_t> copy; // coset representative g & S(c)
    /// action[g][i] = index of g . (cell i)
    std::vector<std::vector<std::size_t>> action;

    /// Indices of cells fixed by the group element g.
    std::vector<std::size_t> fixed_cells(std::uint64_t g) const;
};

/// Cells are (c, g & S(c)), 2^|S(c)| copies of c. Throws InvariantViolation
/// when k > 20.
DoubledSpace double_space(const CombStratSpace& x);

/// Cells are (c, S, phi) with label(c) <= S and phi : [k] \ S -> {at0, free},
/// the canonical representatives after gluing at1 faces into larger S. The
/// output label is S u free(phi).
CombStratSpace collar(const CombStratSpace& x);

/// Ids "a*b", labels S_X u (S_Y + k_X).
CombStratSpace product(const CombStratSpace& x, const CombStratSpace& y);

}  // namespace novflow
