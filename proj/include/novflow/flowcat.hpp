#pragma once

// Flow categories reduced to the data the differential needs: graded,
// energy-decorated orbit representatives, and per-orbit morphism records
// carrying label-set sizes and signed rigid counts.
//
// A record (source x, target y, g) describes the morphism space from g.x to
// y. Its label set has size r = mu(g) + mu(x) - mu(y) - 1, and when r == 0
// its count contributes count * T^E(g) to the coefficient of x in d(y).

#include "novflow/novikov.hpp"

#include <optional>
#include <string>
#include <vector>

namespace novflow {

struct LabelComposition {
    int target_size = 0;
    /// Images (1-based) of [r1] followed by [r2].
    std::vector<int> injection;
    int missing = 0;
};

/// [r1] u ([r2] + r1 + 1) inside [r1 + r2 + 1]; the breaking label r1 + 1 is
/// the one left out.
LabelComposition compose_label_sets(int r1, int r2);

struct FlowObject {
    std::string id;
    long long mu = 0;
    Rational energy = 0;

    friend bool operator==(const FlowObject&, const FlowObject&) = default;
};

enum class LabelKind { sized, bullet, unit };

struct MorphismRecord {
    std::string source;
    std::string target;
    std::vector<long long> g;  // element of the Novikov group, empty for rank 0
    LabelKind kind = LabelKind::sized;
    int r = 0;                  // label-set size when kind == sized
    std::optional<Integer> count;

    friend bool operator==(const MorphismRecord&, const MorphismRecord&) = default;
};

struct FlowFlags {
    bool proper = true;
    bool e_proper = true;
    bool e_positive = false;
    bool gapped = false;

    friend bool operator==(const FlowFlags&, const FlowFlags&) = default;
};

struct FlowCategoryDesc {
    NovikovGroupDesc group;
    std::vector<FlowObject> objects;
    std::vector<MorphismRecord> morphisms;
    FlowFlags flags;

    std::optional<std::size_t> index_of(const std::string& id) const;
    /// E(g) + E(source) - E(target).
    Rational energy_of(const MorphismRecord& m) const;
    /// mu(g) + mu(source) - mu(target) - 1.
    long long expected_label_size(const MorphismRecord& m) const;

    friend bool operator==(const FlowCategoryDesc&, const FlowCategoryDesc&) = default;
};

struct Violation {
    std::string code;
    std::string message;
    std::vector<std::string> witness;

    friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool valid() const { return violations.empty(); }
};

/// Identity records, label sizes against gradings, duplicate or
/// conflicting records (equivariance), unknown objects, group ranks,
/// periodicity of the grading, closure under composition, declared flags.
ValidationReport validate_category(const FlowCategoryDesc& f);

/// Throws InvalidCategory when validation fails, MissingCount when an r = 0
/// record has no count and DSquaredNonzero (with the witness pair) when the
/// assembled differential does not square to zero.
NovikovComplex assemble_complex(const FlowCategoryDesc& f, const ExtRational& truncation);
/// The assembled differential without the d^2 check.
NovikovComplex assemble_unchecked(const FlowCategoryDesc& f, const ExtRational& truncation);

struct D2Witness {
    std::string x;  // coefficient of x ...
    std::string y;  // ... in d(d(y))
    NovikovElement value;
};

struct D2Report {
    bool ok = true;
    std::vector<D2Witness> witnesses;
};

D2Report check_d_squared(const FlowCategoryDesc& f, const ExtRational& truncation = ExtRational::infinity());

struct ConeDecomposition {
    std::vector<std::string> c1, c2;  // generator ids in block order
    NovikovMatrix d1;                 // on C1
    NovikovMatrix d2;                 // restriction of d to C2
    NovikovMatrix f;                  // C2 -> C1 component
    /// f o d_{C2[1]} == d1 o f with d_{C2[1]} = -d2.
    bool chain_map = false;
    /// The cone differential (a, b) -> (-d_{C2[1]} a, f a + d1 b) equals the
    /// assembled differential entry by entry.
    bool reassembles = false;
};

/// Throws SplitInvalid when the split is not a partition of the objects or
/// a record goes from a C2 object to a C1 object.
ConeDecomposition cone_decompose(const FlowCategoryDesc& f, const std::vector<std::string>& c1,
                                 const std::vector<std::string>& c2, const ExtRational& truncation);

struct SquareDecomposition {
    std::vector<std::string> classes[4];  // generator ids of C1..C4
    NovikovMatrix d[4];                   // differential of each class
    // f_ab: component of d from C_b to C_a along the square edges
    NovikovMatrix f12, f13, f24, f34;
    NovikovMatrix h14;                    // component of d from C4 to C1
    /// f12 f24 + f13 f34 = d1 H + H d4 solved by nov_linear_solve.
    NovikovMatrix homotopy;
    /// -h14, which satisfies the identity because d^2 = 0.
    NovikovMatrix extracted;
    bool solved_verified = false;
    bool extracted_verified = false;
};

/// Morphisms may only go from C1 to C2, C3 or C4, from C2 or C3 to C4, or
/// within a class. Throws SplitInvalid, DSquaredNonzero, and
/// NoHomotopyAtTruncation when the linear system has no solution.
SquareDecomposition square_decompose(const FlowCategoryDesc& f, const std::vector<std::string> classes[4],
                                     const ExtRational& truncation);

/// Rebases x -> T^{-E(x)} x: entry (x, y) is multiplied by T^{E(x) - E(y)}.
/// Throws NegativeValuationEntry naming the entry when the result leaves
/// the valuation ring.
NovikovComplex descend_to_lambda0(const NovikovComplex& c, const std::vector<Rational>& energy);

/// Basis change p -> p + sign * weight * q (same degree, p != q, weight of
/// nonnegative valuation).
NovikovComplex bifurcation_move_c(const NovikovComplex& c, std::size_t p, std::size_t q, int sign,
                                  const NovikovElement& weight);
/// Basis change p -> (1 + u) p with val(u) > 0; throws ValuationNotPositive.
NovikovComplex bifurcation_move_d(const NovikovComplex& c, std::size_t p, const NovikovElement& u);

struct ArnoldReport {
    std::size_t generators = 0;
    std::size_t min_rank = 0;
    std::size_t lemma_count = 0;
    bool bound_holds = false;
    GradedCohomology cohomology;
};

ArnoldReport arnold_check(const FlowCategoryDesc& f, const ExtRational& truncation);

}  // namespace novflow
