#pragma once

// Discrete Morse theory on small simplicial complexes: an integer Smith
// normal form homology oracle, greedy acyclic matchings, the Morse complex
// of critical cells and its flow category.

#include "novflow/flowcat.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace novflow {

using Simplex = std::vector<int>;  // sorted vertex list

class SimplicialComplex {
public:
    SimplicialComplex() = default;
    /// Maximal simplices are sorted; faces are generated. Throws
    /// InvariantViolation on a vertex outside [0, vertex_count) or a
    /// repeated vertex.
    SimplicialComplex(int vertex_count, std::vector<Simplex> maximal);

    int vertex_count() const { return vertex_count_; }
    const std::vector<Simplex>& maximal() const { return maximal_; }
    int dimension() const { return static_cast<int>(cells_.size()) - 1; }
    /// All k-simplices in lexicographic order.
    const std::vector<Simplex>& cells(int k) const;
    std::size_t index_of(const Simplex& s) const;
    long long euler_char() const;

private:
    int vertex_count_ = 0;
    std::vector<Simplex> maximal_;
    std::vector<std::vector<Simplex>> cells_;
};

/// point, interval, circle, sphere2, torus, rp2, klein.
SimplicialComplex build_simplicial(std::string_view name);
const std::vector<std::string>& simplicial_names();

using IntMatrix = std::vector<std::vector<Integer>>;

/// Nonzero diagonal of the Smith normal form, in divisibility order.
std::vector<Integer> smith_invariants(IntMatrix m);

/// Boundary of C_k -> C_{k-1}: rows are (k-1)-simplices, columns k-simplices,
/// entry (-1)^i for the face omitting the i-th vertex.
IntMatrix boundary_matrix(const SimplicialComplex& x, int k);

/// Homology convention: degrees[k] holds H_k.
GradedCohomology simplicial_homology(const SimplicialComplex& x);

/// H^k has free rank b_k and torsion of H_{k-1}.
GradedCohomology cohomology_from_homology(const GradedCohomology& h);

struct DiscreteGradient {
    /// (simplex, cofacet) pairs.
    std::vector<std::pair<Simplex, Simplex>> matching;
};

/// Every simplex is matched at most once, pairs are face/cofacet, and the
/// modified Hasse digraph has no directed cycle.
bool is_acyclic_matching(const SimplicialComplex& x, const DiscreteGradient& v);

/// Cells in (dimension, lexicographic) order are matched to their first free
/// cofacet that keeps the matching acyclic.
DiscreteGradient discrete_gradient(const SimplicialComplex& x, std::string_view strategy = "greedy_lex");

std::vector<Simplex> critical_cells(const SimplicialComplex& x, const DiscreteGradient& v);

struct MorseComplexZ {
    std::vector<Simplex> critical;  // sorted by (dimension, lex)
    /// boundary[k]: rows critical (k-1)-cells, columns critical k-cells,
    /// signed counts of gradient paths; boundary[0] is empty.
    std::vector<IntMatrix> boundary;
    /// reach[k](i, j): some gradient path joins them, whatever the signed count.
    std::vector<std::vector<std::vector<bool>>> reach;

    std::vector<Simplex> critical_in(int k) const;
    int dimension() const { return static_cast<int>(boundary.size()) - 1; }
};

/// Throws InvariantViolation when v is not an acyclic matching.
MorseComplexZ morse_complex(const SimplicialComplex& x, const DiscreteGradient& v);

GradedCohomology morse_homology(const MorseComplexZ& m);

std::string cell_id(const Simplex& s);

/// Objects are critical cells with mu = E = index; a morphism space from
/// sigma to tau exists when a chain of gradient paths joins them, and the
/// rigid ones carry the boundary counts.
FlowCategoryDesc to_flow_category(const MorseComplexZ& m, const NovikovGroupDesc& group = NovikovGroupDesc::trivial());

struct ArnoldDemoReport {
    std::string name;
    std::size_t critical = 0;
    std::size_t min_rank = 0;
    bool bound_holds = false;
    /// Morse cohomology agrees with the cohomology of the simplicial oracle.
    bool oracle_agrees = false;
    GradedCohomology cohomology;
};

ArnoldDemoReport arnold_demo(std::string_view name);

}  // namespace novflow
