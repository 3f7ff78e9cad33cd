#pragma once

// Desk-scale model of sections over corner charts [0,1]^l x [-1,1]^m:
// exact polynomial maps, equivariant averaging, the canonical extension of
// compatible boundary data, and numerical transversality, signed zero
// counts and curve tracing for the zero sets.
//
// Variables are numbered 0..n-1: the l corner coordinates first, then the m
// free coordinates. A stratum T of the corner is a subset of [l]; on U(T)
// the corner coordinates outside T vanish.

#include "novflow/rational.hpp"
#include "novflow/strata.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace novflow {

using Exponent = std::vector<int>;

/// Polynomial with rational coefficients in a fixed number of variables.
class Poly {
public:
    Poly() = default;
    explicit Poly(int nvars) : nvars_(nvars) {}

    static Poly constant(int nvars, const Rational& c);
    static Poly variable(int nvars, int i);
    static Poly monomial(const Exponent& e, const Rational& c);

    int nvars() const { return nvars_; }
    const std::map<Exponent, Rational>& terms() const { return terms_; }
    /// Adds c * x^e; drops the term when the coefficient becomes zero.
    void add_term(const Exponent& e, const Rational& c);
    bool is_zero() const { return terms_.empty(); }
    /// Total degree; -1 for the zero polynomial.
    int degree() const;

    Rational evaluate(const std::vector<Rational>& x) const;
    double evaluate(const std::vector<double>& x) const;
    Poly derivative(int i) const;
    /// Substitutes x_i -> subs[i]; every substitute has the same nvars.
    Poly compose(const std::vector<Poly>& subs) const;
    /// Sets the variables with keep[i] == false to zero and drops them.
    Poly restrict_to(const std::vector<bool>& keep) const;
    /// Sets the variables with keep[i] == false to zero, keeping nvars.
    Poly project(const std::vector<bool>& keep) const;

    /// "x1^2*x2 - 1/2*x1 + 3", 1-based variable names; "0" for zero.
    std::string to_string() const;

    friend Poly operator+(const Poly& a, const Poly& b);
    friend Poly operator-(const Poly& a, const Poly& b);
    friend Poly operator*(const Poly& a, const Poly& b);
    friend Poly operator*(const Rational& c, const Poly& a);
    friend bool operator==(const Poly&, const Poly&) = default;

private:
    int nvars_ = 0;
    std::map<Exponent, Rational> terms_;
};

using PolyMap = std::vector<Poly>;
using RatMatrix = std::vector<std::vector<Rational>>;

/// All exponents with total degree <= d, graded then lexicographic.
std::vector<Exponent> monomials_up_to(int nvars, int d);

struct GroupElement {
    RatMatrix v;
    RatMatrix w;

    friend bool operator==(const GroupElement&, const GroupElement&) = default;
};

/// Finite group acting orthogonally on V = Q^nV and W = Q^nW.
class FiniteGroupRep {
public:
    FiniteGroupRep() = default;
    /// Closes the generators under multiplication. Throws InvariantViolation
    /// for non-orthogonal or mis-sized matrices and OutOfScope when the group
    /// has more than 8 elements.
    FiniteGroupRep(int nV, int nW, std::vector<GroupElement> generators);
    static FiniteGroupRep trivial(int nV, int nW);

    int nV() const { return nV_; }
    int nW() const { return nW_; }
    const std::vector<GroupElement>& generators() const { return generators_; }
    const std::vector<GroupElement>& elements() const { return elements_; }
    std::size_t order() const { return elements_.size(); }

    friend bool operator==(const FiniteGroupRep&, const FiniteGroupRep&) = default;

private:
    int nV_ = 0;
    int nW_ = 0;
    std::vector<GroupElement> generators_;
    std::vector<GroupElement> elements_;
};

/// g_W^{-1} o p o g_V.
PolyMap act(const GroupElement& g, const PolyMap& p);
/// (1/|G|) sum over g of g_W^{-1} o p o g_V.
PolyMap reynolds_project(const PolyMap& p, const FiniteGroupRep& rep);
/// Exact check on the generators.
bool is_equivariant(const PolyMap& p, const FiniteGroupRep& rep);

struct EquivariantPolySpace {
    int nV = 0;
    int nW = 0;
    int degree = 0;
    /// Reduced row echelon basis of the averaged monomial maps.
    std::vector<PolyMap> basis;
};

EquivariantPolySpace enumerate_equivariant_basis(int nV, int nW, int d, const FiniteGroupRep& rep);

struct SectionOnBox {
    int corner = 0;  // l
    int free = 0;    // m
    PolyMap map;     // components, each in corner + free variables

    int dimension() const { return corner + free; }
    int codim() const { return static_cast<int>(map.size()); }
    /// Throws OutOfScope beyond l <= 2, l + m <= 4, degree <= 4, and
    /// InvariantViolation when a component has the wrong variable count.
    void check() const;

    friend bool operator==(const SectionOnBox&, const SectionOnBox&) = default;
};

/// keep-mask of U(T): corner coordinates in T and all free coordinates.
std::vector<bool> stratum_mask(const StratumLabel& T, int free);

struct BoundaryData {
    int corner = 0;
    int free = 0;
    int codim = 0;
    /// s^T for proper subsets T of [l], as maps in all corner + free
    /// variables; only their values on U(T) matter.
    std::map<StratumLabel, PolyMap> faces;
    std::optional<FiniteGroupRep> group;

    /// The restrictions of a global section to every proper face.
    static BoundaryData from_section(const SectionOnBox& s);

    friend bool operator==(const BoundaryData&, const BoundaryData&) = default;
};

/// Throws IncompatibleBoundary when s^T and s^T' disagree on U(T n T'), a
/// face is missing, or the data is not equivariant.
void check_compatible(const BoundaryData& bd);

/// The canonical extension: faces in order of increasing |T|, each adding
/// (s^T - E|U(T)) o pi_T.
SectionOnBox extend_from_boundary(const BoundaryData& bd);

struct ZeroPoint {
    std::vector<double> x;   // coordinates in the stratum variables
    std::size_t rank = 0;    // numerical rank of the Jacobian
    double min_singular = 0;
    int sign = 0;            // sign of the Jacobian determinant when square
};

struct StratumReport {
    StratumLabel stratum;
    int dimension = 0;
    int codim = 0;
    /// Zeros for codim >= dimension, singular zeros otherwise.
    std::vector<ZeroPoint> points;
    bool transverse = true;
};

struct TransversalityReport {
    std::vector<StratumReport> strata;
    bool transverse = true;
};

/// Throws BudgetExceeded when subdivision cannot isolate the zeros.
TransversalityReport check_strong_transversality(const SectionOnBox& s, double tol = 1e-8);

/// Zeros of s on the open stratum T with their Jacobian signs. Requires
/// dim U(T) == codim (InvariantViolation), throws NotTransverse on a
/// degenerate zero.
std::vector<ZeroPoint> signed_zeros(const SectionOnBox& s, const StratumLabel& T, double tol = 1e-8);
long long count_signed_zeros(const SectionOnBox& s, const StratumLabel& T, double tol = 1e-8);

struct CurveTrace {
    std::vector<double> start, end;
    /// Wall index j (1-based) of the corner coordinate that vanishes, or 0
    /// for the outer faces of the box.
    int start_wall = 0, end_wall = 0;
    /// Boundary-orientation signs of the endpoints.
    int start_sign = 0, end_sign = 0;
    std::size_t steps = 0;
};

struct WallReport {
    StratumLabel wall;
    long long count = 0;         // count_signed_zeros on the wall
    long long endpoint_sum = 0;  // sum of traced endpoint signs on the wall
    long long expected_sum = 0;  // eps_j * count
    bool consistent = false;
};

struct BoundaryReport {
    std::vector<CurveTrace> curves;
    std::vector<WallReport> walls;
    /// Signed endpoints on the outer faces; with the wall sums they add up
    /// to zero.
    long long outer_sum = 0;
    bool consistent = false;
};

/// eps_j = -(-1)^(n + j): an endpoint on wall j has boundary sign
/// eps_j * sign det of the wall Jacobian, when the zero curve is oriented
/// so that det [J ; v] > 0.
int wall_orientation(int n, int j);

/// Requires codim == dimension - 1 on the top stratum and transversality
/// on every stratum (NotTransverse). Throws CurveTrackingFailure when a
/// curve cannot be followed to the boundary or ends at an unknown wall zero.
BoundaryReport boundary_consistency(const SectionOnBox& s, double tol = 1e-8);

}  // namespace novflow
