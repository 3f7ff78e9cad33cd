#pragma once

// Exact arithmetic in the universal Novikov ring with integer coefficients,
// truncated at a rational power of T, plus the matrix algorithms built on it:
// diagonalization, cohomology of free cochain complexes and the minimal-rank
// bound for free complexes with prescribed cohomology.
//
// Truncation model: an element with truncation tau is a residue class known
// modulo T^tau (terms with exponent >= tau are unknown and never stored).
// Products track precision honestly: a*b is known modulo
//   T^min(tau_a, tau_b, tau_a + v(b), tau_b + v(a)),
// which is min(tau_a, tau_b) whenever both valuations are nonnegative.

#include "novflow/errors.hpp"
#include "novflow/rational.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace novflow {

struct NovikovTerm {
    Integer coeff;
    Rational exponent;

    friend bool operator==(const NovikovTerm&, const NovikovTerm&) = default;
};

class NovikovElement {
public:
    /// The exact zero.
    NovikovElement() = default;
    /// Zero modulo T^truncation.
    explicit NovikovElement(ExtRational truncation) : truncation_(std::move(truncation)) {}

    /// Sorts, collects like terms, drops zero coefficients and exponents at
    /// or above the truncation.
    static NovikovElement from_terms(std::vector<NovikovTerm> terms,
                                     ExtRational truncation = ExtRational::infinity());
    static NovikovElement monomial(const Integer& coeff, const Rational& exponent,
                                   ExtRational truncation = ExtRational::infinity());
    static NovikovElement constant(const Integer& coeff,
                                   ExtRational truncation = ExtRational::infinity());

    const std::vector<NovikovTerm>& terms() const { return terms_; }
    const ExtRational& truncation() const { return truncation_; }

    /// True when no term below the truncation is known to be nonzero.
    bool is_zero() const { return terms_.empty(); }
    bool is_exact() const { return truncation_.is_infinite(); }

    /// Smallest exponent; +inf for zero.
    ExtRational valuation() const;
    /// Lower bound on the valuation of every representative: the valuation,
    /// or the truncation for a zero residue.
    ExtRational valuation_bound() const;
    /// Coefficient of the smallest exponent. Requires !is_zero().
    const Integer& leading_coefficient() const;
    /// Leading coefficient is +1 or -1.
    bool is_unit() const;
    /// Zero or a single term with exponent 0.
    bool is_integer() const;
    std::optional<Integer> as_integer() const;

    NovikovElement truncated(const ExtRational& truncation) const;
    /// Multiplication by the exact monomial T^shift.
    NovikovElement shifted(const Rational& shift) const;
    NovikovElement scaled(const Integer& factor) const;
    NovikovElement operator-() const;

    /// Text form `c1*T^(p1/q1) + ... mod T^(p/q)`, or `... exact`.
    std::string to_string() const;

    friend bool operator==(const NovikovElement&, const NovikovElement&) = default;

private:
    std::vector<NovikovTerm> terms_;
    ExtRational truncation_ = ExtRational::infinity();
};

NovikovElement nov_add(const NovikovElement& a, const NovikovElement& b);
NovikovElement nov_sub(const NovikovElement& a, const NovikovElement& b);
NovikovElement nov_mul(const NovikovElement& a, const NovikovElement& b);
ExtRational nov_valuation(const NovikovElement& a);
/// Throws NotAUnit unless the leading coefficient is +-1, and
/// TruncationTooCoarse when the inverse of an exact element is an infinite
/// series.
NovikovElement nov_invert(const NovikovElement& a);
/// q with q*b = a at the truncation, by long division on leading terms;
/// nullopt when some leading coefficient is not divisible.
std::optional<NovikovElement> nov_divide(const NovikovElement& a, const NovikovElement& b);

/// Compare both sides modulo T^min(t, tau_a, tau_b).
bool equal_mod(const NovikovElement& a, const NovikovElement& b, const ExtRational& t);

/// Parses the text form produced by NovikovElement::to_string. Accepts
/// terms like `3`, `-T`, `2*T^(1/2)`, `T^2`, separated by + or -, and an
/// optional trailing `mod T^(p/q)` or `exact`.
NovikovElement parse_novikov(std::string_view text);

inline NovikovElement operator+(const NovikovElement& a, const NovikovElement& b) { return nov_add(a, b); }
inline NovikovElement operator-(const NovikovElement& a, const NovikovElement& b) { return nov_sub(a, b); }
inline NovikovElement operator*(const NovikovElement& a, const NovikovElement& b) { return nov_mul(a, b); }

/// Dense matrix of Novikov elements sharing one truncation.
class NovikovMatrix {
public:
    NovikovMatrix() = default;
    NovikovMatrix(std::size_t rows, std::size_t cols,
                  ExtRational truncation = ExtRational::infinity());
    /// Entries row-major. The matrix truncation is the minimum of `truncation`
    /// and the entries' truncations; every entry is truncated to it.
    NovikovMatrix(std::size_t rows, std::size_t cols, std::vector<NovikovElement> entries,
                  ExtRational truncation = ExtRational::infinity());

    static NovikovMatrix identity(std::size_t n, ExtRational truncation = ExtRational::infinity());
    static NovikovMatrix from_integers(const std::vector<std::vector<long long>>& rows,
                                       ExtRational truncation = ExtRational::infinity());

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const ExtRational& truncation() const { return truncation_; }
    const NovikovElement& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
    const std::vector<NovikovElement>& entries() const { return entries_; }

    /// Returns a copy with entry (r, c) replaced; truncation re-normalized.
    NovikovMatrix with_entry(std::size_t r, std::size_t c, NovikovElement value) const;
    NovikovMatrix truncated(const ExtRational& t) const;
    NovikovMatrix transpose() const;
    bool is_zero() const;
    bool is_diagonal() const;
    /// Every entry has valuation >= 0.
    bool is_lambda0() const;

    std::string to_string() const;

    friend bool operator==(const NovikovMatrix&, const NovikovMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    ExtRational truncation_ = ExtRational::infinity();
    std::vector<NovikovElement> entries_;
};

NovikovMatrix operator*(const NovikovMatrix& a, const NovikovMatrix& b);
NovikovMatrix operator+(const NovikovMatrix& a, const NovikovMatrix& b);
NovikovMatrix operator-(const NovikovMatrix& a, const NovikovMatrix& b);
bool equal_mod(const NovikovMatrix& a, const NovikovMatrix& b, const ExtRational& t);
/// Determinant by cofactor expansion (small matrices only).
NovikovElement nov_det(const NovikovMatrix& m);

/// U * M * V = D with U, V invertible and D diagonal.
struct Diagonalization {
    NovikovMatrix U;
    NovikovMatrix D;
    NovikovMatrix V;
    std::size_t rank = 0;
    /// Every nonzero diagonal entry is a positive integer, and they form a
    /// divisibility chain.
    bool integral = false;
    /// Truncation of D; U and V are exact.
    ExtRational truncation;

    std::vector<NovikovElement> diagonal() const;
    /// Diagonal entries as integers; requires `integral`.
    std::vector<Integer> invariant_factors() const;
};

/// Diagonalizes by elementary row/column operations and unit scalings.
/// Non-integral invariant factors are left on the diagonal normalized to
/// valuation 0 and positive leading coefficient, with `integral == false`.
/// Throws TruncationTooCoarse when precision runs out.
Diagonalization diagonalize(const NovikovMatrix& m);

/// As `diagonalize`, but throws NonIntegralInvariantFactor when the result
/// is not an integer diagonal.
Diagonalization nov_diagonalize(const NovikovMatrix& m);

/// x with A x = b at the truncation, or nullopt when inconsistent.
std::optional<std::vector<NovikovElement>> nov_linear_solve(const NovikovMatrix& a,
                                                            const std::vector<NovikovElement>& b);

struct NovikovGroupDesc {
    std::size_t rank = 0;
    std::vector<Rational> energy;     // E on generators
    std::vector<long long> grading;   // mu on generators
    long long N = 0;                  // gcd of |mu|, 0 when mu == 0

    /// Builds the descriptor and computes N.
    static NovikovGroupDesc make(std::vector<Rational> energy, std::vector<long long> grading);
    static NovikovGroupDesc trivial() { return {}; }

    Rational energy_of(const std::vector<long long>& g) const;
    long long grading_of(const std::vector<long long>& g) const;
    /// 2N, or 0 for Z-grading.
    long long modulus() const { return 2 * N; }
    /// Empty string when consistent, otherwise a description of the problem.
    std::string check() const;

    friend bool operator==(const NovikovGroupDesc&, const NovikovGroupDesc&) = default;
};

/// Reduces a degree into [0, modulus) when modulus > 0.
long long normalize_degree(long long degree, long long modulus);

struct DegreeCohomology {
    std::size_t free_rank = 0;
    std::vector<Integer> torsion;  // each >= 2, divisibility chain

    friend bool operator==(const DegreeCohomology&, const DegreeCohomology&) = default;
};

struct GradedCohomology {
    long long modulus = 0;  // 2N, or 0 for Z-grading
    std::map<long long, DegreeCohomology> degrees;

    /// Drops degrees with neither free part nor torsion.
    GradedCohomology compact() const;
    std::string to_string() const;

    friend bool operator==(const GradedCohomology& a, const GradedCohomology& b);
};

struct ComplexGenerator {
    std::string id;
    long long degree = 0;

    friend bool operator==(const ComplexGenerator&, const ComplexGenerator&) = default;
};

/// Cochain complex of free modules over the truncated Novikov ring, graded
/// by Z (group N == 0) or Z/2N. `differential(i, j)` is the coefficient of
/// generator i in d(generator j); it may be nonzero only when
/// degree(i) == degree(j) + 1.
class NovikovComplex {
public:
    NovikovComplex() = default;
    /// Throws DegreeMismatch when a nonzero entry violates the grading.
    NovikovComplex(NovikovGroupDesc group, std::vector<ComplexGenerator> generators,
                   NovikovMatrix differential, bool lambda0 = false);

    const NovikovGroupDesc& group() const { return group_; }
    const std::vector<ComplexGenerator>& generators() const { return generators_; }
    const NovikovMatrix& full_differential() const { return differential_; }
    const ExtRational& truncation() const { return differential_.truncation(); }
    bool lambda0() const { return lambda0_; }
    long long modulus() const { return group_.modulus(); }
    std::size_t size() const { return generators_.size(); }

    std::optional<std::size_t> index_of(std::string_view id) const;
    /// Degrees present, normalized; for Z-grading every degree between the
    /// smallest and largest generator degree.
    std::vector<long long> degrees() const;
    /// Generator indices of the given degree, in generator order.
    std::vector<std::size_t> generators_in_degree(long long degree) const;
    /// The block d: C^k -> C^{k+1}.
    NovikovMatrix differential(long long k) const;
    /// d o d at the truncation; entries with witnesses are nonzero.
    NovikovMatrix d_squared() const;
    bool is_complex() const;

    NovikovComplex with_differential(NovikovMatrix d, bool lambda0) const;

    friend bool operator==(const NovikovComplex&, const NovikovComplex&) = default;

private:
    NovikovGroupDesc group_;
    std::vector<ComplexGenerator> generators_;
    NovikovMatrix differential_;
    bool lambda0_ = false;
};

/// Throws NotAComplex when d^2 != 0 and NonIntegralInvariantFactor when a
/// differential has a non-integral invariant factor.
GradedCohomology nov_homology(const NovikovComplex& complex);

struct MinRankReport {
    /// Sum over degrees of k_f + t_k + t_{k-1}.
    std::size_t per_degree_bound = 0;
    /// Sum over degrees of k_f + k_t.
    std::size_t lemma_count = 0;
    /// Free complex with one generator per free summand and a generator pair
    /// per torsion summand.
    NovikovComplex realizing;
    bool verified = false;
};

/// N is the grading parameter (0 for Z-grading; H.modulus must equal 2N).
MinRankReport min_rank_report(const GradedCohomology& h, long long N);
std::size_t min_rank(const GradedCohomology& h, long long N);

}  // namespace novflow
