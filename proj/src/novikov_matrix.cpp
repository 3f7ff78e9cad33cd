#include "novflow/novikov.hpp"

#include <bit>
#include <algorithm>
#include <numeric>
#include <sstream>
#include <tuple>

namespace novflow {

NovikovMatrix::NovikovMatrix(std::size_t rows, std::size_t cols, ExtRational truncation)
    : rows_(rows), cols_(cols), truncation_(truncation),
      entries_(rows * cols, NovikovElement(truncation)) {}

NovikovMatrix::NovikovMatrix(std::size_t rows, std::size_t cols, std::vector<NovikovElement> entries,
                             ExtRational truncation)
    : rows_(rows), cols_(cols), truncation_(std::move(truncation)), entries_(std::move(entries)) {
    if (entries_.size() != rows * cols)
        throw DimensionMismatch("matrix expects " + std::to_string(rows * cols) + " entries, got " +
                                std::to_string(entries_.size()));
    for (const auto& e : entries_) truncation_ = min(truncation_, e.truncation());
    for (auto& e : entries_) e = e.truncated(truncation_);
}

NovikovMatrix NovikovMatrix::identity(std::size_t n, ExtRational truncation) {
    std::vector<NovikovElement> e(n * n, NovikovElement(truncation));
    for (std::size_t i = 0; i < n; ++i) e[i * n + i] = NovikovElement::constant(1, truncation);
    return NovikovMatrix(n, n, std::move(e), truncation);
}

NovikovMatrix NovikovMatrix::from_integers(const std::vector<std::vector<long long>>& rows,
                                           ExtRational truncation) {
    const std::size_t r = rows.size();
    const std::size_t c = r ? rows.front().size() : 0;
    std::vector<NovikovElement> e;
    e.reserve(r * c);
    for (const auto& row : rows) {
        if (row.size() != c) throw DimensionMismatch("ragged integer matrix");
        for (long long v : row) e.push_back(NovikovElement::constant(v, truncation));
    }
    return NovikovMatrix(r, c, std::move(e), truncation);
}

NovikovMatrix NovikovMatrix::with_entry(std::size_t r, std::size_t c, NovikovElement value) const {
    auto e = entries_;
    e.at(r * cols_ + c) = std::move(value);
    return NovikovMatrix(rows_, cols_, std::move(e), truncation_);
}

NovikovMatrix NovikovMatrix::truncated(const ExtRational& t) const {
    return NovikovMatrix(rows_, cols_, entries_, min(t, truncation_));
}

NovikovMatrix NovikovMatrix::transpose() const {
    std::vector<NovikovElement> e;
    e.reserve(entries_.size());
    for (std::size_t c = 0; c < cols_; ++c)
        for (std::size_t r = 0; r < rows_; ++r) e.push_back((*this)(r, c));
    return NovikovMatrix(cols_, rows_, std::move(e), truncation_);
}

bool NovikovMatrix::is_zero() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const auto& e) { return e.is_zero(); });
}

bool NovikovMatrix::is_diagonal() const {
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            if (r != c && !(*this)(r, c).is_zero()) return false;
    return true;
}

bool NovikovMatrix::is_lambda0() const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [](const auto& e) { return e.is_zero() || !(e.valuation() < ExtRational(0)); });
}

std::string NovikovMatrix::to_string() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t r = 0; r < rows_; ++r) {
        os << (r ? ", [" : "[");
        for (std::size_t c = 0; c < cols_; ++c) {
            auto s = (*this)(r, c).to_string();
            // strip the per-entry truncation suffix; the matrix carries one
            if (auto p = s.find(" mod "); p != std::string::npos) s.resize(p);
            if (auto p = s.find(" exact"); p != std::string::npos) s.resize(p);
            os << (c ? ", " : "") << s;
        }
        os << "]";
    }
    os << "] " << (truncation_.is_finite() ? "mod T^(" + novflow::to_string(truncation_.value()) + ")"
                                            : std::string("exact"));
    return os.str();
}

NovikovMatrix operator*(const NovikovMatrix& a, const NovikovMatrix& b) {
    if (a.cols() != b.rows())
        throw DimensionMismatch("cannot multiply " + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + " by " + std::to_string(b.rows()) + "x" +
                                std::to_string(b.cols()));
    const ExtRational t = min(a.truncation(), b.truncation());
    std::vector<NovikovElement> e;
    e.reserve(a.rows() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            NovikovElement acc(t);
            for (std::size_t k = 0; k < a.cols(); ++k) acc = acc + a(i, k) * b(k, j);
            e.push_back(std::move(acc));
        }
    }
    return NovikovMatrix(a.rows(), b.cols(), std::move(e), t);
}

namespace {

NovikovMatrix elementwise(const NovikovMatrix& a, const NovikovMatrix& b, bool subtract) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("shape mismatch");
    std::vector<NovikovElement> e;
    e.reserve(a.entries().size());
    for (std::size_t i = 0; i < a.entries().size(); ++i)
        e.push_back(subtract ? a.entries()[i] - b.entries()[i] : a.entries()[i] + b.entries()[i]);
    return NovikovMatrix(a.rows(), a.cols(), std::move(e), min(a.truncation(), b.truncation()));
}

}  // namespace

NovikovMatrix operator+(const NovikovMatrix& a, const NovikovMatrix& b) { return elementwise(a, b, false); }
NovikovMatrix operator-(const NovikovMatrix& a, const NovikovMatrix& b) { return elementwise(a, b, true); }

bool equal_mod(const NovikovMatrix& a, const NovikovMatrix& b, const ExtRational& t) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (std::size_t i = 0; i < a.entries().size(); ++i)
        if (!equal_mod(a.entries()[i], b.entries()[i], t)) return false;
    return true;
}

NovikovElement nov_det(const NovikovMatrix& m) {
    if (m.rows() != m.cols()) throw DimensionMismatch("determinant of a non-square matrix");
    const std::size_t n = m.rows();
    if (n == 0) return NovikovElement::constant(1, m.truncation());
    // Cofactor expansion over column subsets, memoized by bitmask: det of the
    // minor using the first popcount(mask) rows and the columns in mask.
    std::vector<std::optional<NovikovElement>> memo(std::size_t{1} << n);
    memo[0] = NovikovElement::constant(1, m.truncation());
    for (std::size_t mask = 1; mask < memo.size(); ++mask) {
        const std::size_t row = static_cast<std::size_t>(std::popcount(mask)) - 1;
        NovikovElement acc(m.truncation());
        int sign = 1;
        for (std::size_t c = n; c-- > 0;) {
            if (!(mask >> c & 1)) continue;
            const auto term = m(row, c) * *memo[mask & ~(std::size_t{1} << c)];
            acc = sign > 0 ? acc + term : acc - term;
            sign = -sign;
        }
        memo[mask] = std::move(acc);
    }
    return *memo.back();
}

// ---------------------------------------------------------------------------
// Diagonalization

std::vector<NovikovElement> Diagonalization::diagonal() const {
    std::vector<NovikovElement> out;
    for (std::size_t i = 0; i < std::min(D.rows(), D.cols()); ++i) out.push_back(D(i, i));
    return out;
}

std::vector<Integer> Diagonalization::invariant_factors() const {
    if (!integral) throw NonIntegralInvariantFactor("diagonal is not integral");
    std::vector<Integer> out;
    for (std::size_t i = 0; i < rank; ++i) out.push_back(*D(i, i).as_integer());
    return out;
}

namespace {

using Grid = std::vector<std::vector<NovikovElement>>;

constexpr std::size_t kMaxReductionRounds = 1000;

Grid to_grid(const NovikovMatrix& m) {
    Grid g(m.rows(), std::vector<NovikovElement>(m.cols()));
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) g[r][c] = m(r, c);
    return g;
}

NovikovMatrix from_grid(const Grid& g, std::size_t rows, std::size_t cols) {
    std::vector<NovikovElement> e;
    e.reserve(rows * cols);
    for (const auto& row : g)
        for (const auto& x : row) e.push_back(x);
    return NovikovMatrix(rows, cols, std::move(e));
}

// Exact representative of a residue class: the stored terms, no truncation.
NovikovElement representative(const NovikovElement& x) { return NovikovElement::from_terms(x.terms()); }

// Work state: W = U * M * V at the tracked precision of W. U and V are
// products of elementary operations with exact (polynomial) multipliers.
class Diagonalizer {
public:
    explicit Diagonalizer(const NovikovMatrix& m)
        : n_(m.rows()), m_(m.cols()), w_(to_grid(m)),
          u_(to_grid(NovikovMatrix::identity(n_))), v_(to_grid(NovikovMatrix::identity(m_))) {}

    Diagonalization run() {
        std::size_t t = 0;
        for (; t < std::min(n_, m_); ++t) {
            auto pivot = choose_pivot(t);
            if (!pivot) break;
            swap_rows(t, pivot->first);
            swap_cols(t, pivot->second);
            clear_cross(t);
        }
        const std::size_t rank = t;
        bool integral = true;
        for (std::size_t i = 0; i < rank; ++i) integral = normalize_pivot(i) && integral;
        if (integral) chain(rank);

        Diagonalization out;
        out.U = from_grid(u_, n_, n_);
        out.D = from_grid(w_, n_, m_);
        out.V = from_grid(v_, m_, m_);
        out.rank = rank;
        out.integral = integral;
        out.truncation = out.D.truncation();
        if (out.truncation.is_finite() && !(ExtRational(0) < out.truncation))
            throw TruncationTooCoarse("diagonalization exhausted the precision budget (truncation " +
                                      to_string(out.truncation) + ")");
        return out;
    }

private:
    // (|leading coefficient|, valuation, row, col), lexicographic.
    std::optional<std::pair<std::size_t, std::size_t>> choose_pivot(std::size_t t) const {
        std::optional<std::tuple<Integer, Rational, std::size_t, std::size_t>> best;
        for (std::size_t i = t; i < n_; ++i) {
            for (std::size_t j = t; j < m_; ++j) {
                const auto& e = w_[i][j];
                if (e.is_zero()) continue;
                auto key = std::make_tuple(Integer(abs(e.leading_coefficient())), e.valuation().value(), i, j);
                if (!best || key < *best) best = std::move(key);
            }
        }
        if (!best) return std::nullopt;
        return std::make_pair(std::get<2>(*best), std::get<3>(*best));
    }

    static bool smaller_key(const NovikovElement& a, const NovikovElement& b) {
        const Integer ca = abs(a.leading_coefficient()), cb = abs(b.leading_coefficient());
        if (ca != cb) return ca < cb;
        return a.valuation() < b.valuation();
    }

    // Reduces entry `e` against pivot `p`: returns the multiplier q such that
    // e + q*p has a smaller leading term (zero when p is a unit).
    static NovikovElement reducer(const NovikovElement& e, const NovikovElement& p) {
        if (p.is_unit()) {
            auto q = nov_divide(e, p);
            if (!q) throw std::logic_error("division by a unit failed");
            return representative(-*q);
        }
        const Integer& a = e.leading_coefficient();
        const Integer& c = p.leading_coefficient();
        Integer quotient = a / c;  // truncates toward zero, |remainder| < |c|
        return NovikovElement::monomial(-quotient, e.valuation().value() - p.valuation().value());
    }

    void clear_cross(std::size_t t) {
        std::size_t rounds = 0;
        bool dirty = true;
        while (dirty) {
            if (++rounds > kMaxReductionRounds)
                throw TruncationTooCoarse("elimination does not terminate at this precision; "
                                          "supply a finite truncation");
            dirty = false;
            for (std::size_t i = t + 1; i < n_; ++i) {
                while (!w_[i][t].is_zero() && ++rounds <= kMaxReductionRounds) {
                    if (smaller_key(w_[i][t], w_[t][t])) {
                        swap_rows(i, t);
                        dirty = true;
                        continue;
                    }
                    row_add(i, t, reducer(w_[i][t], w_[t][t]));
                    dirty = true;
                }
            }
            for (std::size_t j = t + 1; j < m_; ++j) {
                while (!w_[t][j].is_zero() && ++rounds <= kMaxReductionRounds) {
                    if (smaller_key(w_[t][j], w_[t][t])) {
                        swap_cols(j, t);
                        dirty = true;
                        continue;
                    }
                    col_add(j, t, reducer(w_[t][j], w_[t][t]));
                    dirty = true;
                }
            }
            if (dirty) {
                // re-check the column after column operations moved things
                bool clean = true;
                for (std::size_t i = t + 1; i < n_ && clean; ++i) clean = w_[i][t].is_zero();
                for (std::size_t j = t + 1; j < m_ && clean; ++j) clean = w_[t][j].is_zero();
                dirty = !clean;
            }
        }
    }

    // Scales row i so that the pivot becomes |c| * T^0 when the pivot is an
    // integer times a unit. Otherwise normalizes only sign and valuation.
    bool normalize_pivot(std::size_t i) {
        const NovikovElement& p = w_[i][i];
        const Integer c = abs(p.leading_coefficient());
        bool divisible = true;
        for (const auto& term : p.terms()) divisible = divisible && term.coeff % c == 0;
        NovikovElement unit;
        if (divisible) {
            std::vector<NovikovTerm> terms;
            for (const auto& term : p.terms()) terms.push_back({term.coeff / c, term.exponent});
            unit = NovikovElement::from_terms(std::move(terms), p.truncation());
        } else {
            const Integer sign = p.leading_coefficient() < 0 ? Integer(-1) : Integer(1);
            unit = NovikovElement::monomial(sign, p.valuation().value());
        }
        row_scale(i, representative(nov_invert(unit)));
        if (w_[i][i].is_zero() || !(ExtRational(0) < w_[i][i].truncation()))
            throw TruncationTooCoarse("normalizing pivot " + std::to_string(i) +
                                      " exhausted the precision budget");
        return divisible;
    }

    // Integer diagonal to a divisibility chain via 2x2 gcd/lcm blocks.
    void chain(std::size_t rank) {
        for (std::size_t i = 0; i < rank; ++i) {
            for (std::size_t j = i + 1; j < rank; ++j) {
                const Integer a = *w_[i][i].as_integer();
                const Integer b = *w_[j][j].as_integer();
                if (b % a == 0) continue;
                Integer x, y;
                const Integer g = ext_gcd(a, b, x, y);
                // [[x, y], [-b/g, a/g]] diag(a, b) [[1, -y b/g], [1, x a/g]] = diag(g, ab/g)
                rows_combine(i, j, x, y, -b / g, a / g);
                cols_combine(i, j, Integer(1), Integer(1), Integer(-y * b / g), Integer(x * a / g));
            }
        }
    }

    static Integer ext_gcd(const Integer& a, const Integer& b, Integer& x, Integer& y) {
        Integer old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
        while (r != 0) {
            Integer q = old_r / r;
            Integer tmp = old_r - q * r;
            old_r = r;
            r = tmp;
            tmp = old_s - q * s;
            old_s = s;
            s = tmp;
            tmp = old_t - q * t;
            old_t = t;
            t = tmp;
        }
        if (old_r < 0) {
            old_r = -old_r;
            old_s = -old_s;
            old_t = -old_t;
        }
        x = old_s;
        y = old_t;
        return old_r;
    }

    void row_add(std::size_t i, std::size_t j, const NovikovElement& q) {
        for (std::size_t c = 0; c < m_; ++c) w_[i][c] = w_[i][c] + q * w_[j][c];
        for (std::size_t c = 0; c < n_; ++c) u_[i][c] = u_[i][c] + q * u_[j][c];
    }
    void col_add(std::size_t i, std::size_t j, const NovikovElement& q) {
        for (std::size_t r = 0; r < n_; ++r) w_[r][i] = w_[r][i] + w_[r][j] * q;
        for (std::size_t r = 0; r < m_; ++r) v_[r][i] = v_[r][i] + v_[r][j] * q;
    }
    void row_scale(std::size_t i, const NovikovElement& s) {
        for (std::size_t c = 0; c < m_; ++c) w_[i][c] = s * w_[i][c];
        for (std::size_t c = 0; c < n_; ++c) u_[i][c] = s * u_[i][c];
    }
    void swap_rows(std::size_t i, std::size_t j) {
        if (i == j) return;
        std::swap(w_[i], w_[j]);
        std::swap(u_[i], u_[j]);
    }
    void swap_cols(std::size_t i, std::size_t j) {
        if (i == j) return;
        for (auto& row : w_) std::swap(row[i], row[j]);
        for (auto& row : v_) std::swap(row[i], row[j]);
    }
    void rows_combine(std::size_t i, std::size_t j, const Integer& a, const Integer& b, const Integer& c,
                      const Integer& d) {
        auto combine = [&](Grid& g, std::size_t width) {
            for (std::size_t k = 0; k < width; ++k) {
                auto ri = g[i][k].scaled(a) + g[j][k].scaled(b);
                auto rj = g[i][k].scaled(c) + g[j][k].scaled(d);
                g[i][k] = std::move(ri);
                g[j][k] = std::move(rj);
            }
        };
        combine(w_, m_);
        combine(u_, n_);
    }
    // new col_i = a col_i + b col_j, new col_j = c col_i + d col_j
    void cols_combine(std::size_t i, std::size_t j, const Integer& a, const Integer& b, const Integer& c,
                      const Integer& d) {
        auto combine = [&](Grid& g) {
            for (auto& row : g) {
                auto ci = row[i].scaled(a) + row[j].scaled(b);
                auto cj = row[i].scaled(c) + row[j].scaled(d);
                row[i] = std::move(ci);
                row[j] = std::move(cj);
            }
        };
        combine(w_);
        combine(v_);
    }

    std::size_t n_, m_;
    Grid w_, u_, v_;
};

}  // namespace

Diagonalization diagonalize(const NovikovMatrix& m) { return Diagonalizer(m).run(); }

Diagonalization nov_diagonalize(const NovikovMatrix& m) {
    auto d = diagonalize(m);
    if (!d.integral) {
        std::string diag;
        for (const auto& e : d.diagonal()) diag += (diag.empty() ? "" : ", ") + e.to_string();
        throw NonIntegralInvariantFactor("invariant factors are not integers times units: " + diag);
    }
    return d;
}

std::optional<std::vector<NovikovElement>> nov_linear_solve(const NovikovMatrix& a,
                                                            const std::vector<NovikovElement>& b) {
    if (b.size() != a.rows()) throw DimensionMismatch("right-hand side length mismatch");
    const auto d = diagonalize(a);
    // D y = U b, x = V y
    std::vector<NovikovElement> ub(a.rows(), NovikovElement(a.truncation()));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.rows(); ++k) ub[i] = ub[i] + d.U(i, k) * b[k];
    std::vector<NovikovElement> y(a.cols(), NovikovElement(d.truncation));
    for (std::size_t i = 0; i < a.rows(); ++i) {
        if (i < d.rank) {
            auto q = nov_divide(ub[i], d.D(i, i));
            if (!q) return std::nullopt;
            y[i] = *q;
        } else if (!ub[i].is_zero()) {
            return std::nullopt;
        }
    }
    std::vector<NovikovElement> x(a.cols(), NovikovElement(d.truncation));
    for (std::size_t i = 0; i < a.cols(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) x[i] = x[i] + d.V(i, k) * y[k];
    return x;
}

}  // namespace novflow
