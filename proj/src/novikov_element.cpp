#include "novflow/novikov.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace novflow {

namespace {

// Long division runs this many steps at most before giving up on an exact
// quotient that is an infinite series.
constexpr std::size_t kMaxDivisionSteps = 100000;

}  // namespace

NovikovElement NovikovElement::from_terms(std::vector<NovikovTerm> terms, ExtRational truncation) {
    std::sort(terms.begin(), terms.end(),
              [](const NovikovTerm& a, const NovikovTerm& b) { return a.exponent < b.exponent; });
    NovikovElement out(std::move(truncation));
    for (auto& t : terms) {
        if (t.coeff == 0) continue;
        if (!(ExtRational(t.exponent) < out.truncation_)) continue;
        if (!out.terms_.empty() && out.terms_.back().exponent == t.exponent) {
            out.terms_.back().coeff += t.coeff;
            if (out.terms_.back().coeff == 0) out.terms_.pop_back();
        } else {
            out.terms_.push_back(std::move(t));
        }
    }
    return out;
}

NovikovElement NovikovElement::monomial(const Integer& coeff, const Rational& exponent,
                                        ExtRational truncation) {
    return from_terms({NovikovTerm{coeff, exponent}}, std::move(truncation));
}

NovikovElement NovikovElement::constant(const Integer& coeff, ExtRational truncation) {
    return monomial(coeff, Rational(0), std::move(truncation));
}

ExtRational NovikovElement::valuation() const {
    if (terms_.empty()) return ExtRational::infinity();
    return terms_.front().exponent;
}

ExtRational NovikovElement::valuation_bound() const {
    if (terms_.empty()) return truncation_;
    return terms_.front().exponent;
}

const Integer& NovikovElement::leading_coefficient() const {
    if (terms_.empty()) throw std::logic_error("leading_coefficient of zero");
    return terms_.front().coeff;
}

bool NovikovElement::is_unit() const {
    return !terms_.empty() && abs(terms_.front().coeff) == 1;
}

bool NovikovElement::is_integer() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.front().exponent == 0);
}

std::optional<Integer> NovikovElement::as_integer() const {
    if (!is_integer()) return std::nullopt;
    if (terms_.empty()) return Integer(0);
    return terms_.front().coeff;
}

NovikovElement NovikovElement::truncated(const ExtRational& t) const {
    if (!(t < truncation_)) return *this;
    NovikovElement out(t);
    for (const auto& term : terms_)
        if (ExtRational(term.exponent) < t) out.terms_.push_back(term);
    return out;
}

NovikovElement NovikovElement::shifted(const Rational& shift) const {
    NovikovElement out(truncation_.is_finite() ? ExtRational(truncation_.value() + shift)
                                               : ExtRational::infinity());
    out.terms_.reserve(terms_.size());
    for (const auto& t : terms_) out.terms_.push_back({t.coeff, t.exponent + shift});
    return out;
}

NovikovElement NovikovElement::scaled(const Integer& factor) const {
    if (factor == 0) return NovikovElement(truncation_);
    NovikovElement out = *this;
    for (auto& t : out.terms_) t.coeff *= factor;
    return out;
}

NovikovElement NovikovElement::operator-() const { return scaled(Integer(-1)); }

std::string NovikovElement::to_string() const {
    std::ostringstream os;
    if (terms_.empty()) {
        os << "0";
    } else {
        bool first = true;
        for (const auto& t : terms_) {
            Integer c = t.coeff;
            if (first) {
                if (c < 0) {
                    os << "-";
                    c = -c;
                }
            } else {
                os << (c < 0 ? " - " : " + ");
                if (c < 0) c = -c;
            }
            first = false;
            if (t.exponent == 0) {
                os << c.str();
            } else {
                if (c != 1) os << c.str() << "*";
                os << "T^(" << novflow::to_string(t.exponent) << ")";
            }
        }
    }
    if (truncation_.is_finite())
        os << " mod T^(" << novflow::to_string(truncation_.value()) << ")";
    else
        os << " exact";
    return os.str();
}

NovikovElement nov_add(const NovikovElement& a, const NovikovElement& b) {
    std::vector<NovikovTerm> terms;
    terms.reserve(a.terms().size() + b.terms().size());
    terms.insert(terms.end(), a.terms().begin(), a.terms().end());
    terms.insert(terms.end(), b.terms().begin(), b.terms().end());
    return NovikovElement::from_terms(std::move(terms), min(a.truncation(), b.truncation()));
}

NovikovElement nov_sub(const NovikovElement& a, const NovikovElement& b) { return nov_add(a, -b); }

NovikovElement nov_mul(const NovikovElement& a, const NovikovElement& b) {
    ExtRational t = min(a.truncation(), b.truncation());
    t = min(t, a.truncation() + b.valuation_bound());
    t = min(t, b.truncation() + a.valuation_bound());
    std::map<Rational, Integer> acc;
    for (const auto& x : a.terms()) {
        for (const auto& y : b.terms()) {
            Rational e = x.exponent + y.exponent;
            if (!(ExtRational(e) < t)) continue;
            acc[e] += x.coeff * y.coeff;
        }
    }
    std::vector<NovikovTerm> terms;
    terms.reserve(acc.size());
    for (auto& [e, c] : acc) terms.push_back({std::move(c), e});
    return NovikovElement::from_terms(std::move(terms), t);
}

ExtRational nov_valuation(const NovikovElement& a) { return a.valuation(); }

std::optional<NovikovElement> nov_divide(const NovikovElement& a, const NovikovElement& b) {
    if (b.is_zero()) {
        if (a.is_zero() && a.is_exact()) return NovikovElement();
        return std::nullopt;
    }
    const Rational v = b.valuation().value();
    const Integer& c = b.leading_coefficient();
    // Precision of the quotient: errors in a contribute at T^(tau_a - v), errors
    // in b at T^(v(a) + tau_b - 2v).
    ExtRational tq = min(a.truncation() - v, a.valuation_bound() + b.truncation() - Rational(2 * v));

    // For exact operands q*b = a forces max(q) = max(a) - max(b); a quotient
    // term beyond that means the quotient is an infinite series.
    std::optional<Rational> q_max;
    if (a.is_exact() && b.is_exact() && !a.is_zero())
        q_max = a.terms().back().exponent - b.terms().back().exponent;

    std::vector<NovikovTerm> q;
    NovikovElement r = a;
    std::size_t steps = 0;
    while (!r.is_zero()) {
        const Rational w = r.valuation().value();
        if (!(ExtRational(w - v) < tq)) break;
        const Integer& lead = r.leading_coefficient();
        if (lead % c != 0) return std::nullopt;
        if (q_max && w - v > *q_max)
            throw TruncationTooCoarse("quotient " + a.to_string() + " / " + b.to_string() +
                                      " is an infinite series; supply a finite truncation");
        NovikovTerm term{lead / c, w - v};
        r = nov_sub(r, nov_mul(NovikovElement::monomial(term.coeff, term.exponent), b));
        q.push_back(std::move(term));
        if (++steps > kMaxDivisionSteps)
            throw TruncationTooCoarse("quotient " + a.to_string() + " / " + b.to_string() +
                                      " is an infinite series; supply a finite truncation");
    }
    return NovikovElement::from_terms(std::move(q), tq);
}

NovikovElement nov_invert(const NovikovElement& a) {
    if (!a.is_unit()) throw NotAUnit("element " + a.to_string() + " is not a unit");
    if (a.is_exact() && a.terms().size() > 1)
        throw TruncationTooCoarse("inverse of exact " + a.to_string() +
                                  " is an infinite series; supply a finite truncation");
    auto q = nov_divide(NovikovElement::constant(1), a);
    if (!q) throw NotAUnit("element " + a.to_string() + " is not a unit");
    return *q;
}

bool equal_mod(const NovikovElement& a, const NovikovElement& b, const ExtRational& t) {
    const ExtRational m = min(t, min(a.truncation(), b.truncation()));
    return a.truncated(m).terms() == b.truncated(m).terms();
}

// ---------------------------------------------------------------------------
// Text form

namespace {

class TermParser {
public:
    explicit TermParser(std::string_view s) : s_(s) {}

    NovikovElement parse() {
        std::vector<NovikovTerm> terms;
        ExtRational truncation = ExtRational::infinity();
        skip_ws();
        bool first = true;
        while (!at_end()) {
            if (peek_word("mod")) {
                pos_ += 3;
                skip_ws();
                expect('T');
                skip_ws();
                expect('^');
                truncation = parse_exponent();
                skip_ws();
                break;
            }
            if (peek_word("exact")) {
                pos_ += 5;
                skip_ws();
                break;
            }
            int sign = 1;
            if (s_[pos_] == '+' || s_[pos_] == '-') {
                sign = s_[pos_] == '-' ? -1 : 1;
                ++pos_;
                skip_ws();
            } else if (!first) {
                fail("expected '+' or '-'");
            }
            first = false;
            terms.push_back(parse_term(sign));
            skip_ws();
        }
        if (!at_end()) fail("trailing characters");
        if (first && terms.empty()) fail("empty element");
        return NovikovElement::from_terms(std::move(terms), truncation);
    }

private:
    NovikovTerm parse_term(int sign) {
        Integer coeff = 1;
        bool have_coeff = false;
        if (!at_end() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            coeff = parse_digits();
            have_coeff = true;
            skip_ws();
            if (!at_end() && s_[pos_] == '*') {
                ++pos_;
                skip_ws();
            } else if (at_end() || s_[pos_] != 'T') {
                return {coeff * sign, Rational(0)};
            }
        }
        if (at_end() || s_[pos_] != 'T') {
            if (have_coeff) return {coeff * sign, Rational(0)};
            fail("expected a term");
        }
        ++pos_;
        skip_ws();
        Rational exponent = 1;
        if (!at_end() && s_[pos_] == '^') {
            ++pos_;
            exponent = parse_exponent();
        }
        return {coeff * sign, exponent};
    }

    Rational parse_exponent() {
        skip_ws();
        if (!at_end() && s_[pos_] == '(') {
            const auto close = s_.find(')', pos_);
            if (close == std::string_view::npos) fail("unbalanced parenthesis");
            Rational r = parse_rational(s_.substr(pos_ + 1, close - pos_ - 1));
            pos_ = close + 1;
            return r;
        }
        std::size_t start = pos_;
        if (!at_end() && s_[pos_] == '-') ++pos_;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) fail("expected exponent");
        return parse_rational(s_.substr(start, pos_ - start));
    }

    Integer parse_digits() {
        Integer v = 0;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
            v = v * 10 + (s_[pos_++] - '0');
        return v;
    }

    bool peek_word(std::string_view w) const { return s_.substr(pos_, w.size()) == w; }
    void expect(char c) {
        if (at_end() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }
    void skip_ws() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool at_end() const { return pos_ >= s_.size(); }
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("novikov element '" + std::string(s_) + "' at column " +
                         std::to_string(pos_ + 1) + ": " + msg);
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

NovikovElement parse_novikov(std::string_view text) { return TermParser(text).parse(); }

}  // namespace novflow
