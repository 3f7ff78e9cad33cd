#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace novflow {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(long long num, long long den = 1) {
    return Rational(Integer(num), Integer(den));
}

/// "p/q", or "p" when the denominator is 1.
std::string to_string(const Rational& r);

/// Accepts "p", "-p", "p/q". Throws ParseError on malformed text and
/// SchemaError on a zero denominator.
Rational parse_rational(std::string_view text);

double to_double(const Rational& r);

/// Rational extended by +infinity. Used for truncations (`exact` is +inf)
/// and for valuations (the zero element has valuation +inf).
class ExtRational {
public:
    ExtRational() : finite_(false) {}
    ExtRational(const Rational& v) : finite_(true), value_(v) {}  // NOLINT(implicit)
    ExtRational(long long v) : finite_(true), value_(v) {}        // NOLINT(implicit)

    static ExtRational infinity() { return ExtRational(); }

    bool is_finite() const { return finite_; }
    bool is_infinite() const { return !finite_; }
    const Rational& value() const;

    friend bool operator==(const ExtRational& a, const ExtRational& b) {
        if (a.finite_ != b.finite_) return false;
        return !a.finite_ || a.value_ == b.value_;
    }
    friend std::strong_ordering operator<=>(const ExtRational& a, const ExtRational& b) {
        if (!a.finite_ || !b.finite_) return b.finite_ <=> a.finite_;
        if (a.value_ < b.value_) return std::strong_ordering::less;
        if (b.value_ < a.value_) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }
    friend ExtRational operator+(const ExtRational& a, const ExtRational& b) {
        if (!a.finite_ || !b.finite_) return infinity();
        return ExtRational(a.value_ + b.value_);
    }
    friend ExtRational operator-(const ExtRational& a, const Rational& b) {
        if (!a.finite_) return infinity();
        return ExtRational(a.value_ - b);
    }

private:
    bool finite_;
    Rational value_;
};

inline const ExtRational& min(const ExtRational& a, const ExtRational& b) { return b < a ? b : a; }

/// "inf" or the rational text.
std::string to_string(const ExtRational& r);

inline std::ostream& operator<<(std::ostream& os, const ExtRational& r) { return os << to_string(r); }

}  // namespace novflow
