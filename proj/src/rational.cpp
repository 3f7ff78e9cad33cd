#include "novflow/rational.hpp"

#include "novflow/errors.hpp"

#include <cctype>

namespace novflow {

std::string to_string(const Rational& r) {
    const Integer& num = boost::multiprecision::numerator(r);
    const Integer& den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

namespace {

Integer parse_integer(std::string_view text, std::string_view whole) {
    std::size_t pos = 0;
    bool negative = false;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
        negative = text[pos] == '-';
        ++pos;
    }
    if (pos == text.size()) throw ParseError("malformed rational '" + std::string(whole) + "'");
    Integer value = 0;
    for (; pos < text.size(); ++pos) {
        if (!std::isdigit(static_cast<unsigned char>(text[pos])))
            throw ParseError("malformed rational '" + std::string(whole) + "'");
        value = value * 10 + (text[pos] - '0');
    }
    return negative ? Integer(-value) : value;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    const std::string_view t = trim(text);
    const auto slash = t.find('/');
    if (slash == std::string_view::npos) return Rational(parse_integer(t, text));
    const Integer num = parse_integer(trim(t.substr(0, slash)), text);
    const Integer den = parse_integer(trim(t.substr(slash + 1)), text);
    if (den == 0) throw SchemaError("zero denominator in rational '" + std::string(text) + "'");
    return Rational(num, den);
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

const Rational& ExtRational::value() const {
    if (!finite_) throw std::logic_error("ExtRational::value() on infinity");
    return value_;
}

std::string to_string(const ExtRational& r) { return r.is_finite() ? to_string(r.value()) : "inf"; }

}  // namespace novflow
