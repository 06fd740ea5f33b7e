#include "symflow/rational.hpp"

#include <cstdlib>
#include <limits>

namespace symflow {

namespace {

std::int64_t checked_cast(__int128 v, const char* what) {
    if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
        throw OverflowError(std::string("Rational overflow in ") + what);
    return static_cast<std::int64_t>(v);
}

__int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

} // namespace

Rational Rational::from_i128(i128 n, i128 d) {
    if (d == 0) throw Error("Rational: zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    const i128 g = n == 0 ? d : gcd128(n, d);
    n /= g;
    d /= g;
    Rational r;
    r.num_ = checked_cast(n, "numerator");
    r.den_ = checked_cast(d, "denominator");
    return r;
}

void Rational::normalize() {
    *this = from_i128(num_, den_);
}

std::int64_t Rational::floor_div(const Rational& a, const Rational& b) {
    if (!b.is_positive()) throw Error("Rational::floor_div: divisor must be positive");
    // floor((a.num * b.den) / (a.den * b.num))
    i128 n = i128(a.num_) * b.den_;
    i128 d = i128(a.den_) * b.num_;
    i128 q = n / d;
    if (n % d != 0 && ((n < 0) != (d < 0))) --q;
    return checked_cast(q, "floor_div");
}

Rational Rational::parse(const std::string& text) {
    if (text.empty()) throw ParseError("Rational::parse: empty token");
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        const std::int64_t n = std::strtoll(text.substr(0, slash).c_str(), nullptr, 10);
        const std::int64_t d = std::strtoll(text.substr(slash + 1).c_str(), nullptr, 10);
        if (d == 0) throw ParseError("Rational::parse: zero denominator in '" + text + "'");
        return Rational(n, d);
    }
    const auto dot = text.find('.');
    if (dot == std::string::npos) {
        char* end = nullptr;
        const std::int64_t n = std::strtoll(text.c_str(), &end, 10);
        if (end == text.c_str() || *end != '\0')
            throw ParseError("Rational::parse: bad integer '" + text + "'");
        return Rational(n);
    }
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    const std::size_t frac_len = text.size() - dot - 1;
    if (frac_len == 0 || frac_len > 17) throw ParseError("Rational::parse: bad decimal '" + text + "'");
    char* end = nullptr;
    const std::int64_t n = std::strtoll(digits.c_str(), &end, 10);
    if (end == digits.c_str() || *end != '\0')
        throw ParseError("Rational::parse: bad decimal '" + text + "'");
    std::int64_t d = 1;
    for (std::size_t i = 0; i < frac_len; ++i) {
        if (d > std::numeric_limits<std::int64_t>::max() / 10)
            throw OverflowError("Rational::parse: decimal too long");
        d *= 10;
    }
    return Rational(n, d);
}

std::string Rational::str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

} // namespace symflow
