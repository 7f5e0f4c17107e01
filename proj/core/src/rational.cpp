#include "nilharmonics/rational.hpp"

#include <cstdlib>
#include <stdexcept>

namespace nilh {

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
    a = std::llabs(a);
    b = std::llabs(b);
    while (b != 0) {
        std::int64_t t = a % b;
        a = b;
        b = t;
    }
    return a;
}

std::int64_t lcm64(std::int64_t a, std::int64_t b) {
    if (a == 0 || b == 0) return 0;
    return std::llabs(a / gcd64(a, b) * b);
}

Rational::Rational(std::int64_t n, std::int64_t d) {
    if (d == 0) throw std::invalid_argument("rational with zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    std::int64_t g = gcd64(n, d);
    if (g == 0) g = 1;
    num = n / g;
    den = d / g;
}

Rational Rational::parse(const std::string& text) {
    auto slash = text.find('/');
    try {
        std::size_t used = 0;
        if (slash == std::string::npos) {
            std::int64_t n = std::stoll(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
            return Rational(n, 1);
        }
        std::string a = text.substr(0, slash), b = text.substr(slash + 1);
        std::int64_t n = std::stoll(a, &used);
        if (used != a.size()) throw std::invalid_argument(text);
        std::int64_t d = std::stoll(b, &used);
        if (used != b.size()) throw std::invalid_argument(text);
        return Rational(n, d);
    } catch (const std::logic_error&) {
        throw std::invalid_argument("not a rational: '" + text + "'");
    }
}

std::string Rational::str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

Rational operator+(Rational a, Rational b) { return Rational(a.num * b.den + b.num * a.den, a.den * b.den); }
Rational operator-(Rational a, Rational b) { return Rational(a.num * b.den - b.num * a.den, a.den * b.den); }
Rational operator*(Rational a, Rational b) { return Rational(a.num * b.num, a.den * b.den); }
Rational operator/(Rational a, Rational b) { return Rational(a.num * b.den, a.den * b.num); }
bool operator<(Rational a, Rational b) { return a.num * b.den < b.num * a.den; }

}  // namespace nilh
