#pragma once

#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <string>

#include "gsdkit/error.hpp"

namespace gsdkit {

// Exact rational arithmetic for GSD bookkeeping and enhancer scales.
// Keeps identities like 50cm * 256/640 = 20cm exact instead of relying on
// floating point.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n) : num(n), den(1) {}  // NOLINT: implicit by design
    Rational(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den == 0) fail("InvalidRational", "zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
        if (num == 0) den = 1;
    }

    bool is_integral() const { return den == 1; }
    bool positive() const { return num > 0; }
    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

    friend Rational operator*(const Rational& a, const Rational& b) {
        // Cross-reduce before multiplying to keep intermediates small.
        const std::int64_t g1 = std::gcd(std::llabs(a.num), b.den);
        const std::int64_t g2 = std::gcd(std::llabs(b.num), a.den);
        return Rational((a.num / g1) * (b.num / g2), (a.den / g2) * (b.den / g1));
    }

    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num == 0) fail("InvalidRational", "division by zero");
        return a * Rational(b.den, b.num);
    }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }

    friend bool operator<(const Rational& a, const Rational& b) {
        return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
    }

    std::string to_string() const {
        if (den == 1) return std::to_string(num);
        return std::to_string(num) + "/" + std::to_string(den);
    }

    // Accepts "20", "5/2" and plain decimals such as "2.5".
    static Rational parse(const std::string& text) {
        if (text.empty()) fail("InvalidRational", "empty rational literal");
        const auto slash = text.find('/');
        if (slash != std::string::npos) {
            return Rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
        }
        const auto dot = text.find('.');
        if (dot != std::string::npos) {
            const std::string whole = text.substr(0, dot);
            const std::string frac = text.substr(dot + 1);
            if (frac.size() > 15) fail("InvalidRational", "too many decimal digits: " + text);
            std::int64_t den = 1;
            for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
            const bool neg = !whole.empty() && whole[0] == '-';
            const std::int64_t w = whole.empty() || whole == "-" ? 0 : parse_int(whole);
            const std::int64_t f = frac.empty() ? 0 : parse_int(frac);
            std::int64_t num = std::llabs(w) * den + f;
            if (neg || w < 0) num = -num;
            return Rational(num, den);
        }
        return Rational(parse_int(text));
    }

private:
    static std::int64_t parse_int(const std::string& s) {
        try {
            std::size_t pos = 0;
            const std::int64_t v = std::stoll(s, &pos);
            if (pos != s.size()) fail("InvalidRational", "bad integer literal: " + s);
            return v;
        } catch (const std::logic_error&) {
            fail("InvalidRational", "bad integer literal: " + s);
        }
    }
};

}  // namespace gsdkit
