#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace strm {

// Exact rational over int64, always canonical: den > 0, gcd(|num|, den) == 1.
// Used for frequencies (Hz), durations and timestamps (seconds). Intermediate
// products go through __int128; results that do not fit int64 throw.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n) : num(n), den(1) {}
    Rational(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den == 0) throw std::domain_error("rational with zero denominator");
        if (den < 0) { num = -num; den = -den; }
        std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }

    bool is_zero() const { return num == 0; }
    bool is_positive() const { return num > 0; }
    bool is_integer() const { return den == 1; }

    static Rational from_i128(__int128 n, __int128 d) {
        if (d == 0) throw std::domain_error("rational with zero denominator");
        if (d < 0) { n = -n; d = -d; }
        __int128 a = n < 0 ? -n : n;
        __int128 g = gcd128(a, d);
        if (g > 1) { n /= g; d /= g; }
        if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
            throw std::overflow_error("rational overflow");
        Rational r;
        r.num = static_cast<std::int64_t>(n);
        r.den = static_cast<std::int64_t>(d);
        return r;
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return from_i128((__int128)a.num * b.den + (__int128)b.num * a.den,
                         (__int128)a.den * b.den);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return from_i128((__int128)a.num * b.den - (__int128)b.num * a.den,
                         (__int128)a.den * b.den);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return from_i128((__int128)a.num * b.num, (__int128)a.den * b.den);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num == 0) throw std::domain_error("rational division by zero");
        return from_i128((__int128)a.num * b.den, (__int128)a.den * b.num);
    }
    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return (__int128)a.num * b.den < (__int128)b.num * a.den;
    }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    // Largest integer k with k <= a.
    std::int64_t floor() const {
        std::int64_t q = num / den;
        if (num % den != 0 && num < 0) --q;
        return q;
    }

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

    // True when the value has a finite decimal expansion (den = 2^a * 5^b).
    bool decimal_exact() const {
        std::int64_t d = den;
        while (d % 2 == 0) d /= 2;
        while (d % 5 == 0) d /= 5;
        return d == 1;
    }

    // Canonical text: integer, exact decimal, or "num/den" as a last resort.
    std::string str() const {
        if (den == 1) return std::to_string(num);
        if (!decimal_exact())
            return std::to_string(num) + "/" + std::to_string(den);
        // Scale denominator to a power of ten.
        std::int64_t d = den;
        int twos = 0, fives = 0;
        while (d % 2 == 0) { d /= 2; ++twos; }
        while (d % 5 == 0) { d /= 5; ++fives; }
        int digits = twos > fives ? twos : fives;
        __int128 scaled = num;
        for (int i = 0; i < digits - twos; ++i) scaled *= 2;
        for (int i = 0; i < digits - fives; ++i) scaled *= 5;
        bool neg = scaled < 0;
        if (neg) scaled = -scaled;
        std::string frac;
        for (int i = 0; i < digits; ++i) { frac.insert(frac.begin(), char('0' + int(scaled % 10))); scaled /= 10; }
        std::string whole;
        while (scaled > 0) { whole.insert(whole.begin(), char('0' + int(scaled % 10))); scaled /= 10; }
        if (whole.empty()) whole = "0";
        while (!frac.empty() && frac.back() == '0') frac.pop_back();
        std::string out = (neg ? "-" : "") + whole;
        if (!frac.empty()) out += "." + frac;
        return out;
    }

    // Parses "12", "-0.5", "3.25". Returns false on malformed input.
    static bool parse_decimal(const std::string& text, Rational& out) {
        if (text.empty()) return false;
        std::size_t i = 0;
        bool neg = false;
        if (text[i] == '-' || text[i] == '+') { neg = text[i] == '-'; ++i; }
        if (i >= text.size() || !isdigit(static_cast<unsigned char>(text[i]))) return false;
        __int128 whole = 0, frac = 0, scale = 1;
        for (; i < text.size() && isdigit(static_cast<unsigned char>(text[i])); ++i) {
            whole = whole * 10 + (text[i] - '0');
            if (whole > (__int128)INT64_MAX * 1000) return false;
        }
        if (i < text.size() && text[i] == '.') {
            ++i;
            if (i >= text.size() || !isdigit(static_cast<unsigned char>(text[i]))) return false;
            for (; i < text.size() && isdigit(static_cast<unsigned char>(text[i])); ++i) {
                frac = frac * 10 + (text[i] - '0');
                scale *= 10;
                if (scale > (__int128)INT64_MAX) return false;
            }
        }
        if (i != text.size()) return false;
        __int128 n = whole * scale + frac;
        if (neg) n = -n;
        out = from_i128(n, scale);
        return true;
    }

  private:
    static __int128 gcd128(__int128 a, __int128 b) {
        while (b != 0) { __int128 t = a % b; a = b; b = t; }
        return a == 0 ? 1 : a;
    }
};

// lcm of two positive rationals under the "q/p is a positive integer" divisibility
// order: lcm(a/b, c/d) = lcm(a, c) / gcd(b, d).
inline Rational rational_lcm(const Rational& a, const Rational& b) {
    if (!a.is_positive() || !b.is_positive())
        throw std::domain_error("lcm of non-positive rationals");
    __int128 n = (__int128)a.num / std::gcd(a.num, b.num) * b.num;
    std::int64_t d = std::gcd(a.den, b.den);
    return Rational::from_i128(n, d);
}

// True when b/a is a positive integer (every instant of the slower grid a
// also lies on the faster grid b).
inline bool rational_divides(const Rational& a, const Rational& b) {
    if (!a.is_positive() || !b.is_positive()) return false;
    __int128 n = (__int128)b.num * a.den;
    __int128 d = (__int128)b.den * a.num;
    return n % d == 0;
}

}  // namespace strm
