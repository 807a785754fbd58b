#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace csi {

// Exact rational number over 64-bit integers, always stored normalized
// (gcd(num, den) == 1, den > 0). Score proportions stay exact until the
// reporting boundary renders them as decimals.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t numerator, std::int64_t denominator) {
        if (denominator == 0) throw std::domain_error("Rational: zero denominator");
        if (denominator < 0) {
            numerator = -numerator;
            denominator = -denominator;
        }
        std::int64_t g = std::gcd(numerator < 0 ? -numerator : numerator, denominator);
        if (g > 1) {
            numerator /= g;
            denominator /= g;
        }
        num_ = numerator;
        den_ = denominator;
    }
    constexpr Rational(std::int64_t whole) : num_(whole), den_(1) {}  // NOLINT(google-explicit-constructor)

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return from128(i128(a.num_) * b.den_ + i128(b.num_) * a.den_, i128(a.den_) * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return from128(i128(a.num_) * b.den_ - i128(b.num_) * a.den_, i128(a.den_) * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return from128(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("Rational: division by zero");
        return from128(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
    }
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
    }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    // Renders with exactly `places` fractional digits, rounding half to even.
    std::string to_decimal(int places = 4) const {
        std::int64_t n = num_;
        bool negative = n < 0;
        if (negative) n = -n;
        i128 scale = 1;
        for (int i = 0; i < places; ++i) scale *= 10;
        i128 scaled = i128(n) * scale;
        i128 quotient = scaled / den_;
        i128 remainder = scaled % den_;
        i128 twice = remainder * 2;
        if (twice > den_ || (twice == den_ && (quotient & 1) != 0)) ++quotient;
        i128 whole = quotient / scale;
        i128 frac = quotient % scale;
        std::string digits;
        if (frac == 0) {
            digits.assign(static_cast<std::size_t>(places), '0');
        } else {
            i128 f = frac;
            while (f > 0) {
                digits.push_back(static_cast<char>('0' + static_cast<int>(f % 10)));
                f /= 10;
            }
            while (digits.size() < static_cast<std::size_t>(places)) digits.push_back('0');
            std::reverse(digits.begin(), digits.end());
        }
        std::string out;
        if (negative && (whole != 0 || frac != 0)) out.push_back('-');
        out += std::to_string(static_cast<std::int64_t>(whole));
        if (places > 0) {
            out.push_back('.');
            out += digits;
        }
        return out;
    }

private:
    using i128 = __int128;

    static Rational from128(i128 num, i128 den) {
        if (den < 0) {
            num = -num;
            den = -den;
        }
        i128 a = num < 0 ? -num : num;
        i128 b = den;
        while (b != 0) {
            i128 t = a % b;
            a = b;
            b = t;
        }
        if (a > 1) {
            num /= a;
            den /= a;
        }
        Rational r;
        if (num > INT64_MAX || num < INT64_MIN || den > INT64_MAX)
            throw std::overflow_error("Rational: value exceeds 64-bit range");
        r.num_ = static_cast<std::int64_t>(num);
        r.den_ = static_cast<std::int64_t>(den);
        return r;
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

}  // namespace csi
