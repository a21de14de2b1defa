#pragma once

// Exact rational arithmetic for download-cost bounds and caching ratios.
//
// Every quantity the library reports (corner ratios, costs, bounds, gaps)
// is an exact rational; nothing internal ever rounds through floating
// point. Values are kept in lowest terms with a positive denominator.

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pir {

using Bigint = boost::multiprecision::cpp_int;

class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(int v) : num_(v), den_(1) {}                // NOLINT(google-explicit-constructor)
    Rational(long long v) : num_(v), den_(1) {}          // NOLINT(google-explicit-constructor)
    Rational(Bigint v) : num_(std::move(v)), den_(1) {}  // NOLINT(google-explicit-constructor)

    Rational(Bigint numerator, Bigint denominator)
        : num_(std::move(numerator)), den_(std::move(denominator)) {
        if (den_ == 0) {
            throw std::domain_error("Rational: zero denominator");
        }
        normalize();
    }

    const Bigint& num() const { return num_; }
    const Bigint& den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_negative() const { return num_ < 0; }

    Rational operator-() const {
        Rational r(*this);
        r.num_ = -r.num_;
        return r;
    }

    Rational& operator+=(const Rational& o) {
        num_ = num_ * o.den_ + o.num_ * den_;
        den_ *= o.den_;
        normalize();
        return *this;
    }
    Rational& operator-=(const Rational& o) { return *this += -o; }
    Rational& operator*=(const Rational& o) {
        num_ *= o.num_;
        den_ *= o.den_;
        normalize();
        return *this;
    }
    Rational& operator/=(const Rational& o) {
        if (o.num_ == 0) {
            throw std::domain_error("Rational: division by zero");
        }
        num_ *= o.den_;
        den_ *= o.num_;
        normalize();
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    // Denominators are positive, so cross multiplication preserves order.
    friend bool operator<(const Rational& a, const Rational& b) {
        return a.num_ * b.den_ < b.num_ * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    /// Renders as "p/q", e.g. "5/6", "1/1", "-3/20".
    std::string str() const {
        return num_.str() + "/" + den_.str();
    }

    /// Fixed-point decimal with `digits` fractional digits, rounded
    /// half to even. digits == 0 renders an integer.
    std::string decimal(int digits = 12) const {
        if (digits < 0) {
            throw std::invalid_argument("Rational::decimal: negative digit count");
        }
        Bigint n = num_ < 0 ? Bigint(-num_) : num_;
        Bigint scale = 1;
        for (int i = 0; i < digits; ++i) scale *= 10;
        Bigint scaled = n * scale;
        Bigint q = scaled / den_;
        Bigint rem = scaled % den_;
        Bigint twice = rem * 2;
        if (twice > den_ || (twice == den_ && q % 2 != 0)) {
            ++q;
        }
        std::string out;
        if (num_ < 0 && q != 0) out += '-';
        Bigint ip = q / scale;
        out += ip.str();
        if (digits > 0) {
            std::string frac = Bigint(q % scale).str();
            out += '.';
            out += std::string(static_cast<size_t>(digits) - frac.size(), '0');
            out += frac;
        }
        return out;
    }

    double to_double() const {
        return num_.convert_to<double>() / den_.convert_to<double>();
    }

    /// Parses "p/q" or a bare integer "p". Whitespace is not accepted.
    static Rational parse(std::string_view text) {
        auto slash = text.find('/');
        if (slash == std::string_view::npos) {
            return Rational(parse_int(text));
        }
        Bigint p = parse_int(text.substr(0, slash));
        Bigint q = parse_int(text.substr(slash + 1));
        return Rational(std::move(p), std::move(q));
    }

private:
    static Bigint parse_int(std::string_view text) {
        if (text.empty()) {
            throw std::invalid_argument("Rational::parse: empty integer");
        }
        size_t start = text[0] == '-' ? 1 : 0;
        if (start == text.size()) {
            throw std::invalid_argument("Rational::parse: lone sign");
        }
        for (size_t i = start; i < text.size(); ++i) {
            if (text[i] < '0' || text[i] > '9') {
                throw std::invalid_argument("Rational::parse: bad digit in '" +
                                            std::string(text) + "'");
            }
        }
        return Bigint(std::string(text));
    }

    void normalize() {
        if (num_ == 0) {
            den_ = 1;
            return;
        }
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        Bigint g = boost::multiprecision::gcd(num_ < 0 ? Bigint(-num_) : num_, den_);
        num_ /= g;
        den_ /= g;
    }

    Bigint num_;
    Bigint den_;
};

inline std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.str();
}

}  // namespace pir
