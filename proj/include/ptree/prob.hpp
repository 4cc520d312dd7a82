#pragma once

/// \file prob.hpp
/// \brief Exact rational probabilities backed by GMP.

#include <gmpxx.h>

#include <charconv>
#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ptree {

/// An exact rational number, always kept in lowest terms.
///
/// Used for transition probabilities, realization masses and the
/// intermediate sums of the normalization steps. Arithmetic is exact and
/// never clamped; whether a value lies in [0, 1] is a property checked by
/// tree validation, not by the type.
class Prob {
public:
    Prob() = default;
    Prob(long num) : value_(num) {}  // NOLINT(google-explicit-constructor)
    Prob(long num, long den) : value_(num, den) {
        if (den == 0) throw std::domain_error("zero denominator");
        value_.canonicalize();
    }
    explicit Prob(mpq_class value) : value_(std::move(value)) { value_.canonicalize(); }

    static Prob zero() { return Prob(0); }
    static Prob one() { return Prob(1); }

    /// Parses "num/den", an integer, or a decimal such as "0.25" or "1e-3".
    /// Decimals are converted to their exact decimal fraction (0.2 -> 1/5).
    static Prob parse(std::string_view text);

    /// Exact representation of a binary double, via its shortest round-trip
    /// decimal spelling. 0.2 -> 1/5, not 3602879701896397/18014398509481984.
    static Prob from_double(double value);

    const mpq_class& value() const { return value_; }
    mpz_class numerator() const { return value_.get_num(); }
    mpz_class denominator() const { return value_.get_den(); }

    bool is_zero() const { return sgn(value_) == 0; }
    bool is_one() const { return value_ == 1; }
    bool in_unit_interval() const { return sgn(value_) >= 0 && value_ <= 1; }

    double to_double() const { return value_.get_d(); }

    /// Always "num/den", including "0/1" and "1/1".
    std::string str() const { return value_.get_num().get_str() + "/" + value_.get_den().get_str(); }

    /// "num/den" for proper fractions, just "num" for integers.
    std::string short_str() const {
        return value_.get_den() == 1 ? value_.get_num().get_str() : str();
    }

    Prob& operator+=(const Prob& o) { value_ += o.value_; return *this; }
    Prob& operator-=(const Prob& o) { value_ -= o.value_; return *this; }
    Prob& operator*=(const Prob& o) { value_ *= o.value_; return *this; }
    Prob& operator/=(const Prob& o) {
        if (o.is_zero()) throw std::domain_error("division by zero probability");
        value_ /= o.value_;
        return *this;
    }

    friend Prob operator+(Prob a, const Prob& b) { return a += b; }
    friend Prob operator-(Prob a, const Prob& b) { return a -= b; }
    friend Prob operator*(Prob a, const Prob& b) { return a *= b; }
    friend Prob operator/(Prob a, const Prob& b) { return a /= b; }

    friend bool operator==(const Prob& a, const Prob& b) { return a.value_ == b.value_; }
    friend std::strong_ordering operator<=>(const Prob& a, const Prob& b) {
        const int c = cmp(a.value_, b.value_);
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

    friend std::ostream& operator<<(std::ostream& os, const Prob& p) { return os << p.short_str(); }

private:
    mpq_class value_{0};
};

namespace detail {

inline bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

inline mpz_class pow10(unsigned long e) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
    return r;
}

}  // namespace detail

inline Prob Prob::parse(std::string_view text) {
    const auto fail = [&] {
        return std::invalid_argument("malformed probability '" + std::string(text) + "'");
    };
    std::string_view s = text;
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    if (s.empty()) throw fail();

    mpq_class q;
    if (const auto slash = s.find('/'); slash != std::string_view::npos) {
        const auto num = s.substr(0, slash);
        const auto den = s.substr(slash + 1);
        if (!detail::all_digits(num) || !detail::all_digits(den)) throw fail();
        const mpz_class d(std::string(den), 10);
        if (d == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
        q = mpq_class(mpz_class(std::string(num), 10), d);
    } else {
        std::string_view mantissa = s;
        long exponent = 0;
        if (const auto e = s.find_first_of("eE"); e != std::string_view::npos) {
            mantissa = s.substr(0, e);
            auto exp_text = s.substr(e + 1);
            if (!exp_text.empty() && exp_text.front() == '+') exp_text.remove_prefix(1);
            const auto [ptr, ec] =
                std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);
            if (ec != std::errc{} || ptr != exp_text.data() + exp_text.size() || exp_text.empty())
                throw fail();
            if (exponent > 4096 || exponent < -4096) throw fail();
        }
        std::string digits;
        long frac_len = 0;
        if (const auto dot = mantissa.find('.'); dot != std::string_view::npos) {
            const auto int_part = mantissa.substr(0, dot);
            const auto frac_part = mantissa.substr(dot + 1);
            if (int_part.empty() && frac_part.empty()) throw fail();
            if ((!int_part.empty() && !detail::all_digits(int_part)) ||
                (!frac_part.empty() && !detail::all_digits(frac_part)))
                throw fail();
            digits = std::string(int_part) + std::string(frac_part);
            frac_len = static_cast<long>(frac_part.size());
        } else {
            if (!detail::all_digits(mantissa)) throw fail();
            digits = std::string(mantissa);
        }
        const long scale = exponent - frac_len;
        const mpz_class n(digits, 10);
        if (scale >= 0) {
            q = mpq_class(n * detail::pow10(static_cast<unsigned long>(scale)));
        } else {
            q = mpq_class(n, detail::pow10(static_cast<unsigned long>(-scale)));
        }
    }
    q.canonicalize();
    if (negative) q = -q;
    return Prob(q);
}

inline Prob Prob::from_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) throw std::invalid_argument("unrepresentable probability");
    return parse(std::string_view(buf, static_cast<std::size_t>(ptr - buf)));
}

}  // namespace ptree
