#pragma once

// Exact rational and Gaussian-rational arithmetic on 64-bit integers.
// Overflow in intermediate products is detected via 128-bit arithmetic
// and reported by throwing; the symbolic layers built on top keep
// numerators and denominators small, so this never triggers in practice.

#include <cstdint>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace qrotor {

class Rational {
public:
    Rational() = default;
    Rational(std::int64_t value) : num_(value), den_(1) {}
    Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
        if (den_ == 0) throw std::domain_error("Rational: zero denominator");
        normalize();
    }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    bool is_zero() const { return num_ == 0; }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return from_i128(i128(a.num_) * b.den_ + i128(b.num_) * a.den_,
                         i128(a.den_) * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return from_i128(i128(a.num_) * b.den_ - i128(b.num_) * a.den_,
                         i128(a.den_) * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return from_i128(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("Rational: division by zero");
        return from_i128(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
    }
    Rational operator-() const {
        Rational r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
    }

    double to_double() const { return double(num_) / double(den_); }

    std::string str() const {
        std::ostringstream os;
        os << num_;
        if (den_ != 1) os << '/' << den_;
        return os.str();
    }
    friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
        return os << r.str();
    }

private:
    using i128 = __int128;

    static Rational from_i128(i128 num, i128 den) {
        if (den < 0) { num = -num; den = -den; }
        i128 g = gcd128(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
        Rational r;
        if (num > INT64_MAX || num < INT64_MIN || den > INT64_MAX)
            throw std::overflow_error("Rational: 64-bit overflow");
        r.num_ = std::int64_t(num);
        r.den_ = std::int64_t(den);
        return r;
    }
    static i128 gcd128(i128 a, i128 b) {
        while (b != 0) { i128 t = a % b; a = b; b = t; }
        return a == 0 ? 1 : a;
    }
    void normalize() {
        if (den_ < 0) { num_ = -num_; den_ = -den_; }
        std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) { num_ /= g; den_ /= g; }
        if (num_ == 0) den_ = 1;
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

// Complex number with exact rational real and imaginary parts.
class GaussianRational {
public:
    GaussianRational() = default;
    GaussianRational(Rational re) : re_(re) {}
    GaussianRational(std::int64_t re) : re_(re) {}
    GaussianRational(Rational re, Rational im) : re_(re), im_(im) {}

    static GaussianRational i() { return {Rational(0), Rational(1)}; }

    const Rational& re() const { return re_; }
    const Rational& im() const { return im_; }
    bool is_zero() const { return re_.is_zero() && im_.is_zero(); }
    bool is_real() const { return im_.is_zero(); }

    friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
        return {a.re_ + b.re_, a.im_ + b.im_};
    }
    friend GaussianRational operator-(const GaussianRational& a, const GaussianRational& b) {
        return {a.re_ - b.re_, a.im_ - b.im_};
    }
    friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
        return {a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_};
    }
    GaussianRational operator-() const { return {-re_, -im_}; }
    GaussianRational conj() const { return {re_, -im_}; }
    GaussianRational& operator+=(const GaussianRational& o) { return *this = *this + o; }
    GaussianRational& operator-=(const GaussianRational& o) { return *this = *this - o; }
    GaussianRational& operator*=(const GaussianRational& o) { return *this = *this * o; }

    friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const GaussianRational& a, const GaussianRational& b) {
        return !(a == b);
    }

    std::string str() const {
        if (im_.is_zero()) return re_.str();
        std::ostringstream os;
        if (!re_.is_zero()) os << re_.str() << (im_ < Rational(0) ? "" : "+");
        os << im_.str() << "i";
        return os.str();
    }
    friend std::ostream& operator<<(std::ostream& os, const GaussianRational& z) {
        return os << z.str();
    }

private:
    Rational re_;
    Rational im_;
};

}  // namespace qrotor
