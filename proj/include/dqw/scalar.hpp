#pragma once

#include <gmpxx.h>

#include <compare>
#include <string>

namespace dqw {

using Rational = mpq_class;

// Exact Gaussian rational a + b*i.
struct Gauss {
    Rational re{0};
    Rational im{0};

    Gauss() = default;
    Gauss(long v) : re(v) {}
    Gauss(Rational r) : re(std::move(r)) { re.canonicalize(); }
    Gauss(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {
        re.canonicalize();
        im.canonicalize();
    }

    static Gauss i() { return Gauss(Rational(0), Rational(1)); }

    bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
    bool is_real() const { return sgn(im) == 0; }
    Gauss conj() const { return {re, -im}; }

    Gauss& operator+=(const Gauss& o);
    Gauss& operator-=(const Gauss& o);
    Gauss& operator*=(const Gauss& o);
    Gauss& operator/=(const Gauss& o);

    friend Gauss operator+(Gauss a, const Gauss& b) { return a += b; }
    friend Gauss operator-(Gauss a, const Gauss& b) { return a -= b; }
    friend Gauss operator*(Gauss a, const Gauss& b) { return a *= b; }
    friend Gauss operator/(Gauss a, const Gauss& b) { return a /= b; }
    Gauss operator-() const { return {-re, -im}; }
    friend bool operator==(const Gauss& a, const Gauss& b) { return a.re == b.re && a.im == b.im; }

    std::string str() const;
};

Gauss pow(Gauss base, unsigned e);
std::string rational_str(const Rational& r);

// Gaussian rational times hbar^k; k may be negative.
struct Scalar {
    Gauss c{0};
    int hbar = 0;

    Scalar() = default;
    Scalar(long v) : c(v) {}
    Scalar(Gauss g, int h = 0) : c(std::move(g)), hbar(h) {}

    // epsilon = i*hbar/2
    static Scalar eps() { return {Gauss(Rational(0), Rational(1, 2)), 1}; }
    static Scalar i_over_hbar() { return {Gauss::i(), -1}; }
    static Scalar minus_i_hbar() { return {-Gauss::i(), 1}; }

    bool is_zero() const { return c.is_zero(); }
    friend Scalar operator*(const Scalar& a, const Scalar& b) { return {a.c * b.c, a.hbar + b.hbar}; }
    Scalar operator-() const { return {-c, hbar}; }
    friend bool operator==(const Scalar& a, const Scalar& b) {
        return a.c == b.c && (a.c.is_zero() || a.hbar == b.hbar);
    }
    std::string str() const;
};

Scalar pow(const Scalar& s, int e);

}  // namespace dqw
