#include "dqw/scalar.hpp"

#include <stdexcept>

namespace dqw {

Gauss& Gauss::operator+=(const Gauss& o) {
    re += o.re;
    im += o.im;
    return *this;
}

Gauss& Gauss::operator-=(const Gauss& o) {
    re -= o.re;
    im -= o.im;
    return *this;
}

Gauss& Gauss::operator*=(const Gauss& o) {
    Rational r = re * o.re - im * o.im;
    Rational i = re * o.im + im * o.re;
    re = std::move(r);
    im = std::move(i);
    return *this;
}

Gauss& Gauss::operator/=(const Gauss& o) {
    Rational n = o.re * o.re + o.im * o.im;
    if (sgn(n) == 0) throw std::domain_error("division by zero");
    *this *= o.conj();
    re /= n;
    im /= n;
    return *this;
}

Gauss pow(Gauss base, unsigned e) {
    Gauss r(1);
    while (e) {
        if (e & 1u) r *= base;
        base *= base;
        e >>= 1u;
    }
    return r;
}

std::string rational_str(const Rational& r) {
    return r.get_str();
}

std::string Gauss::str() const {
    if (is_real()) return rational_str(re);
    std::string ipart = im == 1 ? "i" : im == -1 ? "-i" : rational_str(im) + "*i";
    if (sgn(re) == 0) return ipart;
    return "(" + rational_str(re) + (sgn(im) > 0 ? " + " : " - ") +
           (abs(im) == 1 ? std::string("i") : rational_str(Rational(abs(im))) + "*i") + ")";
}

Scalar pow(const Scalar& s, int e) {
    if (e >= 0) return {pow(s.c, static_cast<unsigned>(e)), s.hbar * e};
    Gauss inv = Gauss(1) / s.c;
    return {pow(inv, static_cast<unsigned>(-e)), s.hbar * e};
}

std::string Scalar::str() const {
    std::string s = c.str();
    if (hbar == 0) return s;
    return s + "*hbar" + (hbar == 1 ? "" : "^" + std::to_string(hbar));
}

}  // namespace dqw
