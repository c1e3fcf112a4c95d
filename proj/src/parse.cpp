#include "dqw/parse.hpp"

#include <cctype>

namespace dqw {

namespace {

class Parser {
public:
    Parser(std::string_view text, int dim, int order) : s_(text), dim_(dim), order_(order) {}

    Poly run() {
        Poly p = expr();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
        return p;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Poly expr() {
        Poly acc = term();
        for (;;) {
            if (accept('+')) acc += term();
            else if (accept('-')) acc -= term();
            else return acc;
        }
    }

    Poly term() {
        Poly acc = unary();
        for (;;) {
            if (accept('*')) {
                acc = acc * unary();
            } else if (accept('/')) {
                std::size_t at = pos_;
                Poly d = unary();
                Gauss c = constant_value(d, at);
                acc = acc.scaled(Gauss(1) / c);
            } else {
                return acc;
            }
        }
    }

    Gauss constant_value(const Poly& p, std::size_t at) const {
        if (p.is_zero()) throw ParseError("division by zero", at);
        if (p.size() != 1) throw ParseError("division by a non-constant expression", at);
        const auto& [e, c] = *p.terms().begin();
        for (auto v : e)
            if (v != 0) throw ParseError("division by a non-constant expression", at);
        return c;
    }

    Poly unary() {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return power();
    }

    Poly power() {
        Poly base = atom();
        if (accept('^')) {
            skip_ws();
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (start == pos_) fail("expected nonnegative integer exponent");
            unsigned long e = std::stoul(std::string(s_.substr(start, pos_ - start)));
            Poly r = Poly::constant(dim_, order_, Gauss(1));
            for (unsigned long k = 0; k < e && !r.is_zero(); ++k) r = r * base;
            return r;
        }
        return base;
    }

    Poly atom() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            Poly p = expr();
            if (!accept(')')) fail("expected ')'");
            return p;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            return Poly::constant(dim_, order_, Gauss(Rational(std::string(s_.substr(start, pos_ - start)))));
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            std::string name(s_.substr(start, pos_ - start));
            if (name == "i") return Poly::constant(dim_, order_, Gauss::i());
            if (name == "hbar") return Poly::hbar(dim_, order_);
            if (name == "eps") return Poly::eps(dim_, order_);
            Var kind;
            if (name == "x") kind = Var::X;
            else if (name == "z") kind = Var::Z;
            else if (name == "zd") kind = Var::ZDag;
            else if (name == "xt") kind = Var::XTilde;
            else throw ParseError("unknown identifier '" + name + "'", start);
            std::size_t num = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (num == pos_) throw ParseError("variable '" + name + "' needs an index", start);
            int index = std::stoi(std::string(s_.substr(num, pos_ - num)));
            if (index < 1 || index > dim_)
                throw ParseError("variable index " + std::to_string(index) + " out of range 1.." +
                                     std::to_string(dim_),
                                 start);
            return Poly::variable(dim_, order_, kind, index);
        }
        fail("unexpected character '" + std::string(1, c) + "'");
    }

    std::string_view s_;
    int dim_;
    int order_;
    std::size_t pos_ = 0;
};

}  // namespace

Poly parse_poly(std::string_view text, int dim, int order) {
    return Parser(text, dim, order).run();
}

Rational parse_rational(std::string_view text) {
    std::string t;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    if (t.empty()) throw ParseError("empty rational", 0);
    std::size_t k = 0;
    if (t[k] == '-' || t[k] == '+') ++k;
    std::size_t slash = t.find('/');
    auto digits = [&](std::size_t a, std::size_t b) {
        if (a >= b) return false;
        for (std::size_t j = a; j < b; ++j)
            if (!std::isdigit(static_cast<unsigned char>(t[j]))) return false;
        return true;
    };
    std::size_t end = slash == std::string::npos ? t.size() : slash;
    if (!digits(k, end) || (slash != std::string::npos && !digits(slash + 1, t.size())))
        throw ParseError("malformed rational '" + t + "'", 0);
    if (slash == std::string::npos) return Rational(mpz_class(t));
    mpz_class den(t.substr(slash + 1));
    if (sgn(den) == 0) throw ParseError("zero denominator", slash);
    Rational r(mpz_class(t.substr(0, slash)), den);
    r.canonicalize();
    return r;
}

}  // namespace dqw
