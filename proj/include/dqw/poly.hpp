#pragma once

#include "dqw/scalar.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace dqw {

enum class Var : int { X = 0, Z = 1, ZDag = 2, XTilde = 3 };

struct AlgebraError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exact polynomial in hbar and the coordinate blocks x, z, z-dagger, x-tilde,
// truncated at hbar-degree `order`.
class Poly {
public:
    // [hbar, x1..xd, z1..zd, zd1..zdd, xt1..xtd]
    using Exponents = std::vector<std::uint16_t>;
    using TermMap = std::map<Exponents, Gauss>;

    Poly(int dim, int order);

    static Poly constant(int dim, int order, const Gauss& c);
    static Poly scalar(int dim, int order, const Scalar& s);
    static Poly variable(int dim, int order, Var kind, int index);
    static Poly hbar(int dim, int order);
    static Poly eps(int dim, int order);

    int dim() const { return dim_; }
    int order() const { return order_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    void add_term(Exponents e, const Gauss& c);
    Gauss coefficient(const Exponents& e) const;

    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);
    Poly& operator*=(const Poly& o) { return *this = *this * o; }
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(const Poly& a, const Poly& b);
    Poly operator-() const;
    friend bool operator==(const Poly& a, const Poly& b) {
        return a.dim_ == b.dim_ && a.order_ == b.order_ && a.terms_ == b.terms_;
    }

    Poly scaled(const Gauss& c) const;
    // Multiplies by s; hbar exponents must stay nonnegative.
    Poly scaled(const Scalar& s) const;

    Poly derivative(Var kind, int index) const;
    Poly derivative(int index) const { return derivative(Var::X, index); }
    Poly derivative(const std::vector<int>& counts) const;  // x multi-index as counts

    // p(x) -> p(x+z)
    Poly taylor_shift() const;
    // Sets every variable of `kind` to zero.
    Poly zero_block(Var kind) const;
    // Renames block `from` to block `to`; `to` must be absent.
    Poly rename_block(Var from, Var to) const;
    // Substitutes rational values for a block.
    Poly evaluate_block(Var kind, const std::vector<Gauss>& values) const;
    Poly truncated(int new_order) const;
    Poly with_order(int new_order) const;

    bool contains(Var kind) const;
    int max_degree(Var kind) const;
    // Part with hbar-degree exactly k, hbar exponent stripped.
    Poly hbar_coefficient(int k) const;

    std::string str() const;

    static int slot(int dim, Var kind, int index) { return 1 + static_cast<int>(kind) * dim + (index - 1); }

private:
    friend Poly mul_serial(const Poly& a, const Poly& b);
    friend Poly mul_parallel(const Poly& a, const Poly& b);
    void check_compatible(const Poly& o) const;
    void check_index(int index) const;

    int dim_;
    int order_;
    TermMap terms_;
};

// Serial reference product (also used by operator*).
Poly mul_serial(const Poly& a, const Poly& b);
// OpenMP product: rows of `a` split across threads, partial maps merged.
Poly mul_parallel(const Poly& a, const Poly& b);

}  // namespace dqw
