#include "dqw/poly.hpp"

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dqw {

namespace {

constexpr int kBlocks = 4;
const char* const kBlockNames[kBlocks] = {"x", "z", "zd", "xt"};

bool hbar_in_range(int h, int order) { return h >= 0 && h <= order; }

}  // namespace

Poly::Poly(int dim, int order) : dim_(dim), order_(order) {
    if (dim < 1) throw AlgebraError("dimension must be >= 1");
    if (order < 0) throw AlgebraError("truncation order must be >= 0");
}

Poly Poly::constant(int dim, int order, const Gauss& c) {
    Poly p(dim, order);
    p.add_term(Exponents(1 + kBlocks * dim, 0), c);
    return p;
}

Poly Poly::scalar(int dim, int order, const Scalar& s) {
    return constant(dim, order, Gauss(1)).scaled(s);
}

Poly Poly::variable(int dim, int order, Var kind, int index) {
    Poly p(dim, order);
    p.check_index(index);
    Exponents e(1 + kBlocks * dim, 0);
    e[slot(dim, kind, index)] = 1;
    p.add_term(std::move(e), Gauss(1));
    return p;
}

Poly Poly::hbar(int dim, int order) {
    Poly p(dim, order);
    Exponents e(1 + kBlocks * dim, 0);
    e[0] = 1;
    p.add_term(std::move(e), Gauss(1));
    return p;
}

Poly Poly::eps(int dim, int order) { return scalar(dim, order, Scalar::eps()); }

void Poly::check_index(int index) const {
    if (index < 1 || index > dim_)
        throw AlgebraError("variable index " + std::to_string(index) + " out of range 1.." + std::to_string(dim_));
}

void Poly::check_compatible(const Poly& o) const {
    if (dim_ != o.dim_) throw AlgebraError("dimension mismatch");
    if (order_ != o.order_) throw AlgebraError("truncation order mismatch");
}

void Poly::add_term(Exponents e, const Gauss& c) {
    if (c.is_zero() || e[0] > order_) return;
    auto [it, inserted] = terms_.try_emplace(std::move(e), c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

Gauss Poly::coefficient(const Exponents& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Gauss(0) : it->second;
}

Poly& Poly::operator+=(const Poly& o) {
    check_compatible(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
}

Poly& Poly::operator-=(const Poly& o) {
    check_compatible(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
}

Poly Poly::operator-() const {
    Poly r(*this);
    for (auto& [e, c] : r.terms_) c = -c;
    return r;
}

Poly operator*(const Poly& a, const Poly& b) { return mul_serial(a, b); }

Poly mul_serial(const Poly& a, const Poly& b) {
    a.check_compatible(b);
    Poly r(a.dim_, a.order_);
    Poly::Exponents e(a.terms_.empty() ? 0 : a.terms_.begin()->first.size());
    for (const auto& [ea, ca] : a.terms_) {
        for (const auto& [eb, cb] : b.terms_) {
            if (ea[0] + eb[0] > a.order_) continue;
            for (std::size_t k = 0; k < ea.size(); ++k) e[k] = static_cast<std::uint16_t>(ea[k] + eb[k]);
            r.add_term(e, ca * cb);
        }
    }
    return r;
}

Poly mul_parallel(const Poly& a, const Poly& b) {
    a.check_compatible(b);
    std::vector<const Poly::TermMap::value_type*> rows;
    rows.reserve(a.terms_.size());
    for (const auto& t : a.terms_) rows.push_back(&t);

    int nthreads = 1;
#ifdef _OPENMP
    nthreads = omp_get_max_threads();
#endif
    std::vector<Poly> partial(static_cast<std::size_t>(nthreads), Poly(a.dim_, a.order_));

#pragma omp parallel
    {
        int tid = 0;
#ifdef _OPENMP
        tid = omp_get_thread_num();
#endif
        Poly& local = partial[static_cast<std::size_t>(tid)];
        Poly::Exponents e;
#pragma omp for schedule(dynamic, 4)
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const auto& [ea, ca] = *rows[r];
            e.resize(ea.size());
            for (const auto& [eb, cb] : b.terms_) {
                if (ea[0] + eb[0] > a.order_) continue;
                for (std::size_t k = 0; k < ea.size(); ++k) e[k] = static_cast<std::uint16_t>(ea[k] + eb[k]);
                local.add_term(e, ca * cb);
            }
        }
    }
    Poly result(a.dim_, a.order_);
    for (auto& p : partial) result += p;
    return result;
}

Poly Poly::scaled(const Gauss& c) const {
    Poly r(dim_, order_);
    if (c.is_zero()) return r;
    for (const auto& [e, v] : terms_) r.terms_.emplace(e, v * c);
    return r;
}

Poly Poly::scaled(const Scalar& s) const {
    Poly r(dim_, order_);
    if (s.is_zero()) return r;
    for (const auto& [e, v] : terms_) {
        int h = e[0] + s.hbar;
        if (h < 0) throw AlgebraError("negative hbar power in polynomial");
        if (!hbar_in_range(h, order_)) continue;
        Exponents ne = e;
        ne[0] = static_cast<std::uint16_t>(h);
        r.add_term(std::move(ne), v * s.c);
    }
    return r;
}

Poly Poly::derivative(Var kind, int index) const {
    check_index(index);
    int s = slot(dim_, kind, index);
    Poly r(dim_, order_);
    for (const auto& [e, c] : terms_) {
        if (e[s] == 0) continue;
        Exponents ne = e;
        --ne[s];
        r.add_term(std::move(ne), c * Gauss(static_cast<long>(e[s])));
    }
    return r;
}

Poly Poly::derivative(const std::vector<int>& counts) const {
    Poly r = *this;
    for (int i = 0; i < static_cast<int>(counts.size()) && !r.is_zero(); ++i)
        for (int k = 0; k < counts[i] && !r.is_zero(); ++k) r = r.derivative(Var::X, i + 1);
    return r;
}

Poly Poly::taylor_shift() const {
    if (contains(Var::Z) || contains(Var::ZDag))
        throw AlgebraError("taylor_shift: input already contains z or z-dagger variables");
    Poly r(dim_, order_);
    std::vector<Poly> shifted;
    for (int i = 1; i <= dim_; ++i)
        shifted.push_back(variable(dim_, order_, Var::X, i) + variable(dim_, order_, Var::Z, i));
    for (const auto& [e, c] : terms_) {
        Exponents base = e;
        for (int i = 1; i <= dim_; ++i) base[slot(dim_, Var::X, i)] = 0;
        Poly term(dim_, order_);
        term.add_term(base, c);
        for (int i = 1; i <= dim_; ++i)
            for (int k = 0; k < e[slot(dim_, Var::X, i)]; ++k) term = term * shifted[i - 1];
        r += term;
    }
    return r;
}

Poly Poly::zero_block(Var kind) const {
    Poly r(dim_, order_);
    for (const auto& [e, c] : terms_) {
        bool present = false;
        for (int i = 1; i <= dim_; ++i) present |= e[slot(dim_, kind, i)] != 0;
        if (!present) r.add_term(e, c);
    }
    return r;
}

Poly Poly::rename_block(Var from, Var to) const {
    if (contains(to)) throw AlgebraError("rename_block: target block already present");
    Poly r(dim_, order_);
    for (const auto& [e, c] : terms_) {
        Exponents ne = e;
        for (int i = 1; i <= dim_; ++i) std::swap(ne[slot(dim_, from, i)], ne[slot(dim_, to, i)]);
        r.add_term(std::move(ne), c);
    }
    return r;
}

Poly Poly::evaluate_block(Var kind, const std::vector<Gauss>& values) const {
    if (static_cast<int>(values.size()) != dim_) throw AlgebraError("evaluate_block: wrong number of values");
    Poly r(dim_, order_);
    for (const auto& [e, c] : terms_) {
        Exponents ne = e;
        Gauss v = c;
        for (int i = 1; i <= dim_; ++i) {
            int s = slot(dim_, kind, i);
            v *= pow(values[i - 1], static_cast<unsigned>(e[s]));
            ne[s] = 0;
        }
        r.add_term(std::move(ne), v);
    }
    return r;
}

Poly Poly::truncated(int new_order) const {
    if (new_order > order_) throw AlgebraError("truncated: cannot raise the order");
    return with_order(new_order);
}

Poly Poly::with_order(int new_order) const {
    Poly r(dim_, new_order);
    for (const auto& [e, c] : terms_) r.add_term(e, c);
    return r;
}

bool Poly::contains(Var kind) const { return max_degree(kind) > 0; }

int Poly::max_degree(Var kind) const {
    int best = 0;
    for (const auto& [e, c] : terms_) {
        int deg = 0;
        for (int i = 1; i <= dim_; ++i) deg += e[slot(dim_, kind, i)];
        best = std::max(best, deg);
    }
    return best;
}

Poly Poly::hbar_coefficient(int k) const {
    Poly r(dim_, order_);
    for (const auto& [e, c] : terms_) {
        if (e[0] != k) continue;
        Exponents ne = e;
        ne[0] = 0;
        r.add_term(std::move(ne), c);
    }
    return r;
}

namespace {

// Positive rational magnitude, parenthesized when it is a fraction followed by more factors.
std::string magnitude(const Rational& r, bool followed) {
    std::string s = rational_str(r);
    if (followed && r.get_den() != 1) return "(" + s + ")";
    return s;
}

}  // namespace

std::string Poly::str() const {
    if (terms_.empty()) return "0";
    std::vector<const TermMap::value_type*> order;
    for (const auto& t : terms_) order.push_back(&t);
    auto total = [](const Exponents& e) {
        int s = 0;
        for (std::size_t k = 1; k < e.size(); ++k) s += e[k];
        return s;
    };
    std::sort(order.begin(), order.end(), [&](auto* a, auto* b) {
        const Exponents& ea = a->first;
        const Exponents& eb = b->first;
        if (ea[0] != eb[0]) return ea[0] < eb[0];
        int ta = total(ea), tb = total(eb);
        if (ta != tb) return ta > tb;
        return std::lexicographical_compare(eb.begin() + 1, eb.end(), ea.begin() + 1, ea.end());
    });

    std::string out;
    bool first = true;
    for (const auto* t : order) {
        const Exponents& e = t->first;
        const Gauss& c = t->second;
        std::vector<std::string> factors;
        for (int b = 0; b < kBlocks; ++b)
            for (int i = 1; i <= dim_; ++i) {
                int p = e[1 + b * dim_ + (i - 1)];
                if (p == 0) continue;
                std::string v = std::string(kBlockNames[b]) + std::to_string(i);
                factors.push_back(p == 1 ? v : v + "^" + std::to_string(p));
            }
        if (e[0] > 0) factors.push_back(e[0] == 1 ? "hbar" : "hbar^" + std::to_string(e[0]));

        bool negative = false;
        std::string coef;
        bool more = !factors.empty();
        if (c.is_real() || sgn(c.re) == 0) {
            bool imag = !c.is_real();
            Rational v = imag ? c.im : c.re;
            negative = sgn(v) < 0;
            Rational m = abs(v);
            if (imag) {
                coef = m == 1 ? "i" : magnitude(m, true) + "*i";
            } else if (m != 1 || !more) {
                coef = magnitude(m, more);
            }
        } else {
            Rational im = abs(c.im);
            coef = "(" + rational_str(c.re) + (sgn(c.im) > 0 ? " + " : " - ") +
                   (im == 1 ? std::string("i") : magnitude(im, true) + "*i") + ")";
        }
        std::string body = coef;
        for (const auto& f : factors) body += (body.empty() ? "" : "*") + f;
        if (first) {
            out += (negative ? "-" : "") + body;
        } else {
            out += (negative ? " - " : " + ") + body;
        }
        first = false;
    }
    return out;
}

}  // namespace dqw
