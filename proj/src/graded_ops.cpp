#include "dqw/graded.hpp"

#include <algorithm>

namespace dqw {

namespace {

int max_local_label(const Monomial& m) {
    int top = -1;
    for (const auto& b : m.binders)
        if (b.point < kFreeLabel) top = std::max(top, b.point);
    for (const auto& f : m.factors) {
        for (int a : f.idx)
            if (a < kFreeLabel) top = std::max(top, a);
        for (int p : f.pt)
            if (p < kFreeLabel) top = std::max(top, p);
    }
    return top;
}

int parity_of(const std::vector<Factor>& fs) {
    int p = 0;
    for (const auto& f : fs) p += f.parity();
    return p & 1;
}

int parity_of(const std::vector<Binder>& bs) {
    int p = 0;
    for (const auto& b : bs) p += domain_odd(b.domain);
    return p & 1;
}

void rename_index(Monomial& m, int from, int to) {
    for (auto& f : m.factors)
        for (auto& a : f.idx)
            if (a == from) a = to;
}

int binder_domain(const Monomial& m, int point) {
    for (const auto& b : m.binders)
        if (b.point == point) return b.domain;
    return -1;
}

}  // namespace

Term graded_mul(const Term& a, const Term& b) {
    int shift = max_local_label(a.mono) + 1;
    Monomial mb = b.mono;
    std::vector<int> bound;
    for (auto& bd : mb.binders) {
        bound.push_back(bd.point);
        if (bd.point < kFreeLabel) bd.point += shift;
    }
    for (auto& f : mb.factors) {
        for (auto& x : f.idx)
            if (x >= 0 && x < kFreeLabel) x += shift;
        for (auto& p : f.pt)
            if (p >= 0 && p < kFreeLabel && std::find(bound.begin(), bound.end(), p) != bound.end()) p += shift;
    }
    Term r;
    r.coef = a.coef * b.coef;
    if (parity_of(a.mono.factors) && parity_of(mb.binders)) r.coef = -r.coef;
    r.mono.hbar = a.mono.hbar + mb.hbar;
    r.mono.binders = a.mono.binders;
    r.mono.binders.insert(r.mono.binders.end(), mb.binders.begin(), mb.binders.end());
    r.mono.factors = a.mono.factors;
    r.mono.factors.insert(r.mono.factors.end(), mb.factors.begin(), mb.factors.end());
    return r;
}

GradedExpr graded_mul(const GradedExpr& a, const GradedExpr& b) {
    GradedExpr r;
    for (const auto& [ma, ca] : a.terms())
        for (const auto& [mb, cb] : b.terms()) r.add(graded_mul(Term(ca, ma), Term(cb, mb)));
    return r;
}

int Deriv::parity() const {
    switch (kind) {
        case DerivKind::FieldE: return 0;
        case DerivKind::FieldX: return 1;
        case DerivKind::Z: return 0;
        case DerivKind::ZDag: return 1;
    }
    return 0;
}

std::vector<Term> apply_deriv(const Deriv& d, const Term& t) {
    std::vector<Term> out;
    const int dp = d.parity();
    int sign = 1;
    if (dp && parity_of(t.mono.binders)) sign = -sign;
    const auto& fs = t.mono.factors;
    for (std::size_t j = 0; j < fs.size(); ++j) {
        const Factor& f = fs[j];
        bool hit = false;
        switch (d.kind) {
            case DerivKind::FieldE: hit = f.kind == Kind::E; break;
            case DerivKind::FieldX: hit = f.kind == Kind::X; break;
            case DerivKind::Z: hit = f.kind == Kind::Z; break;
            case DerivKind::ZDag: hit = f.kind == Kind::ZDag; break;
        }
        if (hit && f.d) throw std::logic_error("functional derivative of a differentiated field");
        if (hit && (d.kind == DerivKind::FieldE || d.kind == DerivKind::FieldX) && d.domain >= 0 &&
            binder_domain(t.mono, f.pt[0]) != d.domain)
            hit = false;
        if (hit) {
            Term r = t;
            r.coef = sign > 0 ? t.coef : -t.coef;
            int from = f.idx[0];
            if (d.kind == DerivKind::FieldE || d.kind == DerivKind::FieldX) {
                r.mono.factors[j] = Factor::delta(d.point, f.pt[0]);
            } else {
                r.mono.factors.erase(r.mono.factors.begin() + static_cast<long>(j));
            }
            rename_index(r.mono, from, d.index);
            out.push_back(std::move(r));
        }
        if (dp && f.parity()) sign = -sign;
    }
    return out;
}

GradedExpr functional_derivative(const GradedExpr& e, const Deriv& d) {
    GradedExpr r;
    for (const auto& t : e.term_list())
        for (const auto& u : apply_deriv(d, t)) r.add(u);
    return r;
}

GradedExpr exp_truncated(const GradedExpr& s, std::size_t max_factors, int max_hbar) {
    for (const auto& [m, c] : s.terms()) {
        if (m.parity()) throw AnyOddTerm("exp_truncated: odd term in exponent: " + term_str(c, m));
        if (m.factors.empty()) throw std::invalid_argument("exp_truncated: constant term in exponent");
    }
    auto keep = [&](const GradedExpr& e) {
        GradedExpr r;
        for (const auto& [m, c] : e.terms())
            if (m.factors.size() <= max_factors && m.hbar <= max_hbar) r.add_canonical(m, c);
        return r;
    };
    GradedExpr one;
    one.add_canonical(Monomial{}, Gauss(1));
    GradedExpr result = one;
    GradedExpr power = one;
    for (std::size_t k = 1; k <= max_factors; ++k) {
        power = keep(graded_mul(power, s)).scaled(Scalar(Gauss(Rational(1, static_cast<long>(k)))));
        if (power.is_zero()) break;
        result += power;
    }
    return result;
}

}  // namespace dqw
