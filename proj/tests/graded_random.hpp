#pragma once
// Random well-formed graded terms for property checks.

#include "dqw/graded.hpp"

#include <algorithm>
#include <map>
#include <random>

namespace gen {

using namespace dqw;

// Random closed terms over a small alphabet of factors.
inline Term random_term(std::mt19937_64& rng, int external = kFreeLabel + 20) {
    std::uniform_int_distribution<int> pick(0, 7), npts(1, 3), nidx(1, 3);
    int points = npts(rng), idx = nidx(rng);
    std::vector<Binder> bs;
    for (int p = 0; p < points; ++p) bs.push_back({p, p == 0 ? kSide : interval_domain(1 + int(rng() % 2))});
    auto pt = [&]() { return int(rng() % points); };
    auto ix = [&]() { return int(rng() % idx); };
    std::vector<Factor> fs;
    int n = 2 + int(rng() % 4);
    for (int k = 0; k < n; ++k) {
        switch (pick(rng)) {
            case 0: fs.push_back(Factor::e(ix(), pt(), int(rng() % 2))); break;
            case 1: fs.push_back(Factor::x(ix(), pt(), int(rng() % 2))); break;
            case 2: fs.push_back(Factor::zeta(0, pt())); break;
            case 3: fs.push_back(Factor::zeta_hat(pt(), pt())); break;
            case 4: fs.push_back(Factor::alpha(ix(), ix())); break;
            case 5: fs.push_back(Factor::dx(ix())); break;
            case 6: fs.push_back(Factor::zdag(ix())); break;
            default: fs.push_back(Factor::tau(pt())); break;
        }
    }
    // an index used once is an external label
    std::map<int, int> uses;
    for (const auto& f : fs)
        for (int a : f.idx)
            if (a >= 0) ++uses[a];
    for (auto& f : fs)
        for (int& a : f.idx)
            if (a >= 0 && uses[a] == 1) a += external;
    return Term(Scalar(Gauss(long(rng() % 5) + 1)), bs, fs);
}


// Graded Leibniz for one derivative on one pair; true if both sides agree.
inline bool leibniz_holds(const Term& a0, const Term& b0, const Deriv& d) {
    Term a = a0, b = b0;
    for (auto& f : a.mono.factors) f.d = 0;
    for (auto& f : b.mono.factors) f.d = 0;
    GradedExpr lhs;
    for (const auto& t : apply_deriv(d, graded_mul(a, b))) lhs.add(t);
    GradedExpr rhs;
    for (const auto& t : apply_deriv(d, a)) rhs.add(graded_mul(t, b));
    bool flip = d.parity() && a.mono.parity();
    for (const auto& t : apply_deriv(d, b)) {
        Term r = graded_mul(a, t);
        if (flip) r.coef = -r.coef;
        rhs.add(r);
    }
    return lhs == rhs;
}

// Reorders factors by a random permutation with the matching Koszul sign; the expression must not change.
inline bool koszul_consistent(const Term& t, std::mt19937_64& rng) {
    Term p = t;
    std::vector<std::size_t> perm(p.mono.factors.size());
    for (std::size_t k = 0; k < perm.size(); ++k) perm[k] = k;
    std::shuffle(perm.begin(), perm.end(), rng);
    int sign = 1;
    for (std::size_t a = 0; a < perm.size(); ++a)
        for (std::size_t b = a + 1; b < perm.size(); ++b)
            if (perm[a] > perm[b] && t.mono.factors[perm[a]].parity() && t.mono.factors[perm[b]].parity()) sign = -sign;
    for (std::size_t a = 0; a < perm.size(); ++a) p.mono.factors[a] = t.mono.factors[perm[a]];
    if (sign < 0) p.coef = -p.coef;
    return GradedExpr{p} == GradedExpr{t};
}

}  // namespace gen
