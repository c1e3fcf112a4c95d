#include "dqw/graded.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

namespace dqw {

std::string domain_name(int dom) {
    if (dom == kBulk) return "M";
    if (dom == kSide) return "S";
    return "I" + std::to_string(dom - 1);
}

int Factor::parity() const {
    int base = 0;
    switch (kind) {
        case Kind::Alpha:
        case Kind::Z:
        case Kind::T:
        case Kind::X:
        case Kind::ZetaHat:
        case Kind::Kappa:
        case Kind::VarE:
            base = 0;
            break;
        case Kind::Dx:
        case Kind::ZDag:
        case Kind::E:
        case Kind::Zeta:
        case Kind::Tau:
        case Kind::DeltaPt:
        case Kind::VarX:
        case Kind::DeltaS:
        case Kind::PiAlpha:
            base = 1;
            break;
    }
    return (base + d) & 1;
}

int Factor::points() const { return (pt[0] >= 0) + (pt[1] >= 0); }

int Monomial::parity() const {
    int p = 0;
    for (const auto& b : binders) p += domain_odd(b.domain);
    for (const auto& f : factors) p += f.parity();
    return p & 1;
}

int Monomial::d_count() const {
    int n = 0;
    for (const auto& f : factors) n += f.d;
    return n;
}

namespace {

bool skew_kernel(Kind k) { return k == Kind::ZetaHat || k == Kind::DeltaPt; }

// Sort with a Koszul sign; parity(x) gives the grading used for transpositions.
template <class T, class Less, class Par>
int koszul_sort(std::vector<T>& v, Less less, Par parity) {
    int sign = 1;
    for (std::size_t i = 1; i < v.size(); ++i) {
        for (std::size_t j = i; j > 0 && less(v[j], v[j - 1]); --j) {
            if (parity(v[j]) && parity(v[j - 1])) sign = -sign;
            std::swap(v[j], v[j - 1]);
        }
    }
    return sign;
}

// Normalizes skew factors in place; returns 0 if some factor vanishes identically.
int normalize_factors(std::vector<Factor>& fs) {
    int sign = 1;
    for (auto& f : fs) {
        if (f.kind == Kind::Alpha) {
            if (f.idx[0] == f.idx[1]) return 0;
            if (f.idx[0] > f.idx[1]) {
                std::swap(f.idx[0], f.idx[1]);
                sign = -sign;
            }
        } else if (skew_kernel(f.kind)) {
            if (f.pt[0] == f.pt[1]) return 0;
            if (f.pt[0] > f.pt[1]) {
                std::swap(f.pt[0], f.pt[1]);
                sign = -sign;
            }
        }
    }
    return sign;
}

struct Labels {
    std::vector<std::vector<int>> point_groups;  // bound points, classes in invariant order
    std::vector<std::vector<int>> index_groups;  // contracted indices, likewise
};

// How a label is used, independent of the label values themselves.
using Usage = std::vector<std::array<int, 4>>;

Labels collect_labels(const Monomial& m) {
    std::map<int, int> uses;
    for (const auto& f : m.factors)
        for (int a : f.idx)
            if (a >= 0) ++uses[a];
    std::map<int, int> domain;
    for (const auto& b : m.binders) domain[b.point] = b.domain;

    std::map<int, Usage> pt_use, idx_use;
    for (const auto& f : m.factors) {
        const int k = static_cast<int>(f.kind);
        for (int s = 0; s < 2; ++s) {
            if (f.pt[s] >= 0 && domain.count(f.pt[s])) {
                int other = f.pt[1 - s] < 0 ? -2 : domain.count(f.pt[1 - s]) ? domain[f.pt[1 - s]] : -1;
                pt_use[f.pt[s]].push_back({k, f.d, skew_kernel(f.kind) ? 0 : s, other});
            }
            if (f.idx[s] >= 0 && uses[f.idx[s]] >= 2) {
                int at = f.pt[0] < 0 ? -2 : domain.count(f.pt[0]) ? domain[f.pt[0]] : -1;
                idx_use[f.idx[s]].push_back({k, f.d, f.kind == Kind::Alpha ? 0 : s, at});
            }
        }
    }
    std::map<std::pair<int, Usage>, std::vector<int>> pts;
    for (const auto& b : m.binders) {
        Usage u = pt_use[b.point];
        std::sort(u.begin(), u.end());
        pts[{b.domain, u}].push_back(b.point);
    }
    std::map<Usage, std::vector<int>> idx;
    for (auto& [a, u] : idx_use) {
        std::sort(u.begin(), u.end());
        idx[u].push_back(a);
    }
    Labels L;
    for (auto& [key, v] : pts) L.point_groups.push_back(v);
    for (auto& [key, v] : idx) L.index_groups.push_back(v);
    return L;
}

struct Candidate {
    int sign = 0;
    Monomial mono;
};

// Applies one relabeling and sorts; sign 0 means the term vanishes.
Candidate relabel_and_sort(const Monomial& m, const std::map<int, int>& pmap, const std::map<int, int>& imap) {
    Candidate c;
    c.mono.hbar = m.hbar;
    auto mp = [&](int p) {
        auto it = pmap.find(p);
        return it == pmap.end() ? p : it->second;
    };
    auto mi = [&](int a) {
        auto it = imap.find(a);
        return it == imap.end() ? a : it->second;
    };
    c.mono.binders.reserve(m.binders.size());
    for (const auto& b : m.binders) c.mono.binders.push_back({mp(b.point), b.domain});
    c.mono.factors.reserve(m.factors.size());
    for (const auto& f : m.factors) {
        Factor g = f;
        for (auto& a : g.idx)
            if (a >= 0) a = mi(a);
        for (auto& p : g.pt)
            if (p >= 0) p = mp(p);
        c.mono.factors.push_back(g);
    }
    int sign = normalize_factors(c.mono.factors);
    if (sign == 0) return c;
    sign *= koszul_sort(
        c.mono.binders, [](const Binder& a, const Binder& b) { return a.point < b.point; },
        [](const Binder& b) { return domain_odd(b.domain); });
    sign *= koszul_sort(
        c.mono.factors, [](const Factor& a, const Factor& b) { return a < b; },
        [](const Factor& f) { return f.parity(); });
    for (std::size_t i = 1; i < c.mono.factors.size(); ++i)
        if (c.mono.factors[i] == c.mono.factors[i - 1] && c.mono.factors[i].parity()) return c;
    c.sign = sign;
    return c;
}

}  // namespace

std::optional<Term> canonicalize(const Term& t) {
    if (t.coef.is_zero()) return std::nullopt;
    const Monomial& m = t.mono;
    {
        std::set<int> seen;
        for (const auto& b : m.binders)
            if (!seen.insert(b.point).second) throw std::logic_error("canonicalize: point bound twice");
    }
    Labels L = collect_labels(m);

    // Canonical labels: classes in order, consecutive from 0; every permutation within a class.
    std::vector<std::vector<int>> perms = L.point_groups, iperms = L.index_groups;
    std::optional<Candidate> best;
    bool zero = false;
    std::map<int, int> pmap, imap;

    std::function<void(std::size_t)> over_indices = [&](std::size_t g) {
        if (zero) return;
        if (g < iperms.size()) {
            std::sort(iperms[g].begin(), iperms[g].end());
            do {
                over_indices(g + 1);
                if (zero) return;
            } while (std::next_permutation(iperms[g].begin(), iperms[g].end()));
            return;
        }
        int next = 0;
        for (const auto& grp : iperms)
            for (int a : grp) imap[a] = next++;
        Candidate c = relabel_and_sort(m, pmap, imap);
        if (c.sign == 0) {
            zero = true;
            return;
        }
        if (!best || c.mono < best->mono) {
            best = std::move(c);
        } else if (c.mono == best->mono && c.sign != best->sign) {
            zero = true;
        }
    };
    std::function<void(std::size_t)> over_groups = [&](std::size_t g) {
        if (zero) return;
        if (g < perms.size()) {
            std::sort(perms[g].begin(), perms[g].end());
            do {
                over_groups(g + 1);
                if (zero) return;
            } while (std::next_permutation(perms[g].begin(), perms[g].end()));
            return;
        }
        int next = 0;
        for (const auto& grp : perms)
            for (int p : grp) pmap[p] = next++;
        over_indices(0);
    };
    over_groups(0);
    if (zero || !best) return std::nullopt;
    Term out;
    out.coef = best->sign > 0 ? t.coef : -t.coef;
    out.mono = std::move(best->mono);
    return out;
}

void GradedExpr::add_canonical(const Monomial& m, const Gauss& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

void GradedExpr::add(const Term& t) {
    if (auto c = canonicalize(t)) add_canonical(c->mono, c->coef);
}

GradedExpr& GradedExpr::operator+=(const GradedExpr& o) {
    for (const auto& [m, c] : o.terms_) add_canonical(m, c);
    return *this;
}

GradedExpr& GradedExpr::operator-=(const GradedExpr& o) {
    for (const auto& [m, c] : o.terms_) add_canonical(m, -c);
    return *this;
}

GradedExpr GradedExpr::scaled(const Scalar& s) const {
    GradedExpr r;
    if (s.is_zero()) return r;
    for (const auto& [m, c] : terms_) {
        Monomial n = m;
        n.hbar += s.hbar;
        r.add_canonical(n, c * s.c);
    }
    return r;
}

std::vector<Term> GradedExpr::term_list() const {
    std::vector<Term> out;
    for (const auto& [m, c] : terms_) out.emplace_back(c, m);
    return out;
}

namespace {

std::string idx_name(int a) {
    if (a >= kFreeLabel) return "f" + std::to_string(a - kFreeLabel);
    if (a < 26) return std::string(1, static_cast<char>('a' + a));
    return "i" + std::to_string(a);
}

std::string pt_name(int p) {
    if (p >= kFreeLabel) return "u" + std::to_string(p - kFreeLabel);
    return "p" + std::to_string(p);
}

std::string factor_str(const Factor& f) {
    std::string d = f.d ? "d" : "";
    auto pts = [&]() {
        std::string s = "(" + pt_name(f.pt[0]);
        if (f.pt[1] >= 0) s += "," + pt_name(f.pt[1]);
        return s + ")";
    };
    switch (f.kind) {
        case Kind::Alpha: return "alpha[" + idx_name(f.idx[0]) + "," + idx_name(f.idx[1]) + "]";
        case Kind::Dx: return "dx[" + idx_name(f.idx[0]) + "]";
        case Kind::Z: return "z[" + idx_name(f.idx[0]) + "]";
        case Kind::ZDag: return "zd[" + idx_name(f.idx[0]) + "]";
        case Kind::T: return "t";
        case Kind::E: return d + "E[" + idx_name(f.idx[0]) + "]" + pts();
        case Kind::X: return d + "X[" + idx_name(f.idx[0]) + "]" + pts();
        case Kind::Zeta: return d + "zeta" + pts();
        case Kind::ZetaHat: return d + "zetahat" + pts();
        case Kind::Tau: return d + "tau" + pts();
        case Kind::Kappa: return d + "kappa" + pts();
        case Kind::DeltaPt: return "delta" + pts();
        case Kind::VarE: return "varE[" + idx_name(f.idx[0]) + "]" + pts();
        case Kind::VarX: return "varX[" + idx_name(f.idx[0]) + "]" + pts();
        case Kind::DeltaS: return "varS";
        case Kind::PiAlpha: return "pialpha";
    }
    return "?";
}

}  // namespace

std::string term_str(const Gauss& c, const Monomial& m) {
    std::string s = Scalar(c, m.hbar).str() + " |";
    for (const auto& f : m.factors) s += " " + factor_str(f);
    s += " |";
    for (const auto& b : m.binders) s += " " + pt_name(b.point) + ":" + domain_name(b.domain);
    return s;
}

std::vector<std::string> GradedExpr::lines() const {
    std::vector<std::string> out;
    for (const auto& [m, c] : terms_) out.push_back(term_str(c, m));
    return out;
}

std::string GradedExpr::str() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (const auto& l : lines()) s += l + "\n";
    return s;
}

}  // namespace dqw
