#include "dqw/graded.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <random>
#include <set>

namespace dqw {

namespace {

// Orientation constants of the boundary strata.
constexpr int kStokesSign = -1; // d(boundary kernel) against the side integral of two propagators
constexpr int kJumpSign = 1;    // diagonal of a configuration space on one interval
constexpr int kBulkSign = 1;    // bulk point reaching the X-polarized side

int binder_pos(const Monomial& m, int point) {
    for (std::size_t i = 0; i < m.binders.size(); ++i)
        if (m.binders[i].point == point) return static_cast<int>(i);
    return -1;
}

int max_label(const Monomial& m) {
    int top = -1;
    for (const auto& b : m.binders)
        if (b.point < kFreeLabel) top = std::max(top, b.point);
    for (const auto& f : m.factors)
        for (int p : f.pt)
            if (p < kFreeLabel) top = std::max(top, p);
    return top;
}

// Moves binder i to the end; returns the Koszul sign.
int binder_to_end(Monomial& m, std::size_t i) {
    int sign = 1;
    bool odd = domain_odd(m.binders[i].domain);
    for (std::size_t k = i + 1; k < m.binders.size(); ++k)
        if (odd && domain_odd(m.binders[k].domain)) sign = -sign;
    Binder b = m.binders[i];
    m.binders.erase(m.binders.begin() + static_cast<long>(i));
    m.binders.push_back(b);
    return sign;
}

// Moves factor j to the front; returns the Koszul sign.
int factor_to_front(Monomial& m, std::size_t j) {
    int sign = 1;
    bool odd = m.factors[j].parity();
    for (std::size_t k = 0; k < j; ++k)
        if (odd && m.factors[k].parity()) sign = -sign;
    Factor f = m.factors[j];
    m.factors.erase(m.factors.begin() + static_cast<long>(j));
    m.factors.insert(m.factors.begin(), f);
    return sign;
}

void substitute_point(Monomial& m, int from, int to) {
    for (auto& f : m.factors)
        for (auto& p : f.pt)
            if (p == from) p = to;
}

// Removes the binder of `point` together with factor j, after bringing them together:
// the binder last among binders, the factor first among factors.
int integrate_out(Monomial& m, int point, std::size_t j) {
    int pos = binder_pos(m, point);
    int sign = binder_to_end(m, static_cast<std::size_t>(pos));
    sign *= factor_to_front(m, j);
    m.binders.pop_back();
    m.factors.erase(m.factors.begin());
    return sign;
}

Term signed_term(const Term& t, int sign, Monomial m) {
    return Term(sign > 0 ? t.coef : -t.coef, std::move(m));
}

// One local rewrite; nullopt when no rule applies.
std::optional<std::vector<Term>> local_step(const Term& t, const RewriteOptions& opt, std::mt19937_64* rng) {
    const Monomial& m = t.mono;
    // Closed kernels and top forms on an interval.
    for (const auto& f : m.factors)
        if (f.d && (f.kind == Kind::Zeta || f.kind == Kind::Tau)) return std::vector<Term>{};

    // Boundary-kernel Stokes.
    for (std::size_t j = 0; j < m.factors.size(); ++j) {
        const Factor& f = m.factors[j];
        if (f.kind != Kind::ZetaHat || !f.d) continue;
        int p = f.pt[0], q = f.pt[1];
        if (opt.stokes == StokesKind::BoundaryIntegral) {
            Monomial n = m;
            int s = max_label(m) + 1;
            n.factors[j] = Factor::zeta(s, p);
            n.factors.insert(n.factors.begin() + static_cast<long>(j) + 1, Factor::zeta(s, q));
            n.binders.push_back({s, kSide});
            return std::vector<Term>{signed_term(t, kStokesSign, std::move(n))};
        }
        Monomial a = m, b = m;
        a.factors[j] = Factor::tau(p);
        b.factors[j] = Factor::tau(q);
        return std::vector<Term>{signed_term(t, 1, std::move(a)), signed_term(t, -1, std::move(b))};
    }

    // Point deltas.
    std::vector<std::size_t> deltas;
    for (std::size_t j = 0; j < m.factors.size(); ++j)
        if (m.factors[j].kind == Kind::DeltaPt &&
            (binder_pos(m, m.factors[j].pt[0]) >= 0 || binder_pos(m, m.factors[j].pt[1]) >= 0))
            deltas.push_back(j);
    if (!deltas.empty()) {
        std::size_t j = deltas.front();
        if (rng) j = deltas[std::uniform_int_distribution<std::size_t>(0, deltas.size() - 1)(*rng)];
        Monomial n = m;
        int sign = 1;
        int keep = n.factors[j].pt[0], drop = n.factors[j].pt[1];
        int pk = binder_pos(n, keep), pd = binder_pos(n, drop);
        bool swap = pd < 0 || (rng && pk >= 0 && ((*rng)() & 1));
        if (swap) {
            std::swap(keep, drop);
            std::swap(pk, pd);
            std::swap(n.factors[j].pt[0], n.factors[j].pt[1]);
            sign = -sign;
        }
        if (pk >= 0 && n.binders[static_cast<std::size_t>(pk)].domain != n.binders[static_cast<std::size_t>(pd)].domain)
            return std::vector<Term>{};
        sign *= integrate_out(n, drop, j);
        substitute_point(n, drop, keep);
        return std::vector<Term>{signed_term(t, sign, std::move(n))};
    }

    // Bound points: unused ones kill the term, side points seen by one kernel only integrate out.
    for (const auto& b : m.binders) {
        std::vector<std::size_t> users;
        for (std::size_t j = 0; j < m.factors.size(); ++j)
            if (m.factors[j].pt[0] == b.point || m.factors[j].pt[1] == b.point) users.push_back(j);
        if (users.empty()) return std::vector<Term>{};
        if (b.domain != kSide || users.size() != 1) continue;
        const Factor& f = m.factors[users[0]];
        if (f.pt[0] != b.point) continue;
        if (f.kind == Kind::Kappa) return std::vector<Term>{};
        if (f.kind == Kind::Zeta && !f.d) {
            Monomial n = m;
            int sign = integrate_out(n, b.point, users[0]);
            return std::vector<Term>{signed_term(t, sign, std::move(n))};
        }
    }
    return std::nullopt;
}

struct Budget {
    std::size_t limit;
    std::size_t used = 0;
    void spend(std::size_t n = 1) {
        used += n;
        if (used > limit) throw BudgetExceeded("rewrite: rule budget of " + std::to_string(limit) + " exceeded");
    }
};

GradedExpr local_normalize(const std::vector<Term>& input, const RewriteOptions& opt, std::mt19937_64* rng,
                           Budget& budget, RewriteStats* stats) {
    GradedExpr out;
    std::deque<Term> work(input.begin(), input.end());
    while (!work.empty()) {
        Term t = std::move(work.front());
        work.pop_front();
        auto c = canonicalize(t);
        if (!c) continue;
        auto next = local_step(*c, opt, rng);
        if (!next) {
            out.add_canonical(c->mono, c->coef);
            continue;
        }
        budget.spend();
        if (stats) ++stats->local_steps;
        for (auto& n : *next) work.push_back(std::move(n));
    }
    return out;
}

// Term order for pivots: more differentials first, then size, then the monomial.
struct OrderKey {
    int d;
    std::size_t factors;
    std::size_t binders;
    Monomial mono;
    explicit OrderKey(Monomial m)
        : d(m.d_count()), factors(m.factors.size()), binders(m.binders.size()), mono(std::move(m)) {}
    bool operator<(const OrderKey& o) const {
        if (d != o.d) return d < o.d;
        if (factors != o.factors) return factors < o.factors;
        if (binders != o.binders) return binders < o.binders;
        return mono < o.mono;
    }
};

using Row = std::map<OrderKey, Gauss>;

void row_add(Row& r, const OrderKey& k, const Gauss& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = r.try_emplace(k, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) r.erase(it);
    }
}

class Echelon {
public:
    void reduce(Row& row) const {
        std::optional<OrderKey> upper;
        while (true) {
            auto it = upper ? row.lower_bound(*upper) : row.end();
            if (it == row.begin()) return;
            --it;
            OrderKey key = it->first;
            auto p = pivots_.find(key);
            if (p != pivots_.end()) {
                Gauss c = it->second;
                for (const auto& [k, v] : p->second) row_add(row, k, -(c * v));
            }
            upper = key;
        }
    }

    void insert(Row row) {
        reduce(row);
        if (row.empty()) return;
        Gauss lead = row.rbegin()->second;
        for (auto& [k, v] : row) v /= lead;
        OrderKey key = row.rbegin()->first;
        pivots_.emplace(std::move(key), std::move(row));
    }

    std::size_t size() const { return pivots_.size(); }

private:
    std::map<OrderKey, Row> pivots_;
};

Monomial strip_hbar(Monomial m) {
    m.hbar = 0;
    return m;
}

// Stokes for the whole integration domain of `g`: the total differential of the integrand
// against the diagonal and bulk-to-side boundary strata. Interval endpoints contribute nothing.
std::vector<Term> stokes_relation(const Monomial& g) {
    std::vector<Term> out;
    int sign = 1;
    for (std::size_t j = 0; j < g.factors.size(); ++j) {
        const Factor& f = g.factors[j];
        if (f.points() > 0 && !f.d && f.kind != Kind::DeltaPt) {
            Monomial n = g;
            n.factors[j].d = 1;
            out.emplace_back(Gauss(sign), std::move(n));
        }
        if (f.parity()) sign = -sign;
    }
    for (std::size_t j = 0; j < g.factors.size(); ++j) {
        const Factor& f = g.factors[j];
        if (f.kind != Kind::ZetaHat || f.d) continue;
        int pp = binder_pos(g, f.pt[0]), pq = binder_pos(g, f.pt[1]);
        if (pp < 0 || pq < 0) continue;
        int dom = g.binders[static_cast<std::size_t>(pp)].domain;
        if (dom <= kSide || dom != g.binders[static_cast<std::size_t>(pq)].domain) continue;
        Monomial n = g;
        n.factors.erase(n.factors.begin() + static_cast<long>(j));
        int s = binder_to_end(n, static_cast<std::size_t>(pp));
        n.binders.pop_back();
        substitute_point(n, f.pt[0], f.pt[1]);
        out.emplace_back(Gauss(-s * kJumpSign), std::move(n));
    }
    for (std::size_t i = 0; i < g.binders.size(); ++i) {
        if (g.binders[i].domain != kBulk) continue;
        Monomial n = g;
        binder_to_end(n, i);
        n.binders.back().domain = kSide;
        out.emplace_back(Gauss(-kBulkSign), std::move(n));
    }
    return out;
}

}  // namespace

std::size_t default_rule_budget() {
    if (const char* env = std::getenv("DQW_RULE_BUDGET")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && v > 0) return static_cast<std::size_t>(v);
    }
    return 2'000'000;
}

GradedExpr apply_local_rules(const GradedExpr& e, const RewriteOptions& opt, RewriteStats* stats) {
    Budget budget{opt.budget ? opt.budget : default_rule_budget()};
    std::mt19937_64 gen(opt.shuffle_seed.value_or(0));
    return local_normalize(e.term_list(), opt, opt.shuffle_seed ? &gen : nullptr, budget, stats);
}

GradedExpr rewrite_normal_form(const GradedExpr& e, const RewriteOptions& opt, RewriteStats* stats) {
    Budget budget{opt.budget ? opt.budget : default_rule_budget()};
    std::mt19937_64 gen(opt.shuffle_seed.value_or(0));
    std::mt19937_64* rng = opt.shuffle_seed ? &gen : nullptr;
    GradedExpr local = local_normalize(e.term_list(), opt, rng, budget, stats);
    if (local.is_zero()) return local;

    // Close the set of monomials under preimages of differentiated fields and kernels.
    std::set<Monomial> seen;
    std::set<Monomial> preimages;
    std::deque<Monomial> queue;
    std::vector<Row> rows;
    for (const auto& [m, c] : local.terms())
        if (seen.insert(strip_hbar(m)).second) queue.push_back(strip_hbar(m));
    while (!queue.empty()) {
        Monomial m = std::move(queue.front());
        queue.pop_front();
        for (std::size_t j = 0; j < m.factors.size(); ++j) {
            if (!m.factors[j].d) continue;
            Monomial g = m;
            g.factors[j].d = 0;
            auto cg = canonicalize(Term(Gauss(1), g));
            if (!cg || !preimages.insert(cg->mono).second) continue;
            budget.spend();
            GradedExpr rel = local_normalize(stokes_relation(cg->mono), opt, rng, budget, stats);
            if (rel.is_zero()) continue;
            Row row;
            for (const auto& [rm, rc] : rel.terms()) {
                row_add(row, OrderKey(rm), rc);
                if (seen.insert(rm).second) queue.push_back(rm);
            }
            rows.push_back(std::move(row));
        }
    }
    if (rng) std::shuffle(rows.begin(), rows.end(), *rng);
    Echelon ech;
    for (auto& r : rows) {
        budget.spend();
        ech.insert(std::move(r));
    }
    if (stats) {
        stats->relations += ech.size();
        stats->closure_terms += seen.size();
    }

    std::map<int, Row> by_hbar;
    for (const auto& [m, c] : local.terms()) row_add(by_hbar[m.hbar], OrderKey(strip_hbar(m)), c);
    GradedExpr out;
    for (auto& [h, row] : by_hbar) {
        ech.reduce(row);
        for (const auto& [k, c] : row) {
            Monomial m = k.mono;
            m.hbar = h;
            out.add_canonical(m, c);
        }
    }
    return out;
}

}  // namespace dqw
