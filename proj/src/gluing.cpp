#include "dqw/gluing.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace dqw {

namespace {

Scalar inv_factorial(int n) {
    Rational f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return Scalar(Gauss(Rational(1) / f));
}

std::vector<int> counts_of(const std::vector<int>& tuple, int dim) {
    std::vector<int> c(dim, 0);
    for (int i : tuple) ++c[i - 1];
    return c;
}

bool has_derivative(const Poly& f, const std::vector<int>& counts) {
    for (const auto& [e, c] : f.terms()) {
        bool ok = true;
        for (int i = 1; i <= f.dim() && ok; ++i) ok = e[Poly::slot(f.dim(), Var::X, i)] >= counts[i - 1];
        if (ok) return true;
    }
    return false;
}

// Every nondecreasing index tuple of length <= max_len; the X-slots on one interval commute.
void each_multiset(int dim, int max_len, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> t;
    std::function<void(int)> rec = [&](int from) {
        fn(t);
        if (static_cast<int>(t.size()) == max_len) return;
        for (int i = from; i <= dim; ++i) {
            t.push_back(i);
            rec(i);
            t.pop_back();
        }
    };
    rec(1);
}

// (-i hbar)^n / K! for the multiset K: the n!/K! orderings of the symmetric series merged.
WickTerm series_term(const std::vector<int>& t, const std::vector<int>& counts, int owner) {
    WickTerm w;
    Scalar c = pow(Scalar::minus_i_hbar(), static_cast<int>(t.size()));
    for (int k : counts) c = c * inv_factorial(k);
    w.coef = c;
    for (int i : t) w.slots.push_back({i, owner});
    w.derivs = {counts};
    return w;
}

void check_compatible(const WickSeries& a, const WickSeries& b) {
    if (a.dim != b.dim) throw std::invalid_argument("gluing: dimension mismatch");
    if (a.order != b.order) throw std::invalid_argument("gluing: order mismatch");
    for (int i = 1; i <= a.dim; ++i)
        for (int j = 1; j <= a.dim; ++j)
            if (a.alpha(i, j) != b.alpha(i, j)) throw std::invalid_argument("gluing: Poisson tensor mismatch");
}

int delta_owner(const WickSeries& s) {
    for (std::size_t o = 0; o < s.obs.size(); ++o)
        if (s.obs[o].delta) return static_cast<int>(o);
    return -1;
}

}  // namespace

Scalar cross_kernel() { return Scalar(Gauss(Rational(-1, 2))); }

CapState cap_function(const Poly& f, const PoissonTensor& alpha, int order) {
    if (f.contains(Var::Z) || f.contains(Var::ZDag) || f.contains(Var::XTilde))
        throw std::invalid_argument("cap_function: observable must be a polynomial in x");
    if (alpha.dim() != f.dim()) throw std::invalid_argument("cap_function: dimension mismatch");
    CapState cap;
    cap.label = f.str();
    WickSeries& s = cap.series;
    s.dim = f.dim();
    s.order = order;
    s.alpha = alpha;
    s.obs.push_back({false, f.with_order(order)});
    each_multiset(s.dim, f.max_degree(Var::X), [&](const std::vector<int>& t) {
        std::vector<int> c = counts_of(t, s.dim);
        if (!has_derivative(f, c)) return;
        s.terms.push_back(series_term(t, c, 0));
    });
    return cap;
}

CapState cap_delta(int dim, const PoissonTensor& alpha, int order) {
    if (alpha.dim() != dim) throw std::invalid_argument("cap_delta: dimension mismatch");
    CapState cap;
    cap.label = "delta";
    cap.prefactor = pow(Scalar::i_over_hbar(), dim);
    WickSeries& s = cap.series;
    s.dim = dim;
    s.order = order;
    s.alpha = alpha;
    s.obs.push_back({true, Poly(dim, order)});
    // each delta slot needs its own cross contraction, which costs one power of hbar
    each_multiset(dim, alpha.is_zero() ? 0 : order,
                  [&](const std::vector<int>& t) { s.terms.push_back(series_term(t, counts_of(t, dim), 0)); });
    return cap;
}

WickSeries wick_glue(const WickSeries& a, const WickSeries& b, const GlueOptions& opt) {
    check_compatible(a, b);
    WickSeries out;
    out.dim = a.dim;
    out.order = a.order;
    out.alpha = a.alpha;
    out.obs = a.obs;
    out.obs.insert(out.obs.end(), b.obs.begin(), b.obs.end());
    const int shift = static_cast<int>(a.obs.size());
    const Scalar vertex = Scalar::i_over_hbar() * cross_kernel();

    using Key = std::pair<std::vector<Slot>, std::vector<std::vector<int>>>;
    std::map<Key, Scalar> acc;

    for (const auto& ta : a.terms) {
        for (const auto& tb : b.terms) {
            std::vector<Slot> pos = ta.slots;
            std::vector<int> side(ta.slots.size(), 0);
            for (Slot s : tb.slots) {
                s.owner += shift;
                pos.push_back(s);
                side.push_back(1);
            }
            std::vector<std::vector<int>> derivs = ta.derivs;
            derivs.insert(derivs.end(), tb.derivs.begin(), tb.derivs.end());

            const int n = static_cast<int>(pos.size());
            std::vector<bool> used(n, false);
            std::vector<Slot> left;
            // every slot carries one power of hbar and every contraction removes one, so the
            // final power is the number of contractions made so far
            const int budget = out.order - (ta.coef.hbar + tb.coef.hbar - n);
            if (budget < 0) continue;
            int pairs = 0;
            std::function<void(int, Scalar)> rec = [&](int p, Scalar coef) {
                while (p < n && used[p]) ++p;
                if (p == n) {
                    int free_slots = 0;
                    for (const Slot& s : left) free_slots += !out.obs[s.owner].delta;
                    if (coef.hbar - free_slots > out.order) return;
                    std::vector<Slot> key_slots = left;
                    std::sort(key_slots.begin(), key_slots.end());
                    Key k{key_slots, derivs};
                    auto [it, fresh] = acc.try_emplace(k, coef);
                    if (!fresh) it->second.c += coef.c;
                    return;
                }
                used[p] = true;
                // delta slots are resummed into the shifted argument unless contracted
                if (!out.obs[pos[p].owner].delta) {
                    left.push_back(pos[p]);
                    rec(p + 1, coef);
                    left.pop_back();
                }
                for (int q = p + 1; q < n && pairs < budget; ++q) {
                    if (used[q] || (side[p] == side[q] && !opt.same_side)) continue;
                    Rational w = a.alpha(pos[p].index, pos[q].index);
                    // one interval: the slots are symmetric, so both diagrams of the pair enter
                    if (side[p] == side[q]) w = (w + a.alpha(pos[q].index, pos[p].index)) / 2;
                    if (w == 0 && !opt.same_side) continue;
                    used[q] = true;
                    ++pairs;
                    rec(p + 1, coef * vertex * Scalar(Gauss(w)));
                    --pairs;
                    used[q] = false;
                }
                used[p] = false;
            };
            rec(0, ta.coef * tb.coef);
        }
    }
    for (auto& [k, c] : acc)
        if (!c.is_zero()) out.terms.push_back({c, k.first, k.second});
    return out;
}

CapState glue_triple_L3(const CapState& f, const CapState& g, const GlueOptions& opt) {
    if (delta_owner(f.series) >= 0 || delta_owner(g.series) >= 0)
        throw std::invalid_argument("glue_triple_L3: caps must carry polynomial observables");
    CapState out;
    out.label = "(" + f.label + ")(" + g.label + ")";
    out.prefactor = f.prefactor * g.prefactor;
    out.series = wick_glue(f.series, g.series, opt);
    return out;
}

GluedDensity glue_pair(const CapState& delta, const CapState& cap) {
    if (delta_owner(delta.series) != 0 || delta.series.obs.size() != 1)
        throw std::invalid_argument("glue_pair: first argument must be the delta cap");
    if (delta_owner(cap.series) >= 0) throw std::invalid_argument("glue_pair: polarization mismatch");
    WickSeries s = wick_glue(cap.series, delta.series);
    const int d = s.dim, downer = delta_owner(s);

    GluedDensity g;
    g.dim = d;
    g.order = s.order;
    g.normalization = delta.prefactor * cap.prefactor;
    std::map<std::pair<int, std::vector<int>>, Poly> cache;
    auto derivative = [&](int o, const std::vector<int>& c) -> const Poly& {
        auto it = cache.find({o, c});
        if (it == cache.end()) it = cache.emplace(std::make_pair(o, c), s.obs[o].f.derivative(c)).first;
        return it->second;
    };
    for (const auto& t : s.terms) {
        // uncontracted slots meet the (i/hbar) z source of the delta cap
        Scalar c = t.coef * pow(Scalar::i_over_hbar(), static_cast<int>(t.slots.size()));
        if (c.hbar < 0) throw std::logic_error("glue_pair: negative hbar power");
        if (c.hbar > s.order) continue;
        Poly v = Poly::scalar(d, s.order, c);
        for (int o = 0; o < static_cast<int>(s.obs.size()) && !v.is_zero(); ++o)
            if (o != downer) v *= derivative(o, t.derivs[o]);
        for (const Slot& sl : t.slots) v *= Poly::variable(d, s.order, Var::Z, sl.index);
        if (v.is_zero()) continue;
        auto [it, fresh] = g.parts.try_emplace(t.derivs[downer], v);
        if (!fresh) it->second += v;
    }
    std::erase_if(g.parts, [](const auto& kv) { return kv.second.is_zero(); });
    return g;
}

GluedDensity bv_integrate_z(const GluedDensity& g) {
    if (!g.has_exponential) throw std::invalid_argument("bv_integrate_z: missing residual exponential");
    GluedDensity r = g;
    for (auto& [j, p] : r.parts) {
        if (p.contains(Var::ZDag)) throw std::invalid_argument("bv_integrate_z: unexpected z-dagger dependence");
        p = p.zero_block(Var::Z);
    }
    std::erase_if(r.parts, [](const auto& kv) { return kv.second.is_zero(); });
    r.normalization = r.normalization * pow(Scalar::minus_i_hbar(), g.dim);
    r.has_exponential = false;
    r.top_form = true;
    return r;
}

Poly integrate_target(const GluedDensity& g) {
    if (!g.top_form) throw std::invalid_argument("integrate_target: not a top density with a delta factor");
    Poly acc(g.dim, g.order);
    for (const auto& [j, p] : g.parts) {
        int n = 0;
        for (int k : j) n += k;
        Poly v = p.derivative(j);
        acc += (n % 2) ? -v : v;
    }
    return acc.scaled(g.normalization).rename_block(Var::X, Var::XTilde);
}

Poly moyal_via_gluing(const Poly& f, const Poly& g, const PoissonTensor& alpha, int order) {
    CapState cf = cap_function(f, alpha, order), cg = cap_function(g, alpha, order);
    CapState composite = glue_triple_L3(cf, cg);
    GluedDensity dens = glue_pair(cap_delta(f.dim(), alpha, order), composite);
    return integrate_target(bv_integrate_z(dens));
}

Poly at_point(const Poly& p, const std::vector<Rational>& x) {
    std::vector<Gauss> v(x.begin(), x.end());
    return p.evaluate_block(Var::XTilde, v);
}

std::string GluedDensity::str() const {
    if (parts.empty()) return "0";
    std::string s = normalization.str() + " * [";
    bool first = true;
    for (const auto& [j, p] : parts) {
        if (!first) s += " + ";
        first = false;
        std::string d;
        for (std::size_t i = 0; i < j.size(); ++i)
            for (int k = 0; k < j[i]; ++k) d += "d" + std::to_string(i + 1);
        s += (d.empty() ? "" : d + " ") + (top_form ? "delta(x-xt)" : "delta(x+z-xt)") + " * (" + p.str() + ")";
    }
    s += "]";
    if (has_exponential) s += " * exp((i/hbar) zd.dx)";
    if (top_form) s += " d^dx";
    return s;
}

std::vector<Poly> gluing_batch(const std::vector<GlueJob>& jobs, const PoissonTensor& alpha, int order, Exec exec) {
    std::vector<Poly> out(jobs.size(), Poly(1, 0));
    const long n = static_cast<long>(jobs.size());
    auto run = [&](long k) {
        out[k] = at_point(moyal_via_gluing(jobs[k].f, jobs[k].g, alpha, order), jobs[k].point);
    };
    if (exec == Exec::Serial) {
        for (long k = 0; k < n; ++k) run(k);
    } else {
#pragma omp parallel for schedule(dynamic, 1)
        for (long k = 0; k < n; ++k) run(k);
    }
    return out;
}

}  // namespace dqw
