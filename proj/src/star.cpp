#include "dqw/star.hpp"

#include <functional>

namespace dqw {

namespace {

struct Pair {
    int i, j;
    Rational a;
};

std::vector<Pair> nonzero_pairs(const PoissonTensor& alpha) {
    std::vector<Pair> out;
    for (int i = 1; i <= alpha.dim(); ++i)
        for (int j = 1; j <= alpha.dim(); ++j)
            if (sgn(alpha(i, j)) != 0) out.push_back({i, j, alpha(i, j)});
    return out;
}

void check_dims(const Poly& f, const Poly& g, const PoissonTensor& alpha) {
    if (f.dim() != g.dim() || f.dim() != alpha.dim()) throw AlgebraError("dimension mismatch");
}

}  // namespace

Poly moyal_product(const Poly& f0, const Poly& g0, const PoissonTensor& alpha, int order) {
    check_dims(f0, g0, alpha);
    const Poly f = f0.with_order(order);
    const Poly g = g0.with_order(order);
    const auto pairs = nonzero_pairs(alpha);
    Poly result = f * g;

    // Multisets of pairs, visited in non-decreasing pair index; derivatives are carried
    // along the path so a vanishing branch is cut early.
    std::function<void(std::size_t, int, const Poly&, const Poly&, const Gauss&)> walk =
        [&](std::size_t start, int n, const Poly& df, const Poly& dg, const Gauss& coef) {
            if (n == order) return;
            for (std::size_t p = start; p < pairs.size(); ++p) {
                Poly cf = df, cg = dg;
                Gauss c = coef;
                for (int m = 1; n + m <= order; ++m) {
                    cf = cf.derivative(pairs[p].i);
                    cg = cg.derivative(pairs[p].j);
                    if (cf.is_zero() || cg.is_zero()) break;
                    c = c * Gauss(pairs[p].a) / Gauss(m);
                    result += (cf * cg).scaled(Scalar(c) * pow(Scalar::eps(), n + m));
                    walk(p + 1, n + m, cf, cg, c);
                }
            }
        };
    walk(0, 0, f, g, Gauss(1));
    return result;
}

Poly star_bracket(const Poly& f, const Poly& g, const PoissonTensor& alpha) {
    int order = std::max(f.order(), g.order()) + 1;
    Poly comm = moyal_product(f, g, alpha, order) - moyal_product(g, f, alpha, order);
    // divide by eps = i*hbar/2, then drop hbar
    return comm.hbar_coefficient(1).scaled(Gauss(Rational(0), Rational(-2))).with_order(std::max(f.order(), g.order()));
}

Poly check_associativity(const Poly& f, const Poly& g, const Poly& h, const PoissonTensor& alpha, int order) {
    Poly left = moyal_product(moyal_product(f, g, alpha, order), h, alpha, order);
    Poly right = moyal_product(f, moyal_product(g, h, alpha, order), alpha, order);
    return left - right;
}

std::string AdmissibleGraph::str() const {
    std::string s = "[";
    for (std::size_t k = 0; k < edges.size(); ++k) {
        if (k) s += ",";
        s += "(";
        s += edges[k][0] == 0 ? "F" : "G";
        s += edges[k][1] == 0 ? "F" : "G";
        s += ")";
    }
    return s + "]";
}

std::vector<AdmissibleGraph> enumerate_graphs(int n) {
    if (n < 0) throw AlgebraError("graph order must be >= 0");
    std::vector<AdmissibleGraph> out;
    const std::size_t count = std::size_t{1} << (2 * n);
    out.reserve(count);
    for (std::size_t code = 0; code < count; ++code) {
        AdmissibleGraph g;
        for (int k = 0; k < n; ++k) {
            std::size_t digit = (code >> (2 * (n - 1 - k))) & 3u;
            g.edges.push_back({static_cast<int>(digit >> 1), static_cast<int>(digit & 1u)});
        }
        out.push_back(std::move(g));
    }
    return out;
}

Poly apply_graph_operator(const AdmissibleGraph& graph, const PoissonTensor& alpha, const Poly& f, const Poly& g) {
    check_dims(f, g, alpha);
    for (const auto& e : graph.edges)
        for (int t : e)
            if (t != 0 && t != 1) throw AlgebraError("graph is not admissible for a constant structure");
    const auto pairs = nonzero_pairs(alpha);
    Poly result(f.dim(), f.order());
    std::function<void(std::size_t, const Poly&, const Poly&, const Gauss&)> walk =
        [&](std::size_t k, const Poly& df, const Poly& dg, const Gauss& coef) {
            if (k == graph.edges.size()) {
                result += (df * dg).scaled(coef);
                return;
            }
            for (const auto& p : pairs) {
                Poly nf = df, ng = dg;
                const int idx[2] = {p.i, p.j};
                for (int s = 0; s < 2; ++s) {
                    Poly& target = graph.edges[k][s] == 0 ? nf : ng;
                    target = target.derivative(idx[s]);
                }
                if (nf.is_zero() || ng.is_zero()) continue;
                walk(k + 1, nf, ng, coef * Gauss(p.a));
            }
        };
    walk(0, f, g, Gauss(1));
    return result;
}

Rational graph_weight(const AdmissibleGraph& graph) {
    Rational w(1);
    for (const auto& e : graph.edges) {
        if (e[0] == e[1]) return Rational(0);
        w *= e[0] == 0 ? Rational(1, 2) : Rational(-1, 2);
    }
    return w;
}

Poly kontsevich_constant_product(const Poly& f0, const Poly& g0, const PoissonTensor& alpha, int order) {
    check_dims(f0, g0, alpha);
    const Poly f = f0.with_order(order);
    const Poly g = g0.with_order(order);
    Poly result(f.dim(), order);
    Rational fact(1);
    for (int n = 0; n <= order; ++n) {
        if (n > 0) fact *= n;
        Poly level(f.dim(), order);
        for (const auto& graph : enumerate_graphs(n)) {
            Rational w = graph_weight(graph);
            if (sgn(w) == 0) continue;
            level += apply_graph_operator(graph, alpha, f, g).scaled(Gauss(w));
        }
        if (level.is_zero()) continue;
        result += level.scaled(pow(Scalar::eps(), n) * Scalar(Gauss(Rational(1) / fact)));
    }
    return result;
}

namespace {

template <class Fn>
std::vector<Poly> run_batch(const std::vector<PolyTriple>& jobs, Exec exec, Fn fn) {
    std::vector<Poly> out(jobs.size(), Poly(1, 0));
    const long n = static_cast<long>(jobs.size());
    if (exec == Exec::Serial) {
        for (long k = 0; k < n; ++k) out[k] = fn(jobs[k]);
    } else {
#pragma omp parallel for schedule(dynamic, 1)
        for (long k = 0; k < n; ++k) out[k] = fn(jobs[k]);
    }
    return out;
}

}  // namespace

std::vector<Poly> associativity_batch(const std::vector<PolyTriple>& jobs, const PoissonTensor& alpha, int order,
                                      Exec exec) {
    return run_batch(jobs, exec, [&](const PolyTriple& t) { return check_associativity(t.f, t.g, t.h, alpha, order); });
}

std::vector<Poly> moyal_batch(const std::vector<PolyTriple>& jobs, const PoissonTensor& alpha, int order, Exec exec) {
    return run_batch(jobs, exec, [&](const PolyTriple& t) { return moyal_product(t.f, t.g, alpha, order); });
}

}  // namespace dqw
