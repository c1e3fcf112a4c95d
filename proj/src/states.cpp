#include "dqw/states.hpp"

#include <chrono>
#include <stdexcept>

namespace dqw {

namespace {

// Coefficients of the multiplicative dx atoms; see the README conventions section.
constexpr long kEdxL3 = -1;
constexpr long kEdxL1 = 1;

constexpr int P = 0, Q = 1, S0 = 2, B = 3;  // point labels used by the builders
constexpr int IA = 0, IB = 1;               // index labels
constexpr int U = kFreeLabel, FA = kFreeLabel + 1, FB = kFreeLabel + 2;

Scalar half() { return Scalar(Gauss(Rational(1, 2))); }
Scalar ihbar() { return Scalar(Gauss::i(), 1); }
// Side atoms carry the opposite induced orientation.
Scalar side_ihbar() { return Scalar(-Gauss::i(), 1); }

Term mk(const Scalar& s, std::vector<Binder> b, std::vector<Factor> f) { return Term(s, std::move(b), std::move(f)); }

// zeta^t = zeta + t dkappa as a list of (factor, with-t) alternatives.
std::vector<std::pair<Factor, bool>> zeta_t(int p, int q, bool t_zero) {
    std::vector<std::pair<Factor, bool>> out{{Factor::zeta(p, q), false}};
    if (!t_zero) out.push_back({Factor::kappa(p, q, 1), true});
    return out;
}

std::vector<Factor> with_t(std::vector<Factor> fs, int count) {
    for (int k = 0; k < count; ++k) fs.insert(fs.begin(), Factor::t());
    return fs;
}

void check_interval_count(int n) {
    if (n < 1) throw std::invalid_argument("number of intervals must be >= 1");
}

}  // namespace

std::string surface_name(Surface s) {
    switch (s) {
        case Surface::L1X: return "L1";
        case Surface::L1E: return "L1E";
        case Surface::L3: return "L3";
        case Surface::Mn: return "Mn";
    }
    return "?";
}

Surface parse_surface(const std::string& name) {
    if (name == "L1" || name == "L1X") return Surface::L1X;
    if (name == "L1E") return Surface::L1E;
    if (name == "L3") return Surface::L3;
    if (name == "Mn") return Surface::Mn;
    throw std::invalid_argument("unknown surface: " + name);
}

GradedExpr EffectiveAction::total() const {
    GradedExpr r;
    for (const auto& p : pieces) r += p.expr;
    return r;
}

EffectiveAction build_effective_action(Surface s, int dim, const PoissonTensor& alpha, const ActionOptions& opt) {
    if (dim < 1) throw std::invalid_argument("dimension must be >= 1");
    if (alpha.dim() != dim) throw std::invalid_argument("Poisson tensor dimension mismatch");
    const bool pert = !alpha.is_zero();
    EffectiveAction a;
    a.surface = s;
    switch (s) {
        case Surface::L1E:
            a.n = 1;
            break;
        case Surface::L1X: {
            a.n = 1;
            const int I = interval_domain(1);
            if (pert)
                a.pieces.push_back({"P", GradedExpr{mk(half(), {{P, I}, {Q, I}},
                                                       {Factor::alpha(IA, IB), Factor::e(IA, P), Factor::zeta_hat(P, Q),
                                                        Factor::e(IB, Q)})}});
            a.pieces.push_back({"z_E", GradedExpr{mk(1, {{P, I}}, {Factor::z(IA), Factor::e(IA, P)})}});
            a.pieces.push_back({"zd_dx", GradedExpr{mk(1, {}, {Factor::zdag(IA), Factor::dx(IA)})}});
            if (pert)
                a.pieces.push_back({"zd_E_tau", GradedExpr{mk(1, {{P, I}},
                                                              {Factor::alpha(IA, IB), Factor::zdag(IA),
                                                               Factor::e(IB, P), Factor::tau(P)})}});
            break;
        }
        case Surface::L3: {
            a.n = 2;
            for (int k = 1; k <= 2; ++k) {
                const int I = interval_domain(k);
                a.pieces.push_back({"S_free" + std::to_string(k),
                                    GradedExpr{mk(-1, {{P, I}, {S0, kSide}},
                                                  {Factor::e(IA, P), Factor::zeta(S0, P), Factor::x(IA, S0)})}});
            }
            if (!pert) break;
            for (int k = 1; k <= 2; ++k) {
                const int I = interval_domain(k);
                a.pieces.push_back({"P" + std::to_string(k),
                                    GradedExpr{mk(half(), {{P, I}, {Q, I}},
                                                  {Factor::alpha(IA, IB), Factor::e(IA, P), Factor::zeta_hat(P, Q),
                                                   Factor::e(IB, Q)})}});
            }
            GradedExpr mixed;
            for (auto [k, l] : {std::pair{1, 2}, std::pair{2, 1}}) {
                if (opt.single_ordering && k == 2) continue;
                mixed.add(mk(half(), {{P, interval_domain(k)}, {Q, interval_domain(l)}},
                             {Factor::alpha(IA, IB), Factor::e(IA, P), Factor::zeta_hat(P, Q), Factor::e(IB, Q)}));
            }
            a.pieces.push_back({"P12", mixed});
            break;
        }
        case Surface::Mn: {
            check_interval_count(opt.n);
            a.n = opt.n;
            for (int k = 1; k <= opt.n; ++k) {
                GradedExpr free;
                for (auto [z, t] : zeta_t(S0, P, opt.t_zero))
                    free.add(mk(-1, {{P, interval_domain(k)}, {S0, kSide}},
                                with_t({Factor::e(IA, P), z, Factor::x(IA, S0)}, t)));
                a.pieces.push_back({"S_free" + std::to_string(k), free});
            }
            if (!pert) break;
            GradedExpr per;
            for (int k = 1; k <= opt.n; ++k)
                for (int l = 1; l <= opt.n; ++l)
                    for (auto [z1, t1] : zeta_t(B, P, opt.t_zero))
                        for (auto [z2, t2] : zeta_t(B, Q, opt.t_zero))
                            per.add(mk(half(), {{B, kBulk}, {P, interval_domain(k)}, {Q, interval_domain(l)}},
                                       with_t({Factor::alpha(IA, IB), z1, z2, Factor::e(IA, P), Factor::e(IB, Q)},
                                              t1 + t2)));
            a.pieces.push_back({"P", per});
            break;
        }
    }
    return a;
}

GradedExpr homotopy_generator(int n, bool t_zero) {
    check_interval_count(n);
    GradedExpr g;
    for (int k = 1; k <= n; ++k)
        g.add(mk(1, {{P, interval_domain(k)}, {S0, kSide}},
                 {Factor::e(IA, P), Factor::kappa(S0, P), Factor::x(IA, S0)}));
    for (int k = 1; k <= n; ++k)
        for (int l = 1; l <= n; ++l) {
            std::vector<Binder> bs{{B, kBulk}, {P, interval_domain(k)}, {Q, interval_domain(l)}};
            for (auto [z, t] : zeta_t(B, Q, t_zero))
                g.add(mk(half(), bs,
                         with_t({Factor::alpha(IA, IB), Factor::kappa(B, P), z, Factor::e(IA, P), Factor::e(IB, Q)},
                                t)));
            for (auto [z, t] : zeta_t(B, P, t_zero))
                g.add(mk(-half(), bs,
                         with_t({Factor::alpha(IA, IB), z, Factor::kappa(B, Q), Factor::e(IA, P), Factor::e(IB, Q)},
                                t)));
        }
    return g;
}

std::size_t BoundaryOperator::count(bool perturbative, bool residual) const {
    std::size_t c = 0;
    for (const auto& a : atoms) c += a.perturbative == perturbative && a.residual == residual;
    return c;
}

BoundaryOperator build_boundary_operator(Surface s, int dim, const PoissonTensor& alpha, int n) {
    if (dim < 1) throw std::invalid_argument("dimension must be >= 1");
    if (alpha.dim() != dim) throw std::invalid_argument("Poisson tensor dimension mismatch");
    const bool pert = !alpha.is_zero();
    BoundaryOperator op;
    op.surface = s;
    auto over_intervals = [](int count, auto make) {
        std::vector<AtomPiece> ps;
        for (int k = 1; k <= count; ++k) ps.push_back(make(interval_domain(k)));
        return ps;
    };
    switch (s) {
        case Surface::L3:
        case Surface::Mn: {
            if (s == Surface::L3) n = 2;
            check_interval_count(n);
            if (pert) {
                op.atoms.push_back({"pert_X", true, false,
                                    {{mk(Scalar(Gauss(Rational(-1, 2)), 2), {{U, kSide}}, {Factor::alpha(FA, FB)}),
                                      {{DerivKind::FieldX, FA, U}, {DerivKind::FieldX, FB, U}}}}});
                op.atoms.push_back({"pert_E", true, false, over_intervals(n, [](int I) {
                                        return AtomPiece{mk(half(), {{U, I}},
                                                            {Factor::alpha(FA, FB), Factor::e(FA, U), Factor::e(FB, U)}),
                                                         {}};
                                    })});
            }
            op.atoms.push_back({"free_dX", false, false,
                                {{mk(side_ihbar(), {{U, kSide}}, {Factor::x(FA, U, 1)}), {{DerivKind::FieldX, FA, U}}}}});
            op.atoms.push_back({"free_dE", false, false, over_intervals(n, [](int I) {
                                    return AtomPiece{mk(ihbar(), {{U, I}}, {Factor::e(FA, U, 1)}),
                                                     {{DerivKind::FieldE, FA, U}}};
                                })});
            op.atoms.push_back({"free_dx", false, false,
                                {{mk(side_ihbar(), {{U, kSide}}, {Factor::dx(FA)}), {{DerivKind::FieldX, FA, U}}}}});
            op.atoms.push_back({"free_Edx", false, false, over_intervals(n, [](int I) {
                                    return AtomPiece{mk(kEdxL3, {{U, I}}, {Factor::e(FA, U), Factor::dx(FA)}), {}};
                                })});
            break;
        }
        case Surface::L1X:
        case Surface::L1E: {
            const int I = interval_domain(1);
            op.atoms.push_back({"free_dE", false, false,
                                {{mk(ihbar(), {{U, I}}, {Factor::e(FA, U, 1)}), {{DerivKind::FieldE, FA, U}}}}});
            op.atoms.push_back(
                {"free_Edx", false, false, {{mk(kEdxL1, {{U, I}}, {Factor::e(FA, U), Factor::dx(FA)}), {}}}});
            if (pert)
                op.atoms.push_back(
                    {"pert_E", true, false,
                     {{mk(half(), {{U, I}}, {Factor::alpha(FA, FB), Factor::e(FA, U), Factor::e(FB, U)}), {}}}});
            op.atoms.push_back({"laplacian", false, true,
                                {{mk(1, {}, {}), {{DerivKind::Z, FA}, {DerivKind::ZDag, FA}}}}});
            break;
        }
    }
    return op;
}

BoundaryOperator master_operator(Surface s, int dim, const PoissonTensor& alpha, int n) {
    BoundaryOperator op = build_boundary_operator(s, dim, alpha, n);
    for (auto& a : op.atoms)
        if (a.residual)
            for (auto& p : a.pieces) p.multiplier.mono.hbar += 2;
    return op;
}

State State::of(const EffectiveAction& a) {
    State s;
    s.prefactor.add_canonical(Monomial{}, Gauss(1));
    s.action = a.total();
    return s;
}

namespace {

// D(P e^{S'}) = (DP) e^{S'} + (-1)^{|D||P|} P (DS') e^{S'}
std::vector<Term> deriv_dressed(const Deriv& d, const std::vector<Term>& pre, const std::vector<Term>& dsp) {
    std::vector<Term> out;
    for (const auto& t : pre) {
        for (auto& r : apply_deriv(d, t)) out.push_back(std::move(r));
        bool flip = d.parity() && t.mono.parity();
        for (const auto& s : dsp) {
            Term r = graded_mul(t, s);
            if (flip) r.coef = -r.coef;
            out.push_back(std::move(r));
        }
    }
    return out;
}

}  // namespace

GradedExpr apply_operator(const BoundaryOperator& op, const State& s) {
    const std::vector<Term> exponent = s.action.scaled(Scalar::i_over_hbar()).term_list();
    const std::vector<Term> pre = s.prefactor.term_list();
    GradedExpr out;
    for (const auto& atom : op.atoms) {
        for (const auto& piece : atom.pieces) {
            std::vector<Term> cur = pre;
            for (auto it = piece.derivs.rbegin(); it != piece.derivs.rend(); ++it) {
                std::vector<Term> dsp;
                for (const auto& e : exponent)
                    for (auto& r : apply_deriv(*it, e)) dsp.push_back(std::move(r));
                cur = deriv_dressed(*it, cur, dsp);
            }
            for (const auto& t : cur) {
                Term r = graded_mul(piece.multiplier, t);
                r.coef *= s.normalization.c;
                r.mono.hbar += s.normalization.hbar;
                out.add(r);
            }
        }
    }
    return out;
}

}  // namespace dqw
