#include "dqw/states.hpp"

#include <chrono>
#include <stdexcept>

namespace dqw {

namespace {

const Scalar kHomotopyScale{Gauss(1), -2};

struct Setup {
    Surface surface;
    EffectiveAction action;
    BoundaryOperator op;
};

Setup default_setup(Surface s, const ActionOptions& opt = {}) {
    PoissonTensor alpha = PoissonTensor::standard(2);
    return {s, build_effective_action(s, 2, alpha, opt), master_operator(s, 2, alpha)};
}

// Applies a named mutation; returns false if the name does not apply.
bool mutate(Setup& su, const std::string& name) {
    if (name == "single-ordering") {
        if (su.surface != Surface::L3) return false;
        ActionOptions o;
        o.single_ordering = true;
        su.action = build_effective_action(su.surface, 2, PoissonTensor::standard(2), o);
        return true;
    }
    auto colon = name.find(':');
    if (colon == std::string::npos) return false;
    std::string kind = name.substr(0, colon), target = name.substr(colon + 1);
    long factor = kind == "flip" ? -1 : kind == "double" ? 2 : 0;
    if (factor == 0) return false;
    for (auto& p : su.action.pieces)
        if (p.name == target) {
            p.expr = p.expr.scaled(Scalar(factor));
            return true;
        }
    for (auto& a : su.op.atoms)
        if (a.name == target) {
            for (auto& piece : a.pieces) piece.multiplier.coef *= Gauss(factor);
            return true;
        }
    return false;
}

std::string canonical_mutation(const std::string& name) {
    if (name == "free-sign") return "flip:S_free1";
    return name;
}

RewriteOptions stokes_for(Surface s, RewriteOptions ro) {
    ro.stokes = (s == Surface::L1X || s == Surface::L1E) ? StokesKind::Tau : StokesKind::BoundaryIntegral;
    return ro;
}

double since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

GradedExpr d_dt(const GradedExpr& e) {
    GradedExpr r;
    for (const auto& [m, c] : e.terms()) {
        long count = 0;
        std::size_t at = 0;
        for (std::size_t j = 0; j < m.factors.size(); ++j)
            if (m.factors[j].kind == Kind::T) {
                ++count;
                at = j;
            }
        if (count == 0) continue;
        Monomial n = m;
        n.factors.erase(n.factors.begin() + static_cast<long>(at));
        r.add(Term(c * Gauss(count), n));
    }
    return r;
}

}  // namespace

bool Report::mutations_detected() const {
    for (const auto& m : mutations)
        if (!m.detected) return false;
    return true;
}

std::vector<std::string> mutation_names(Surface s) {
    std::vector<std::string> names;
    Setup su = default_setup(s);
    for (const auto& p : su.action.pieces) names.push_back("flip:" + p.name);
    for (const auto& a : su.op.atoms) names.push_back("flip:" + a.name);
    if (s == Surface::L3) {
        names.push_back("double:P1");
        names.push_back("double:P2");
        names.push_back("single-ordering");
    } else {
        names.push_back("double:P");
    }
    return names;
}

GradedExpr mdqme_residual(Surface s, const EffectiveAction& a, const BoundaryOperator& op, const RewriteOptions& ro,
                          RewriteStats* stats) {
    GradedExpr applied = apply_operator(op, State::of(a));
    return rewrite_normal_form(applied, stokes_for(s, ro), stats);
}

Report verify_mdqme(Surface s, const VerifyOptions& opt) {
    if (s != Surface::L1X && s != Surface::L3) throw std::invalid_argument("verify_mdqme: surface must be L1 or L3");
    auto t0 = std::chrono::steady_clock::now();
    Report r;
    r.check = "mdqme " + surface_name(s);
    Setup su = default_setup(s);
    if (!opt.mutate.empty() && !mutate(su, canonical_mutation(opt.mutate)))
        throw std::invalid_argument("unknown mutation: " + opt.mutate);
    GradedExpr res = mdqme_residual(s, su.action, su.op, opt.rewrite, &r.stats);
    r.residual = res.lines();
    r.verified = res.is_zero();
    if (opt.mutations) {
        for (const auto& name : mutation_names(s)) {
            Setup m = default_setup(s);
            mutate(m, name);
            GradedExpr mr = mdqme_residual(s, m.action, m.op, opt.rewrite);
            r.mutations.push_back({name, !mr.is_zero(), mr.size()});
        }
    }
    r.seconds = since(t0);
    return r;
}

Report verify_homotopy(int n, const VerifyOptions& opt) {
    auto t0 = std::chrono::steady_clock::now();
    Report r;
    r.check = "homotopy n=" + std::to_string(n);
    if (n > 3) r.notes.push_back("n > 3 extrapolates the three-interval computation");
    PoissonTensor alpha = PoissonTensor::standard(2);
    ActionOptions ao;
    ao.n = n;

    auto residual = [&](const GradedExpr& gen, const std::string& mutation, RewriteStats* stats) {
        EffectiveAction a = build_effective_action(Surface::Mn, 2, alpha, ao);
        BoundaryOperator op = build_boundary_operator(Surface::Mn, 2, alpha, n);
        Setup su{Surface::Mn, a, op};
        if (!mutation.empty() && !mutate(su, mutation)) throw std::invalid_argument("unknown mutation: " + mutation);
        State with_gen{Scalar(1), gen, su.action.total()};
        State bare = State::of(su.action);
        GradedExpr q1 = apply_operator(su.op, with_gen);
        GradedExpr q0 = apply_operator(su.op, bare);
        GradedExpr lhs = d_dt(su.action.total()).scaled(Scalar::i_over_hbar());
        GradedExpr rhs = (q1 - graded_mul(q0, gen)).scaled(kHomotopyScale);
        return rewrite_normal_form(lhs - rhs, stokes_for(Surface::Mn, opt.rewrite), stats);
    };

    GradedExpr gen = homotopy_generator(n);
    GradedExpr res = residual(gen, opt.mutate, &r.stats);
    r.residual = res.lines();
    r.verified = res.is_zero();
    if (opt.mutations) {
        GradedExpr free_part, pert_part;
        for (const auto& [m, c] : gen.terms()) (m.binders.size() == 2 ? free_part : pert_part).add_canonical(m, c);
        std::vector<std::pair<std::string, GradedExpr>> gens{
            {"flip:A_free", pert_part - free_part},
            {"flip:A_pert", free_part - pert_part},
            {"drop:A_pert", free_part},
        };
        for (const auto& [name, g] : gens) {
            GradedExpr mr = residual(g, "", nullptr);
            r.mutations.push_back({name, !mr.is_zero(), mr.size()});
        }
        for (const std::string name : {"flip:S_free1", "flip:free_dE", "flip:pert_X"}) {
            GradedExpr mr = residual(gen, name, nullptr);
            r.mutations.push_back({name, !mr.is_zero(), mr.size()});
        }
    }
    r.seconds = since(t0);
    return r;
}

Report verify_mdcme(const VerifyOptions& opt) {
    auto t0 = std::chrono::steady_clock::now();
    Report r;
    r.check = "mdcme";
    const int I = interval_domain(1);
    const Scalar one(1);

    // Variational operators only see factors of variational degree one.
    auto var_degree = [](const Factor& f) {
        return f.kind == Kind::VarE || f.kind == Kind::VarX || f.kind == Kind::DeltaS || f.kind == Kind::PiAlpha;
    };
    // delta of a variational-degree-zero expression: E -> varE.
    auto vary = [&](const GradedExpr& e) {
        GradedExpr out;
        for (const auto& t : e.term_list()) {
            int sign = 1;
            for (std::size_t j = 0; j < t.mono.factors.size(); ++j) {
                const Factor& f = t.mono.factors[j];
                if (f.kind == Kind::E && !f.d) {
                    Term u = t;
                    u.mono.factors[j] = Factor::var_e(f.idx[0], f.pt[0]);
                    if (sign < 0) u.coef = -u.coef;
                    out.add(u);
                }
                if (var_degree(f)) sign = -sign;
            }
        }
        return out;
    };
    // Contraction with the vector field dx^a delta/delta X_a: varX_a -> dx^a.
    auto contract_dx = [&](const GradedExpr& e) {
        GradedExpr out;
        for (const auto& t : e.term_list()) {
            int sign = 1;
            for (std::size_t j = 0; j < t.mono.factors.size(); ++j) {
                const Factor& f = t.mono.factors[j];
                if (f.kind == Kind::VarX) {
                    Term u = t;
                    u.mono.factors[j] = Factor::dx(f.idx[0]);
                    if (sign < 0) u.coef = -u.coef;
                    out.add(u);
                }
                if (var_degree(f)) sign = -sign;
            }
        }
        return out;
    };

    GradedExpr omega{Term(one, {{0, I}}, {Factor::var_x(0, 0), Factor::var_e(0, 0)})};
    GradedExpr s_r{Term(one, {{0, I}}, {Factor::e(0, 0), Factor::dx(0)})};
    GradedExpr delta_s{Term(one, {}, {Factor::delta_s()})};
    GradedExpr pi_alpha{Term(one, {}, {Factor::pi_alpha()})};
    GradedExpr iq0_omega = delta_s + pi_alpha;  // axiom for the undeformed vector field

    auto residual = [&](bool with_sr, long dx_sign) {
        GradedExpr iq_omega = iq0_omega + contract_dx(omega).scaled(Scalar(dx_sign));
        GradedExpr s_tilde_var = delta_s + (with_sr ? vary(s_r) : GradedExpr{});
        return iq_omega - s_tilde_var - pi_alpha;
    };

    bool with_sr = opt.mutate != "drop-SR";
    long dx_sign = opt.mutate == "flip-dx" ? -1 : 1;
    if (!opt.mutate.empty() && opt.mutate != "drop-SR" && opt.mutate != "flip-dx")
        throw std::invalid_argument("unknown mutation: " + opt.mutate);
    GradedExpr res = residual(with_sr, dx_sign);
    r.residual = res.lines();
    r.verified = res.is_zero();
    if (opt.mutations) {
        GradedExpr dsr = vary(s_r);
        GradedExpr m1 = residual(false, 1), m2 = residual(true, -1);
        r.mutations.push_back({"drop-SR", m1 == dsr, m1.size()});
        r.mutations.push_back({"flip-dx", m2 == dsr.scaled(Scalar(-2)) || m2 == dsr.scaled(Scalar(2)), m2.size()});
    }
    r.seconds = since(t0);
    return r;
}

}  // namespace dqw
