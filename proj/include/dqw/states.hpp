#pragma once

#include "dqw/graded.hpp"
#include "dqw/poisson.hpp"
#include "dqw/poly.hpp"

#include <string>
#include <vector>

namespace dqw {

enum class Surface { L1X, L1E, L3, Mn };

std::string surface_name(Surface s);
Surface parse_surface(const std::string& name);

struct ActionOptions {
    int n = 3;               // number of E-intervals for Mn
    bool t_zero = false;     // Mn at t = 0
    bool single_ordering = false;  // mixed L3 pairing over one ordering of the intervals only
};

struct ActionPiece {
    std::string name;
    GradedExpr expr;
};

struct EffectiveAction {
    Surface surface = Surface::L3;
    int n = 0;  // E-intervals
    std::vector<ActionPiece> pieces;

    GradedExpr total() const;
    std::size_t term_count() const { return total().size(); }
};

EffectiveAction build_effective_action(Surface s, int dim, const PoissonTensor& alpha, const ActionOptions& opt = {});

// One operator atom: sum over pieces of multiplier * (derivatives applied right to left).
struct AtomPiece {
    Term multiplier;
    std::vector<Deriv> derivs;
};

struct OperatorAtom {
    std::string name;
    bool perturbative = false;
    bool residual = false;  // part of the BV Laplacian on residual fields
    std::vector<AtomPiece> pieces;
};

struct BoundaryOperator {
    Surface surface = Surface::L3;
    std::vector<OperatorAtom> atoms;

    std::size_t count(bool perturbative, bool residual = false) const;
};

BoundaryOperator build_boundary_operator(Surface s, int dim, const PoissonTensor& alpha, int n = 2);

// The combined operator whose annihilation of the state is the master equation:
// Omega for L3, hbar^2 Delta + Omega for L1.
BoundaryOperator master_operator(Surface s, int dim, const PoissonTensor& alpha, int n = 2);

// prefactor * exp((i/hbar) action)
struct State {
    Scalar normalization{1};
    GradedExpr prefactor;
    GradedExpr action;

    static State of(const EffectiveAction& a);
};

// op(prefactor * e^{iS/hbar}) = result * e^{iS/hbar}; no rewriting beyond canonical form.
GradedExpr apply_operator(const BoundaryOperator& op, const State& s);

struct Mutation {
    std::string name;
    bool detected = false;
    std::size_t residual_terms = 0;
};

struct Report {
    std::string check;
    bool verified = false;
    std::vector<std::string> residual;
    std::vector<Mutation> mutations;
    std::vector<std::string> notes;
    RewriteStats stats;
    double seconds = 0;

    bool mutations_detected() const;
};

struct VerifyOptions {
    bool mutations = true;
    RewriteOptions rewrite;
    std::string mutate;  // apply one named mutation to the checked identity
};

// Residual of the master equation for one action/operator pair.
GradedExpr mdqme_residual(Surface s, const EffectiveAction& a, const BoundaryOperator& op, const RewriteOptions& ro,
                          RewriteStats* stats = nullptr);

Report verify_mdqme(Surface s, const VerifyOptions& opt = {});
Report verify_mdcme(const VerifyOptions& opt = {});
Report verify_homotopy(int n, const VerifyOptions& opt = {});

// The three-term generator of the homotopy for n intervals.
GradedExpr homotopy_generator(int n, bool t_zero = false);

// Grothendieck connection on sections: a form is a map from dx-bitmask to polynomial.
struct Section {
    int dim = 1;
    int order = 0;
    std::map<unsigned, Poly> parts;

    bool is_zero() const;
    std::string str() const;
};

Section section_of(const Poly& p);
Section grothendieck_apply(const Section& s);
Section grothendieck_flat_check(const Poly& f);

std::vector<std::string> mutation_names(Surface s);

}  // namespace dqw
