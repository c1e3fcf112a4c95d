#pragma once

#include "dqw/scalar.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dqw {

// Integration domains. Every 1-dim domain binds an odd variable, the bulk an even one.
constexpr int kBulk = 0;
constexpr int kSide = 1;  // the X-polarized side
inline int interval_domain(int k) { return 1 + k; }  // E-polarized intervals, k >= 1
inline bool domain_odd(int dom) { return dom != kBulk; }
std::string domain_name(int dom);

enum class Kind : std::uint8_t {
    Alpha,    // alpha^{ab}, skew
    Dx,       // dx^a on the moduli space
    Z,        // residual z^a
    ZDag,     // residual z-dagger_a
    T,        // formal homotopy parameter
    E,        // boundary field E_a(p)
    X,        // boundary field X^a(p)
    Zeta,     // propagator zeta(p, q)
    ZetaHat,  // boundary kernel, skew in (p, q)
    Tau,      // one-form tau(p)
    Kappa,    // homotopy zero-form kappa(p, q)
    DeltaPt,  // point delta, skew in (p, q)
    VarE,     // variational one-forms
    VarX,
    DeltaS,   // opaque symbols for the classical check
    PiAlpha,
};

struct Factor {
    Kind kind = Kind::T;
    std::uint8_t d = 0;  // total de Rham differential on the source
    std::array<int, 2> idx{-1, -1};
    std::array<int, 2> pt{-1, -1};

    int parity() const;
    int points() const;
    auto operator<=>(const Factor&) const = default;

    static Factor alpha(int a, int b) { return {Kind::Alpha, 0, {a, b}, {-1, -1}}; }
    static Factor dx(int a) { return {Kind::Dx, 0, {a, -1}, {-1, -1}}; }
    static Factor z(int a) { return {Kind::Z, 0, {a, -1}, {-1, -1}}; }
    static Factor zdag(int a) { return {Kind::ZDag, 0, {a, -1}, {-1, -1}}; }
    static Factor t() { return {Kind::T, 0, {-1, -1}, {-1, -1}}; }
    static Factor e(int a, int p, int d = 0) { return {Kind::E, std::uint8_t(d), {a, -1}, {p, -1}}; }
    static Factor x(int a, int p, int d = 0) { return {Kind::X, std::uint8_t(d), {a, -1}, {p, -1}}; }
    static Factor zeta(int p, int q, int d = 0) { return {Kind::Zeta, std::uint8_t(d), {-1, -1}, {p, q}}; }
    static Factor zeta_hat(int p, int q, int d = 0) { return {Kind::ZetaHat, std::uint8_t(d), {-1, -1}, {p, q}}; }
    static Factor tau(int p) { return {Kind::Tau, 0, {-1, -1}, {p, -1}}; }
    static Factor kappa(int p, int q, int d = 0) { return {Kind::Kappa, std::uint8_t(d), {-1, -1}, {p, q}}; }
    static Factor delta(int p, int q) { return {Kind::DeltaPt, 0, {-1, -1}, {p, q}}; }
    static Factor var_e(int a, int p) { return {Kind::VarE, 0, {a, -1}, {p, -1}}; }
    static Factor var_x(int a, int p) { return {Kind::VarX, 0, {a, -1}, {p, -1}}; }
    static Factor delta_s() { return {Kind::DeltaS, 0, {-1, -1}, {-1, -1}}; }
    static Factor pi_alpha() { return {Kind::PiAlpha, 0, {-1, -1}, {-1, -1}}; }
};

struct Binder {
    int point = 0;
    int domain = 0;
    auto operator<=>(const Binder&) const = default;
};

// A term without its coefficient: hbar power, ordered binders, ordered factors.
struct Monomial {
    int hbar = 0;
    std::vector<Binder> binders;
    std::vector<Factor> factors;
    auto operator<=>(const Monomial&) const = default;

    int parity() const;
    int d_count() const;
};

struct Term {
    Gauss coef{1};
    Monomial mono;

    Term() = default;
    Term(Gauss c, Monomial m) : coef(std::move(c)), mono(std::move(m)) {}
    Term(const Scalar& s, std::vector<Binder> b, std::vector<Factor> f)
        : coef(s.c), mono{s.hbar, std::move(b), std::move(f)} {}
};

// Canonical form: relabel bound points and contracted indices, normalize skew kernels,
// sort binders and factors with Koszul signs. Returns nullopt for a vanishing term.
std::optional<Term> canonicalize(const Term& t);

class GradedExpr {
public:
    using Map = std::map<Monomial, Gauss>;

    GradedExpr() = default;
    GradedExpr(std::initializer_list<Term> terms) {
        for (const auto& t : terms) add(t);
    }

    void add(const Term& t);  // canonicalizes
    void add_canonical(const Monomial& m, const Gauss& c);
    GradedExpr& operator+=(const GradedExpr& o);
    GradedExpr& operator-=(const GradedExpr& o);
    friend GradedExpr operator+(GradedExpr a, const GradedExpr& b) { return a += b; }
    friend GradedExpr operator-(GradedExpr a, const GradedExpr& b) { return a -= b; }
    GradedExpr scaled(const Scalar& s) const;
    friend bool operator==(const GradedExpr& a, const GradedExpr& b) { return a.terms_ == b.terms_; }

    const Map& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    std::vector<Term> term_list() const;

    // One term per line: coefficient | factors | domains.
    std::string str() const;
    std::vector<std::string> lines() const;

private:
    Map terms_;
};

std::string term_str(const Gauss& c, const Monomial& m);

// Product with Koszul signs; dummy labels of b are shifted away from those of a.
Term graded_mul(const Term& a, const Term& b);
GradedExpr graded_mul(const GradedExpr& a, const GradedExpr& b);

// Left functional or residual derivative.
enum class DerivKind { FieldE, FieldX, Z, ZDag };
struct Deriv {
    DerivKind kind;
    int index;      // label carried into the result
    int point = -1; // for field derivatives
    int domain = -1;
    int parity() const;
};

// Labels at or above this value are reserved for operator-supplied indices and points.
constexpr int kFreeLabel = 1000;

std::vector<Term> apply_deriv(const Deriv& d, const Term& t);
GradedExpr functional_derivative(const GradedExpr& e, const Deriv& d);

struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class AnyOddTerm : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// sum_k S^k / k!, dropping terms with more than max_factors factors or hbar power above max_hbar.
GradedExpr exp_truncated(const GradedExpr& s, std::size_t max_factors, int max_hbar = 64);

enum class StokesKind { BoundaryIntegral, Tau };

struct RewriteOptions {
    StokesKind stokes = StokesKind::BoundaryIntegral;
    std::size_t budget = 0;  // 0: take DQW_RULE_BUDGET or the default
    std::optional<std::uint64_t> shuffle_seed;
};

struct RewriteStats {
    std::size_t local_steps = 0;
    std::size_t relations = 0;
    std::size_t closure_terms = 0;
};

std::size_t default_rule_budget();

// Local rules only (delta integration, closedness, kernel axioms, boundary-kernel Stokes).
GradedExpr apply_local_rules(const GradedExpr& e, const RewriteOptions& opt, RewriteStats* stats = nullptr);

// Local rules, then reduction modulo the integration-by-parts relations generated from the
// terms present; the result is the unique normal form under the fixed term order.
GradedExpr rewrite_normal_form(const GradedExpr& e, const RewriteOptions& opt = {}, RewriteStats* stats = nullptr);

}  // namespace dqw
