#pragma once

#include "dqw/poisson.hpp"
#include "dqw/poly.hpp"
#include "dqw/star.hpp"

#include <map>
#include <string>
#include <vector>

namespace dqw {

// An observable on a boundary interval: a polynomial, or the target delta at x-tilde.
struct Observable {
    bool delta = false;
    Poly f{1, 0};
};

// One slot of a Wick term: an X-field with target index `index` coming from observable `owner`.
struct Slot {
    int index = 1;
    int owner = 0;
    auto operator<=>(const Slot&) const = default;
};

// coef * prod_o d^{derivs[o]} obs[o] * X^{slots...}; derivs are x-exponent counts.
struct WickTerm {
    Scalar coef;
    std::vector<Slot> slots;
    std::vector<std::vector<int>> derivs;
};

struct WickSeries {
    int dim = 1;
    int order = 0;
    PoissonTensor alpha{1};
    std::vector<Observable> obs;
    std::vector<WickTerm> terms;
};

struct CapState {
    std::string label;
    Scalar prefactor{1};
    WickSeries series;
};

// Wick series sum_n ((-i hbar)^n / n!) X^{i1..in} d_{i1..in} f with the side kernel normalized.
CapState cap_function(const Poly& f, const PoissonTensor& alpha, int order);
// (i/hbar)^d delta_{x-tilde}(X); slots only enter through cross contractions.
CapState cap_delta(int dim, const PoissonTensor& alpha, int order);

// Value of the boundary kernel between an earlier and a later point on the glued boundary.
Scalar cross_kernel();

struct GlueOptions {
    bool same_side = false;  // also enumerate contractions within one observable
};

// Contracts the X-slots of a (earlier on the boundary) with those of b through the
// Poisson vertex; uncontracted slots pass through.
WickSeries wick_glue(const WickSeries& a, const WickSeries& b, const GlueOptions& opt = {});

// The two-cap composite on the remaining side of the three-interval disk.
CapState glue_triple_L3(const CapState& f, const CapState& g, const GlueOptions& opt = {});

// prefactor * sum_J d^J delta_{x-tilde}(x + z) * parts[J](x, z) [* exp((i/hbar) zd dx)].
struct GluedDensity {
    int dim = 1;
    int order = 0;
    Scalar normalization{1};
    std::map<std::vector<int>, Poly> parts;
    bool has_exponential = true;  // the residual-field exponential is still present
    bool top_form = false;        // after the BV integral: a density in x

    std::string str() const;
};

// Glues an observable cap onto the delta cap.
GluedDensity glue_pair(const CapState& delta, const CapState& cap);

// Restricts to z = 0 and integrates the odd residual fields.
GluedDensity bv_integrate_z(const GluedDensity& g);

// Integrates the delta against the density; the result is a polynomial in x-tilde.
Poly integrate_target(const GluedDensity& g);

Poly moyal_via_gluing(const Poly& f, const Poly& g, const PoissonTensor& alpha, int order);

// Evaluates a polynomial in x-tilde at a rational point.
Poly at_point(const Poly& p, const std::vector<Rational>& x);

struct GlueJob {
    Poly f, g;
    std::vector<Rational> point;
};

// Values at each job's point; jobs are independent.
std::vector<Poly> gluing_batch(const std::vector<GlueJob>& jobs, const PoissonTensor& alpha, int order,
                               Exec exec = Exec::Parallel);

}  // namespace dqw
