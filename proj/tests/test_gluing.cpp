#include "dqw/gluing.hpp"
#include "dqw/parse.hpp"
#include "dqw/random.hpp"
#include "dqw/star.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace dqw;

namespace {

Poly P(const char* s, int d = 2, int n = 2) { return parse_poly(s, d, n); }

PoissonTensor plane() { return PoissonTensor::standard(2); }

Poly eval_x(const Poly& p, const std::vector<Rational>& x) {
    return p.evaluate_block(Var::X, std::vector<Gauss>(x.begin(), x.end()));
}

Poly through_gluing(const Poly& f, const Poly& g, const PoissonTensor& a, int n, const std::vector<Rational>& x) {
    return at_point(moyal_via_gluing(f, g, a, n), x);
}

// value of the delta cap glued to a single observable, integrated out
Poly single_value(const Poly& f, const PoissonTensor& a, int n) {
    return integrate_target(bv_integrate_z(glue_pair(cap_delta(f.dim(), a, n), cap_function(f, a, n))));
}

}  // namespace

TEST_CASE("function caps are truncated Wick series", "[gluing]") {
    CapState one = cap_function(P("1"), plane(), 2);
    REQUIRE(one.series.terms.size() == 1);
    CHECK(one.series.terms[0].slots.empty());

    CapState x1 = cap_function(P("x1"), plane(), 2);
    REQUIRE(x1.series.terms.size() == 2);
    const WickTerm& lin = x1.series.terms[1];
    CHECK(lin.slots.size() == 1);
    CHECK(lin.coef == Scalar::minus_i_hbar());
    CHECK(x1.series.obs[0].f.derivative(lin.derivs[0]) == P("1"));

    CHECK_THROWS_AS(cap_function(parse_poly("z1", 2, 2), plane(), 2), std::invalid_argument);
}

TEST_CASE("delta cap carries the (i/hbar)^d prefactor", "[gluing]") {
    for (int d = 1; d <= 3; ++d) {
        CapState c = cap_delta(d, PoissonTensor(d), 2);
        CHECK(c.prefactor == pow(Scalar::i_over_hbar(), d));
        CHECK(c.series.terms.size() == 1);
    }
}

TEST_CASE("delta cap glued to a function cap gives the shifted closed form", "[gluing]") {
    Poly f = P("x1^2*x2 + 3*x2");
    GluedDensity g = glue_pair(cap_delta(2, PoissonTensor(2), 2), cap_function(f, PoissonTensor(2), 2));
    CHECK(g.normalization == pow(Scalar::i_over_hbar(), 2));
    CHECK(g.has_exponential);
    REQUIRE(g.parts.size() == 1);
    CHECK(g.parts.begin()->first == std::vector<int>{0, 0});
    CHECK(g.parts.begin()->second == f.taylor_shift());

    GluedDensity one = glue_pair(cap_delta(2, PoissonTensor(2), 2), cap_function(P("1"), PoissonTensor(2), 2));
    REQUIRE(one.parts.size() == 1);
    CHECK(one.parts.begin()->second == P("1"));
}

TEST_CASE("delta gluing at first order is the star product with the delta", "[gluing]") {
    // f * delta = f delta + eps alpha^{ij} d_i f d_j delta + O(hbar^2)
    Poly f = P("x1^2 + x1*x2", 2, 1);
    GluedDensity g = glue_pair(cap_delta(2, plane(), 1), cap_function(f, plane(), 1));
    Poly shifted = f.taylor_shift();
    CHECK(g.parts.at({0, 0}) == shifted);
    Poly want12 = shifted.derivative(Var::X, 1).scaled(Scalar::eps());
    Poly want21 = -shifted.derivative(Var::X, 2).scaled(Scalar::eps());
    CHECK(g.parts.at({0, 1}) == want12);
    CHECK(g.parts.at({1, 0}) == want21);
}

TEST_CASE("BV integral and target integration recover the observable", "[gluing]") {
    RandomSource rs(5);
    for (int k = 0; k < 20; ++k) {
        int d = rs.uniform(1, 3);
        Poly f = rs.poly_x(d, 2, 4, 5);
        Poly want = f.with_order(2).rename_block(Var::X, Var::XTilde);
        CHECK(single_value(f, PoissonTensor(d), 2) == want);
        CHECK(single_value(f, rs.tensor(d), 2) == want);
    }
}

TEST_CASE("BV integral removes residual fields", "[gluing]") {
    GluedDensity g = glue_pair(cap_delta(2, plane(), 2), cap_function(P("x1*x2^2"), plane(), 2));
    GluedDensity r = bv_integrate_z(g);
    for (const auto& [j, p] : r.parts) {
        CHECK_FALSE(p.contains(Var::Z));
        CHECK_FALSE(p.contains(Var::ZDag));
    }
    CHECK(r.normalization == Scalar(1));
    CHECK_THROWS_AS(bv_integrate_z(r), std::invalid_argument);
    CHECK_THROWS_AS(integrate_target(g), std::invalid_argument);
    CHECK_FALSE(integrate_target(r).contains(Var::X));
}

TEST_CASE("target integration moves derivatives off the delta", "[gluing]") {
    GluedDensity g;
    g.dim = 2;
    g.order = 0;
    g.has_exponential = false;
    g.top_form = true;
    Poly h = P("x1^2*x2 + x2", 2, 0);
    g.parts.insert_or_assign({1, 0}, h);
    CHECK(integrate_target(g) == (-h.derivative(Var::X, 1)).rename_block(Var::X, Var::XTilde));
    // alpha^{ij} d_i f d_j delta integrates to zero
    GluedDensity s = g;
    s.parts.clear();
    s.parts.insert_or_assign({0, 1}, h.derivative(Var::X, 1));
    s.parts.insert_or_assign({1, 0}, -h.derivative(Var::X, 2));
    CHECK(integrate_target(s).is_zero());
}

TEST_CASE("three-disk gluing examples", "[gluing]") {
    std::vector<Rational> origin{0, 0};
    CHECK(through_gluing(P("x1"), P("x2"), plane(), 2, origin) == Poly::eps(2, 2));
    Poly eps = Poly::eps(2, 2);
    CHECK(through_gluing(P("x1^2"), P("x2^2"), plane(), 2, origin) == (eps * eps).scaled(Gauss(2)));
    std::vector<Rational> pt{Rational(1, 2), -3};
    Poly f = P("x1^3 + x2"), g = P("x1*x2 - 2");
    CHECK(through_gluing(f, g, PoissonTensor(2), 2, pt) == eval_x(f * g, pt));
    CHECK(through_gluing(P("7"), g, plane(), 2, pt) == eval_x(g.scaled(Gauss(7)), pt));
}

TEST_CASE("composite state keeps the cross contraction", "[gluing]") {
    CapState c = glue_triple_L3(cap_function(P("x1"), plane(), 2), cap_function(P("x2"), plane(), 2));
    Scalar contracted;
    for (const auto& t : c.series.terms)
        if (t.slots.empty()) contracted = t.coef;
    // only the term with both derivatives and no open slots carries the pairing
    bool found = false;
    for (const auto& t : c.series.terms)
        if (t.slots.empty() && t.derivs[0] == std::vector<int>{1, 0} && t.derivs[1] == std::vector<int>{0, 1}) {
            CHECK(t.coef == Scalar::eps());
            found = true;
        }
    CHECK(found);
    CHECK_THROWS_AS(glue_triple_L3(cap_delta(2, plane(), 2), c), std::invalid_argument);
}

TEST_CASE("same-side contractions cancel", "[gluing]") {
    RandomSource rs(17);
    for (int n = 1; n <= 3; ++n) {
        for (int k = 0; k < 5; ++k) {
            int d = rs.uniform(2, 3);
            PoissonTensor a = rs.tensor(d);
            Poly f = rs.poly_x(d, n, 4, 4), g = rs.poly_x(d, n, 4, 4);
            CapState cf = cap_function(f, a, n), cg = cap_function(g, a, n);
            GlueOptions all;
            all.same_side = true;
            CapState with = glue_triple_L3(cf, cg, all), without = glue_triple_L3(cf, cg);
            GluedDensity dw = glue_pair(cap_delta(d, a, n), with), dn = glue_pair(cap_delta(d, a, n), without);
            CHECK(dw.parts == dn.parts);
        }
    }
}

TEST_CASE("gluing is order coherent", "[gluing]") {
    RandomSource rs(23);
    for (int k = 0; k < 10; ++k) {
        int d = rs.uniform(1, 3);
        PoissonTensor a = rs.tensor(d);
        Poly f = rs.poly_x(d, 4, 3, 4), g = rs.poly_x(d, 4, 3, 4);
        for (int n = 0; n < 3; ++n)
            CHECK(moyal_via_gluing(f, g, a, n + 1).truncated(n) == moyal_via_gluing(f, g, a, n));
    }
}

TEST_CASE("gluing is associative", "[gluing]") {
    RandomSource rs(29);
    for (int k = 0; k < 5; ++k) {
        int d = rs.uniform(2, 3);
        PoissonTensor a = rs.tensor(d);
        const int n = 3;
        CapState f = cap_function(rs.poly_x(d, n, 3, 3), a, n), g = cap_function(rs.poly_x(d, n, 3, 3), a, n),
                 h = cap_function(rs.poly_x(d, n, 3, 3), a, n);
        CapState left = glue_triple_L3(glue_triple_L3(f, g), h), right = glue_triple_L3(f, glue_triple_L3(g, h));
        Poly lv = integrate_target(bv_integrate_z(glue_pair(cap_delta(d, a, n), left)));
        Poly rv = integrate_target(bv_integrate_z(glue_pair(cap_delta(d, a, n), right)));
        CHECK(lv == rv);
    }
}

TEST_CASE("gluing reproduces the Moyal product", "[gluing][moyal]") {
    RandomSource rs(31);
    std::vector<GlueJob> jobs;
    std::vector<PoissonTensor> tensors;
    for (int k = 0; k < 30; ++k) {
        int d = rs.uniform(1, 3), n = rs.uniform(0, 4);
        PoissonTensor a = rs.tensor(d);
        Poly f = rs.poly_x(d, n, 4, 5), g = rs.poly_x(d, n, 4, 5);
        std::vector<Rational> x;
        for (int i = 0; i < d; ++i) x.push_back(rs.rational());
        Poly got = through_gluing(f, g, a, n, x);
        CHECK(got == eval_x(oracle::exponential_moyal(f, g, a, n), x));
        CHECK(got == eval_x(moyal_product(f, g, a, n), x));
    }
}

TEST_CASE("parallel batch matches serial", "[gluing]") {
    RandomSource rs(37);
    PoissonTensor a = PoissonTensor::standard(2);
    std::vector<GlueJob> jobs;
    for (int k = 0; k < 8; ++k) jobs.push_back({rs.poly_x(2, 2, 3, 4), rs.poly_x(2, 2, 3, 4), {rs.rational(), rs.rational()}});
    CHECK(gluing_batch(jobs, a, 2, Exec::Serial) == gluing_batch(jobs, a, 2, Exec::Parallel));
}
