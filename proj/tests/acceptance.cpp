// One line per acceptance criterion; exit status is nonzero if any criterion fails.
#include "dqw/gluing.hpp"
#include "dqw/random.hpp"
#include "dqw/star.hpp"
#include "dqw/states.hpp"

#include "graded_random.hpp"
#include "oracles.hpp"

#include <chrono>
#include <functional>
#include <iostream>
#include <string>

using namespace dqw;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Poly at(const Poly& p, Var block, const std::vector<Rational>& x) {
    return p.evaluate_block(block, std::vector<Gauss>(x.begin(), x.end()));
}

bool moyal_oracle() {
    RandomSource rs(101);
    for (int k = 0; k < 200; ++k) {
        int d = rs.uniform(1, 4), n = rs.uniform(0, 6);
        PoissonTensor a = rs.tensor(d);
        Poly f = rs.poly_x(d, n, 5, 5), g = rs.poly_x(d, n, 5, 5);
        if (!(moyal_product(f, g, a, n) == oracle::exponential_moyal(f, g, a, n))) return false;
    }
    return true;
}

bool associativity() {
    RandomSource rs(102);
    for (int k = 0; k < 100; ++k) {
        int d = rs.uniform(1, 4), n = rs.uniform(0, 6);
        PoissonTensor a = rs.tensor(d);
        if (!check_associativity(rs.poly_x(d, n, 3, 4), rs.poly_x(d, n, 3, 4), rs.poly_x(d, n, 3, 4), a, n).is_zero())
            return false;
    }
    return true;
}

bool bracket() {
    RandomSource rs(103);
    for (int k = 0; k < 100; ++k) {
        int d = rs.uniform(1, 4);
        PoissonTensor a = rs.tensor(d);
        Poly f = rs.poly_x(d, 0, 4, 5), g = rs.poly_x(d, 0, 4, 5);
        if (!(star_bracket(f, g, a) == oracle::direct_bracket(f, g, a))) return false;
    }
    return true;
}

bool kontsevich() {
    RandomSource rs(104);
    for (int n = 0; n <= 5; ++n)
        for (int k = 0; k < 10; ++k) {
            int d = rs.uniform(1, 4);
            PoissonTensor a = rs.tensor(d);
            Poly f = rs.poly_x(d, n, 4, 4), g = rs.poly_x(d, n, 4, 4);
            if (!(kontsevich_constant_product(f, g, a, n) == moyal_product(f, g, a, n))) return false;
        }
    return true;
}

bool mdqme(Surface s) {
    Report r = verify_mdqme(s);
    return r.verified && r.mutations.size() >= 9 && r.mutations_detected();
}

bool homotopy() {
    for (int n = 1; n <= 3; ++n) {
        VerifyOptions vo;
        vo.mutations = n < 3;
        Report r = verify_homotopy(n, vo);
        if (!r.verified || !r.mutations_detected()) return false;
    }
    return true;
}

bool gluing_moyal() {
    RandomSource rs(109);
    for (int k = 0; k < 50; ++k) {
        int d = rs.uniform(1, 3), n = rs.uniform(0, 4);
        PoissonTensor a = rs.tensor(d);
        Poly f = rs.poly_x(d, n, 4, 5), g = rs.poly_x(d, n, 4, 5);
        std::vector<Rational> x;
        for (int i = 0; i < d; ++i) x.push_back(rs.rational());
        if (!(at_point(moyal_via_gluing(f, g, a, n), x) == at(moyal_product(f, g, a, n), Var::X, x))) return false;
    }
    return true;
}

bool cap_identity() {
    RandomSource rs(110);
    for (int k = 0; k < 50; ++k) {
        int d = rs.uniform(1, 3), n = rs.uniform(0, 3);
        Poly f = rs.poly_x(d, n, 4, 5);
        Poly want = f.rename_block(Var::X, Var::XTilde);
        for (const PoissonTensor& a : {PoissonTensor(d), rs.tensor(d)}) {
            GluedDensity g = glue_pair(cap_delta(d, a, n), cap_function(f, a, n));
            if (!(integrate_target(bv_integrate_z(g)) == want)) return false;
        }
    }
    return true;
}

bool flat_sections() {
    RandomSource rs(111);
    for (int k = 0; k < 100; ++k) {
        int d = rs.uniform(1, 4);
        if (!grothendieck_flat_check(rs.poly_x(d, 2, 4, 5)).is_zero()) return false;
        Section s;
        s.dim = d;
        s.order = 2;
        for (unsigned mask = 0; mask < (1u << d); ++mask) {
            Poly p = rs.poly_x(d, 2, 3, 3) * rs.poly_x(d, 2, 2, 2).rename_block(Var::X, Var::Z);
            if (!p.is_zero()) s.parts.emplace(mask, p);
        }
        if (!grothendieck_apply(grothendieck_apply(s)).is_zero()) return false;
    }
    return true;
}

// Normal forms over 20 shuffled rule orders, for the verified identity and one mutated variant.
template <class Run>
bool confluent(Run run, const std::string& mutation) {
    for (const std::string& m : {std::string(), mutation}) {
        std::vector<std::string> base = run(m, std::nullopt);
        int mismatches = 0;
        bool exceeded = false;
#pragma omp parallel for schedule(dynamic, 1) reduction(+ : mismatches)
        for (int seed = 1; seed <= 20; ++seed) {
            try {
                if (run(m, static_cast<std::uint64_t>(seed)) != base) ++mismatches;
            } catch (const BudgetExceeded&) {
#pragma omp critical
                exceeded = true;
            }
        }
        if (exceeded || mismatches) return false;
    }
    return true;
}

bool graded_laws() {
    std::mt19937_64 rng(112);
    const int U = kFreeLabel + 2, I = kFreeLabel + 10;
    for (int k = 0; k < 300; ++k) {
        Term t = gen::random_term(rng);
        if (!gen::koszul_consistent(t, rng)) return false;
        Term b = gen::random_term(rng, kFreeLabel + 40);
        for (Deriv d : {Deriv{DerivKind::FieldE, I, U}, Deriv{DerivKind::FieldX, I, U}, Deriv{DerivKind::ZDag, I}})
            if (!gen::leibniz_holds(t, b, d)) return false;
    }
    // termination within the default budget and order independence on the full corpora
    try {
        for (Surface s : {Surface::L3, Surface::L1X}) {
            auto run = [s](const std::string& m, std::optional<std::uint64_t> seed) {
                VerifyOptions vo;
                vo.mutations = false;
                vo.mutate = m;
                vo.rewrite.shuffle_seed = seed;
                return verify_mdqme(s, vo).residual;
            };
            if (!confluent(run, s == Surface::L3 ? "flip:P12" : "flip:P")) return false;
        }
        for (int n = 1; n <= 3; ++n) {
            auto run = [n](const std::string& m, std::optional<std::uint64_t> seed) {
                VerifyOptions vo;
                vo.mutations = false;
                vo.mutate = m;
                vo.rewrite.shuffle_seed = seed;
                return verify_homotopy(n, vo).residual;
            };
            if (!confluent(run, "flip:pert_X")) return false;
        }
        auto run = [](const std::string& m, std::optional<std::uint64_t> seed) {
            VerifyOptions vo;
            vo.mutations = false;
            vo.mutate = m;
            vo.rewrite.shuffle_seed = seed;
            return verify_mdcme(vo).residual;
        };
        if (!confluent(run, "drop-SR")) return false;
    } catch (const BudgetExceeded&) {
        return false;
    }
    return true;
}

struct Criterion {
    int id;
    std::function<bool()> check;
    double limit;  // seconds; 0 for none
};

}  // namespace

int main() {
    std::vector<Criterion> all{
        {1, moyal_oracle, 30},
        {2, associativity, 60},
        {3, bracket, 0},
        {4, kontsevich, 0},
        {5, [] { return mdqme(Surface::L3); }, 10},
        {6, [] { return mdqme(Surface::L1X); }, 10},
        {7, [] { return verify_mdcme().verified; }, 1},
        {8, homotopy, 30},
        {9, gluing_moyal, 120},
        {10, cap_identity, 0},
        {11, flat_sections, 0},
        {12, graded_laws, 0},
    };
    int failed = 0;
    for (const auto& c : all) {
        auto t0 = Clock::now();
        bool ok = false;
        try {
            ok = c.check();
        } catch (const std::exception& e) {
            std::cerr << "criterion " << c.id << ": " << e.what() << "\n";
        }
        double s = seconds_since(t0);
        if (c.limit > 0 && s > c.limit) ok = false;
        std::cout << "criterion " << c.id << ": " << (ok ? "PASS" : "FAIL") << "\n";
        std::cerr << "  (" << s << " s)\n";
        failed += !ok;
    }
    return failed == 0 ? 0 : 1;
}
