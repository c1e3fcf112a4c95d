#include "dqw/random.hpp"

namespace dqw {

int RandomSource::uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }

Rational RandomSource::rational(int max_num, int max_den) {
    Rational r(uniform(-max_num, max_num), uniform(1, max_den));
    r.canonicalize();
    return r;
}

Poly RandomSource::poly_x(int dim, int order, int max_deg, int max_terms) {
    Poly p(dim, order);
    int terms = uniform(1, max_terms);
    for (int t = 0; t < terms; ++t) {
        Poly::Exponents e(1 + 4 * dim, 0);
        int budget = uniform(0, max_deg);
        for (int k = 0; k < budget; ++k) ++e[Poly::slot(dim, Var::X, uniform(1, dim))];
        p.add_term(std::move(e), Gauss(rational()));
    }
    return p;
}

PoissonTensor RandomSource::tensor(int dim) {
    PoissonTensor a(dim);
    for (int i = 1; i <= dim; ++i)
        for (int j = i + 1; j <= dim; ++j) a.set(i, j, rational(3, 3));
    return a;
}

}  // namespace dqw
