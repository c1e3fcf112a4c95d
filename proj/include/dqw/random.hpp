#pragma once

#include "dqw/poisson.hpp"
#include "dqw/poly.hpp"

#include <cstdint>
#include <random>

namespace dqw {

// Deterministic generators for property batteries; all draws go through one engine.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed) : eng_(seed) {}

    int uniform(int lo, int hi);
    Rational rational(int max_num = 5, int max_den = 4);
    // Random polynomial in x with rational coefficients, total degree <= max_deg.
    Poly poly_x(int dim, int order, int max_deg, int max_terms);
    PoissonTensor tensor(int dim);

private:
    std::mt19937_64 eng_;
};

}  // namespace dqw
