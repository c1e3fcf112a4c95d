#pragma once

#include "dqw/scalar.hpp"

#include <string>
#include <vector>

namespace dqw {

// Constant antisymmetric bivector alpha^{ij} on R^d (full matrix storage).
class PoissonTensor {
public:
    explicit PoissonTensor(int dim);
    PoissonTensor(int dim, std::vector<std::vector<Rational>> entries);

    // Standard symplectic-type pairing alpha^{2k-1,2k} = 1 on the first floor(d/2) planes.
    static PoissonTensor standard(int dim);

    int dim() const { return dim_; }
    const Rational& operator()(int i, int j) const { return a_[i - 1][j - 1]; }
    void set(int i, int j, const Rational& v);
    bool is_zero() const;
    std::string str() const;

private:
    int dim_;
    std::vector<std::vector<Rational>> a_;
};

}  // namespace dqw
