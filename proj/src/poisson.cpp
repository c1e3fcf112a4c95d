#include "dqw/poisson.hpp"

#include "dqw/poly.hpp"

namespace dqw {

PoissonTensor::PoissonTensor(int dim) : dim_(dim), a_(dim, std::vector<Rational>(dim, Rational(0))) {
    if (dim < 1) throw AlgebraError("dimension must be >= 1");
}

PoissonTensor::PoissonTensor(int dim, std::vector<std::vector<Rational>> entries) : PoissonTensor(dim) {
    if (static_cast<int>(entries.size()) != dim) throw AlgebraError("alpha: expected " + std::to_string(dim) + " rows");
    for (int i = 0; i < dim; ++i) {
        if (static_cast<int>(entries[i].size()) != dim)
            throw AlgebraError("alpha: row " + std::to_string(i + 1) + " has wrong length");
        for (int j = 0; j < dim; ++j) {
            a_[i][j] = entries[i][j];
            a_[i][j].canonicalize();
        }
    }
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            if (a_[i][j] != -a_[j][i])
                throw AlgebraError("alpha is not antisymmetric at (" + std::to_string(i + 1) + "," +
                                   std::to_string(j + 1) + ")");
}

PoissonTensor PoissonTensor::standard(int dim) {
    PoissonTensor p(dim);
    for (int k = 1; k + 1 <= dim; k += 2) p.set(k, k + 1, Rational(1));
    return p;
}

void PoissonTensor::set(int i, int j, const Rational& v) {
    if (i < 1 || j < 1 || i > dim_ || j > dim_) throw AlgebraError("alpha index out of range");
    if (i == j && sgn(v) != 0) throw AlgebraError("alpha diagonal must vanish");
    a_[i - 1][j - 1] = v;
    a_[j - 1][i - 1] = -v;
}

bool PoissonTensor::is_zero() const {
    for (const auto& row : a_)
        for (const auto& v : row)
            if (sgn(v) != 0) return false;
    return true;
}

std::string PoissonTensor::str() const {
    std::string s = "[";
    for (int i = 0; i < dim_; ++i) {
        s += i ? ",[" : "[";
        for (int j = 0; j < dim_; ++j) s += (j ? "," : "") + std::string("\"") + a_[i][j].get_str() + "\"";
        s += "]";
    }
    return s + "]";
}

}  // namespace dqw
