#pragma once

#include "dqw/poly.hpp"

#include <stdexcept>
#include <string>
#include <string_view>

namespace dqw {

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " at position " + std::to_string(pos)), position(pos) {}
    std::size_t position;
};

// Grammar: integer/rational literals, x1..xd, z1..zd, zd1..zdd, xt1..xtd, i, hbar, eps,
// binary + - * / (division by nonzero constants only), ^ with nonnegative integer exponents,
// unary +/-, parentheses.
Poly parse_poly(std::string_view text, int dim, int order = 0);

Rational parse_rational(std::string_view text);

}  // namespace dqw
